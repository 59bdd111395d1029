package com.bank.accounts;

public class AccountService {
  public Account open(String iban) { return new Account(); }
}
