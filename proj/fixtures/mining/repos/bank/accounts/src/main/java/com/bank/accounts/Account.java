package com.bank.accounts;

public class Account {
  private String iban;
  private long balance;
}
