package com.bank.shared;

public class Money {
  private long cents;
  private String currency;
}
