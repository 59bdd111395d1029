package com.bank.transfers;

public class Transfer {
  private long amount;
}
