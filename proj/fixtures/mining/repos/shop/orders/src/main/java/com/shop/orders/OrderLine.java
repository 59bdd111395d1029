package com.shop.orders;

public class OrderLine {
  private String sku;
  private int quantity;
}
