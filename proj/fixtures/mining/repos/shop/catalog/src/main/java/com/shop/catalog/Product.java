package com.shop.catalog;

public class Product {
  private String sku;
  private long priceCents;

  public String getSku() { return sku; }
}
