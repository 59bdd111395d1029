package com.shop.catalog;

public class Category {
  private String title;
}
