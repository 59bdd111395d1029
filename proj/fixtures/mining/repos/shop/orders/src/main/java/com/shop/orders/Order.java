package com.shop.orders;

import java.util.List;

public class Order {
  private List<OrderLine> lines;
  public int lineCount() { return lines.size(); }
}
