package com.shop.orders;

public class OrderService {
  private final OrderRepository repository = new OrderRepository();

  public Order place(Order order) {
    return repository.save(order);
  }
}
