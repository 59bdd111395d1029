package com.twin.car;

public class CarService {
  private final CarRepository repository;

  public CarService(CarRepository repository) { this.repository = repository; }

  public Object lookup(String key) {
    transactionBegin();
    Object found = repository.load(key);
    transactionCommit();
    return found;
  }

  private void transactionBegin() {}
  private void transactionCommit() {}
}
