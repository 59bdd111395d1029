package com.twin.car;

public class CarMapper {
  public CarDto convertToTransfer(CarEntity entity) {
    return new CarDto();
  }

  public CarEntity convertFromTransfer(CarDto transfer) {
    return new CarEntity();
  }
}
