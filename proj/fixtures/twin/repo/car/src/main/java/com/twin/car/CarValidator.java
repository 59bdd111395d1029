package com.twin.car;

public class CarValidator {
  public boolean validateConstraints(CarDto candidate) {
    ValidationResult result = ValidationResult.check(candidate);
    return result.violations() == 0;
  }
}
