package com.twin.person;

public class PersonValidator {
  public boolean validateConstraints(PersonDto candidate) {
    ValidationResult result = ValidationResult.check(candidate);
    return result.violations() == 0;
  }
}
