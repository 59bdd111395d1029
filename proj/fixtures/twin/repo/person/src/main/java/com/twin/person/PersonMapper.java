package com.twin.person;

public class PersonMapper {
  public PersonDto convertToTransfer(PersonEntity entity) {
    return new PersonDto();
  }

  public PersonEntity convertFromTransfer(PersonDto transfer) {
    return new PersonEntity();
  }
}
