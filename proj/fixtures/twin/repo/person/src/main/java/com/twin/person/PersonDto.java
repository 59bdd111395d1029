package com.twin.person;

public class PersonDto {
  private String payload;
  private boolean serializable;

  public String toPayload() { return payload; }
}
