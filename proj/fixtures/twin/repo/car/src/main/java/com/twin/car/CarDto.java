package com.twin.car;

public class CarDto {
  private String payload;
  private boolean serializable;

  public String toPayload() { return payload; }
}
