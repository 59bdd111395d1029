package com.twin.car;

public class CarEntity {
  private long identifier;
  private long version;
  private String plate;

  public long getIdentifier() { return identifier; }
  public long getVersion() { return version; }
}
