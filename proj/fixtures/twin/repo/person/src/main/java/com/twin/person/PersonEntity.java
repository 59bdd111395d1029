package com.twin.person;

public class PersonEntity {
  private long identifier;
  private long version;
  private String passport;

  public long getIdentifier() { return identifier; }
  public long getVersion() { return version; }
}
