package com.mono;

public class Handler {
  public void handle() {}
}
