package com.mono;

public class App {
  public static void main(String[] args) {}
}
