package com.twin.car;

public class CarClient {
  private final RemoteEndpoint endpoint;

  public CarClient(RemoteEndpoint endpoint) { this.endpoint = endpoint; }

  public String fetchRemote(String resource) {
    return endpoint.invokeHttp(resource, timeoutMillis());
  }

  private int timeoutMillis() { return 3000; }
}
