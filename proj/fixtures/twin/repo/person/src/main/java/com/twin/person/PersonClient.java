package com.twin.person;

public class PersonClient {
  private final RemoteEndpoint endpoint;

  public PersonClient(RemoteEndpoint endpoint) { this.endpoint = endpoint; }

  public String fetchRemote(String resource) {
    return endpoint.invokeHttp(resource, timeoutMillis());
  }

  private int timeoutMillis() { return 3000; }
}
