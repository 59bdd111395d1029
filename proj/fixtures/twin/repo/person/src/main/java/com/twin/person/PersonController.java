package com.twin.person;

public class PersonController {
  private final PersonService service;

  public PersonController(PersonService service) { this.service = service; }

  public ResponseEntity handleRequest(HttpRequest request) {
    String route = request.routePath();
    return ResponseEntity.respond(route, service.lookup(route));
  }
}
