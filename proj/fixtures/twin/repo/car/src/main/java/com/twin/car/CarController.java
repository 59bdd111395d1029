package com.twin.car;

public class CarController {
  private final CarService service;

  public CarController(CarService service) { this.service = service; }

  public ResponseEntity handleRequest(HttpRequest request) {
    String route = request.routePath();
    return ResponseEntity.respond(route, service.lookup(route));
  }
}
