package com.twin.car;

public class CarRepository {
  private final DataSource dataSource;

  public CarRepository(DataSource dataSource) { this.dataSource = dataSource; }

  public Object load(String key) {
    String query = "select row from table where key = ?";
    return dataSource.executeQuery(query, key);
  }
}
