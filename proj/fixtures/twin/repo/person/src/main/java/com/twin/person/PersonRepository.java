package com.twin.person;

public class PersonRepository {
  private final DataSource dataSource;

  public PersonRepository(DataSource dataSource) { this.dataSource = dataSource; }

  public Object load(String key) {
    String query = "select row from table where key = ?";
    return dataSource.executeQuery(query, key);
  }
}
