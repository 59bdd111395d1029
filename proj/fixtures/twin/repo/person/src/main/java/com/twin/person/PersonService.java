package com.twin.person;

public class PersonService {
  private final PersonRepository repository;

  public PersonService(PersonRepository repository) { this.repository = repository; }

  public Object lookup(String key) {
    transactionBegin();
    Object found = repository.load(key);
    transactionCommit();
    return found;
  }

  private void transactionBegin() {}
  private void transactionCommit() {}
}
