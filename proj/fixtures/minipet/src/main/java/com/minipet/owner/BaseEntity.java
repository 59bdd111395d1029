package com.minipet.owner;

public abstract class BaseEntity {
    protected Integer id;

    public Integer getId() { return id; }

    public void setId(Integer id) { this.id = id; }

    public boolean isNew() { return this.id == null; }
}
