package com.minipet.owner;

import java.util.List;

public interface OwnerRepository {
    Owner findById(Integer id);

    List<Owner> findByLastName(String lastName);

    void save(Owner owner);
}
