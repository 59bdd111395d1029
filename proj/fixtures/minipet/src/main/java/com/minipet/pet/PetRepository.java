package com.minipet.pet;

import java.util.List;

public interface PetRepository {
    Pet findById(Integer id);

    List<PetType> findPetTypes();

    void save(Pet pet);
}
