package com.minipet.pet;

public class PetService {
    private final PetRepository pets;

    public PetService(PetRepository pets) {
        this.pets = pets;
    }

    public Pet createPet(String name, String typeName) {
        Pet pet = new Pet();
        pet.setName(name);
        pet.setType(PetType.fromName(typeName));
        pets.save(pet);
        return pet;
    }

    public Pet findPet(Integer petId) {
        return pets.findById(petId);
    }
}
