package com.minipet.owner;

import com.minipet.pet.Pet;
import com.minipet.pet.PetService;

public class OwnerService {
    private final OwnerRepository owners;
    private final PetService petService;

    public OwnerService(OwnerRepository owners, PetService petService) {
        this.owners = owners;
        this.petService = petService;
    }

    public Owner findOwner(Integer ownerId) {
        return owners.findById(ownerId);
    }

    public Owner registerPet(Integer ownerId, String petName, String typeName) {
        Owner owner = owners.findById(ownerId);
        Pet pet = petService.createPet(petName, typeName);
        owner.addPet(pet);
        owners.save(owner);
        return owner;
    }
}
