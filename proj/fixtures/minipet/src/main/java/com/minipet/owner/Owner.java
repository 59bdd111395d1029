package com.minipet.owner;

import java.util.ArrayList;
import java.util.List;
import com.minipet.pet.Pet;

/**
 * A pet owner.
 */
public class Owner extends BaseEntity {
    private String firstName;
    private String lastName;
    private List<Pet> pets = new ArrayList<>();

    public String getFirstName() { return firstName; }

    public void setFirstName(String firstName) { this.firstName = firstName; }

    public String getLastName() { return lastName; }

    public List<Pet> getPets() { return pets; }

    public void addPet(Pet pet) {
        if (pet.isNew()) {
            pets.add(pet);
        }
        pet.setOwner(this);
    }
}
