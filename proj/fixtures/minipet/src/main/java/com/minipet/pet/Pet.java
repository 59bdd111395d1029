package com.minipet.pet;

import java.time.LocalDate;
import com.minipet.owner.BaseEntity;
import com.minipet.owner.Owner;

public class Pet extends BaseEntity {
    private String name;
    private LocalDate birthDate;
    private PetType type;
    private Owner owner;

    public String getName() { return name; }

    public void setName(String name) { this.name = name; }

    public PetType getType() { return type; }

    public void setType(PetType type) { this.type = type; }

    public void setOwner(Owner owner) { this.owner = owner; }

    public String describe() {
        return name + " (" + type.getLabel() + ")";
    }
}
