package com.minipet.visit;

import java.time.LocalDate;
import com.minipet.pet.Pet;

public class Visit {
    private LocalDate date;
    private String description;
    private Pet pet;

    public Visit(Pet pet, String description) {
        this.pet = pet;
        this.description = description;
        this.date = LocalDate.now();
    }

    public Pet getPet() { return pet; }

    public String getDescription() { return description; }

    public String summary() {
        return date + " " + pet.describe() + ": " + description;
    }
}
