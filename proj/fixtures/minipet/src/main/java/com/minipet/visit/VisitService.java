package com.minipet.visit;

import java.util.List;
import com.minipet.pet.Pet;
import com.minipet.pet.PetService;

public class VisitService {
    private final VisitRepository visits;
    private final PetService petService;

    public VisitService(VisitRepository visits, PetService petService) {
        this.visits = visits;
        this.petService = petService;
    }

    public Visit scheduleVisit(Integer petId, String description) {
        Pet pet = petService.findPet(petId);
        Visit visit = new Visit(pet, description);
        visits.save(visit);
        return visit;
    }

    public List<Visit> history(Integer petId) {
        return visits.findByPetId(petId);
    }
}
