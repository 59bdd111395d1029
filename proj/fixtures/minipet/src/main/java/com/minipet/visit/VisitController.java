package com.minipet.visit;

import java.util.ArrayList;
import java.util.List;
import com.minipet.owner.Owner;
import com.minipet.owner.OwnerService;

public class VisitController {
    private final VisitService visitService;
    private final OwnerService ownerService;

    public VisitController(VisitService visitService, OwnerService ownerService) {
        this.visitService = visitService;
        this.ownerService = ownerService;
    }

    public String showOwnerVisits(Integer ownerId, Integer petId) {
        Owner owner = ownerService.findOwner(ownerId);
        List<String> lines = new ArrayList<>();
        lines.add("Owner: " + owner.getLastName());
        for (Visit visit : visitService.history(petId)) {
            lines.add(visit.summary());
        }
        return String.join("\n", lines);
    }

    public String book(Integer petId, String reason) {
        Visit visit = visitService.scheduleVisit(petId, reason);
        return new Summary(visit).render();
    }

    private static class Summary {
        private final Visit visit;

        Summary(Visit visit) {
            this.visit = visit;
        }

        String render() {
            return "booked: " + visit.getDescription();
        }
    }
}
