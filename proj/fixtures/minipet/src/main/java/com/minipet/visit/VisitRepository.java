package com.minipet.visit;

import java.util.List;

public interface VisitRepository {
    List<Visit> findByPetId(Integer petId);

    void save(Visit visit);
}
