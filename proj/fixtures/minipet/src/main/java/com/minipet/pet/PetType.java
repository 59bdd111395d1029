package com.minipet.pet;

public enum PetType {
    CAT("cat"),
    DOG("dog"),
    BIRD("bird");

    private final String label;

    PetType(String label) {
        this.label = label;
    }

    public String getLabel() {
        return label;
    }

    public static PetType fromName(String name) {
        for (PetType t : values()) {
            if (t.label.equalsIgnoreCase(name)) {
                return t;
            }
        }
        throw new IllegalArgumentException("unknown pet type " + name);
    }
}
