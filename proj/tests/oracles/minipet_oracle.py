#!/usr/bin/env python3
"""Hand-traced oracle for the minipet fixture.

Every table below was written by reading the Java sources by hand; nothing
here is produced by the C++ implementation. Running the script regenerates
the golden files under fixtures/minipet/golden/.
"""
import itertools
import json
import math
import os
import sys

# id -> fqn, ordered by fqn
CLASSES = [
    "com.minipet.owner.BaseEntity",
    "com.minipet.owner.Owner",
    "com.minipet.owner.OwnerRepository",
    "com.minipet.owner.OwnerService",
    "com.minipet.pet.Pet",
    "com.minipet.pet.PetRepository",
    "com.minipet.pet.PetService",
    "com.minipet.pet.PetType",
    "com.minipet.visit.Visit",
    "com.minipet.visit.VisitController",
    "com.minipet.visit.VisitRepository",
    "com.minipet.visit.VisitService",
]

# Invocations traced per class: (src, dst) -> count.
CALLS = {
    (1, 0): 1,   # Owner.addPet: pet.isNew() declared in BaseEntity
    (1, 4): 1,   # Owner.addPet: pet.setOwner(this)
    (3, 1): 1,   # OwnerService.registerPet: owner.addPet
    (3, 2): 3,   # owners.findById x2, owners.save
    (3, 6): 1,   # petService.createPet
    (4, 7): 1,   # Pet.describe: type.getLabel()
    (6, 4): 3,   # new Pet(), pet.setName, pet.setType
    (6, 5): 2,   # pets.save, pets.findById
    (6, 7): 1,   # PetType.fromName
    (8, 4): 1,   # Visit.summary: pet.describe()
    (9, 1): 1,   # owner.getLastName()
    (9, 3): 1,   # ownerService.findOwner
    (9, 8): 2,   # visit.summary(), Summary.render: visit.getDescription()
    (9, 11): 2,  # visitService.history, visitService.scheduleVisit
    (11, 6): 1,  # petService.findPet
    (11, 8): 1,  # new Visit(...)
    (11, 10): 2, # visits.save, visits.findByPetId
}

# Non-call interaction contributions: inheritance + field/param/local type references.
REFS = {
    (1, 0): 1,   # extends BaseEntity
    (1, 4): 2,   # field List<Pet>, param Pet
    (2, 1): 1,   # save(Owner)
    (3, 1): 1,   # local Owner
    (3, 2): 2,   # field, ctor param
    (3, 4): 1,   # local Pet
    (3, 6): 2,   # field, ctor param
    (4, 0): 1,   # extends BaseEntity
    (4, 1): 2,   # field Owner, param Owner
    (4, 7): 2,   # field PetType, param PetType
    (5, 4): 1,   # save(Pet)
    (6, 4): 1,   # local Pet
    (6, 5): 2,   # field, ctor param
    (8, 4): 2,   # field Pet, ctor param Pet
    (9, 1): 1,   # local Owner
    (9, 3): 2,   # field, ctor param
    (9, 8): 4,   # for-each local, local in book, Summary field, Summary ctor param
    (9, 11): 2,  # field, ctor param
    (10, 8): 1,  # save(Visit)
    (11, 4): 1,  # local Pet
    (11, 6): 2,  # field, ctor param
    (11, 8): 1,  # local Visit
    (11, 10): 2, # field, ctor param
}

# (name, params, return, visibility, hand-split name tokens)
METHODS = {
    0: [("getId", [], "Integer", "public", {"get", "id"}),
        ("setId", ["Integer"], "void", "public", {"set", "id"}),
        ("isNew", [], "boolean", "public", set())],
    1: [("getFirstName", [], "String", "public", {"get", "first", "name"}),
        ("setFirstName", ["String"], "void", "public", {"set", "first", "name"}),
        ("getLastName", [], "String", "public", {"get", "last", "name"}),
        ("getPets", [], "List<Pet>", "public", {"get", "pets"}),
        ("addPet", ["Pet"], "void", "public", {"add", "pet"})],
    2: [("findById", ["Integer"], "Owner", "public", {"find", "id"}),
        ("findByLastName", ["String"], "List<Owner>", "public", {"find", "last", "name"}),
        ("save", ["Owner"], "void", "public", {"save"})],
    3: [("OwnerService", ["OwnerRepository", "PetService"], "OwnerService", "public", None),
        ("findOwner", ["Integer"], "Owner", "public", {"find", "owner"}),
        ("registerPet", ["Integer", "String", "String"], "Owner", "public", {"register", "pet"})],
    4: [("getName", [], "String", "public", {"get", "name"}),
        ("setName", ["String"], "void", "public", {"set", "name"}),
        ("getType", [], "PetType", "public", {"get", "type"}),
        ("setType", ["PetType"], "void", "public", {"set", "type"}),
        ("setOwner", ["Owner"], "void", "public", {"set", "owner"}),
        ("describe", [], "String", "public", {"describe"})],
    5: [("findById", ["Integer"], "Pet", "public", {"find", "id"}),
        ("findPetTypes", [], "List<PetType>", "public", {"find", "pet", "types"}),
        ("save", ["Pet"], "void", "public", {"save"})],
    6: [("PetService", ["PetRepository"], "PetService", "public", None),
        ("createPet", ["String", "String"], "Pet", "public", {"create", "pet"}),
        ("findPet", ["Integer"], "Pet", "public", {"find", "pet"})],
    7: [("PetType", ["String"], "PetType", "package", None),
        ("getLabel", [], "String", "public", {"get", "label"}),
        ("fromName", ["String"], "PetType", "public", {"name"})],
    8: [("Visit", ["Pet", "String"], "Visit", "public", None),
        ("getPet", [], "Pet", "public", {"get", "pet"}),
        ("getDescription", [], "String", "public", {"get", "description"}),
        ("summary", [], "String", "public", {"summary"})],
    9: [("VisitController", ["VisitService", "OwnerService"], "VisitController", "public", None),
        ("showOwnerVisits", ["Integer", "Integer"], "String", "public", {"show", "owner", "visits"}),
        ("book", ["Integer", "String"], "String", "public", {"book"}),
        ("Summary", ["Visit"], "Summary", "package", None),
        ("render", [], "String", "package", {"render"})],
    10: [("findByPetId", ["Integer"], "List<Visit>", "public", {"find", "pet", "id"}),
         ("save", ["Visit"], "void", "public", {"save"})],
    11: [("VisitService", ["VisitRepository", "PetService"], "VisitService", "public", None),
         ("scheduleVisit", ["Integer", "String"], "Visit", "public", {"schedule", "visit"}),
         ("history", ["Integer"], "List<Visit>", "public", {"history"})],
}

SPLIT3 = [[0, 1, 2, 3, 9], [4, 5, 6, 7], [8, 10, 11]]

TRACES = {
    "register-pet": {3, 1, 2, 6, 4, 5, 7},
    "book-visit": {9, 11, 8, 10, 6, 4},
    "owner-visits": {9, 3, 2, 1, 11, 10, 8, 4},
}


def jaccard(a, b):
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def public_ops(service):
    out = []
    for cid in service:
        for name, params, ret, vis, toks in METHODS[cid]:
            if vis == "public" and name != ret:
                out.append((set(params), {ret}, toks))
    return out


def cohesion(services, sim):
    vals = []
    for s in services:
        ops = public_ops(s)
        if len(ops) < 2:
            vals.append(1.0)
            continue
        pairs = list(itertools.combinations(ops, 2))
        vals.append(sum(sim(a, b) for a, b in pairs) / len(pairs))
    return sum(vals) / len(vals)


def chm(services):
    return cohesion(services, lambda a, b: 0.5 * (jaccard(a[0], b[0]) + jaccard(a[1], b[1])))


def chd(services):
    return cohesion(services, lambda a, b: jaccard(a[2], b[2]))


def icp(services):
    owner = {c: k for k, s in enumerate(services) for c in s}
    total = sum(CALLS.values())
    cross = sum(w for (s, d), w in CALLS.items() if owner[s] != owner[d])
    return cross / total if total else 0.0


def bcp(services):
    ents = []
    for s in services:
        counts = [len(set(s) & cls) for cls in TRACES.values()]
        tot = sum(counts)
        if tot == 0:
            ents.append(0.0)
            continue
        ents.append(-sum((c / tot) * math.log(c / tot) for c in counts if c > 0))
    return sum(ents) / len(ents)


def ned(services, n, lo=5, hi=20):
    return 1.0 - sum(len(s) for s in services if lo <= len(s) <= hi) / n


def cov(services, n):
    return len({c for s in services for c in s}) / n


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "..", "fixtures", "minipet", "golden")
    os.makedirs(out_dir, exist_ok=True)
    n = len(CLASSES)
    inter = dict(CALLS)
    for k, w in REFS.items():
        inter[k] = inter.get(k, 0) + w
    edges = lambda d: [{"src": s, "dst": t, "w": w} for (s, t), w in sorted(d.items())]
    with open(os.path.join(out_dir, "graphs.json"), "w") as f:
        json.dump({"classes": CLASSES, "calls": edges(CALLS), "interactions": edges(inter)}, f, indent=1)
        f.write("\n")
    methods = {CLASSES[c]: [{"name": m[0], "params": m[1], "ret": m[2], "vis": m[3]} for m in ms]
               for c, ms in METHODS.items()}
    with open(os.path.join(out_dir, "methods.json"), "w") as f:
        json.dump(methods, f, indent=1)
        f.write("\n")
    metrics = {
        "split": SPLIT3,
        "chm": chm(SPLIT3), "chd": chd(SPLIT3), "icp": icp(SPLIT3),
        "bcp": bcp(SPLIT3), "ned": ned(SPLIT3, n), "cov": cov(SPLIT3, n),
    }
    with open(os.path.join(out_dir, "metrics_split3.json"), "w") as f:
        json.dump(metrics, f, indent=1)
        f.write("\n")
    print(json.dumps(metrics, indent=1))


if __name__ == "__main__":
    main()
