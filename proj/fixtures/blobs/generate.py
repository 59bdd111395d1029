"""Three Gaussian blobs of 20 points each (sigma 0.1) in the plane."""

import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent
CENTERS = [(0.0, 0.0), (5.0, 0.0), (0.0, 5.0)]
PER_BLOB = 20
SIGMA = 0.1


def main():
    rng = np.random.default_rng(20240601)
    rows, truth = [], {}
    for b, c in enumerate(CENTERS):
        pts = rng.normal(loc=c, scale=SIGMA, size=(PER_BLOB, 2))
        truth[f"s{b}"] = list(range(len(rows), len(rows) + PER_BLOB))
        rows.extend(pts.tolist())
    with open(ROOT / "blobs.emb.csv", "w") as f:
        f.write("# monoembed-emb-v1 app=blobs provider=fixture\n")
        f.write("class_id,d0,d1\n")
        for i, (x, y) in enumerate(rows):
            f.write(f"{i},{x!r},{y!r}\n")
    doc = {"app": "blobs", "algorithm": "ground-truth", "k": 3, "services": truth, "converged": True, "seed": 0}
    (ROOT / "truth.json").write_text(json.dumps(doc) + "\n")


if __name__ == "__main__":
    main()
