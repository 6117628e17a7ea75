"""Regenerate the golden cocycle values for the u(1,1) basis (k = 1, c = 0)."""

import argparse
import json
from pathlib import Path

import numpy as np

from qkcmap.geometries import cask_domain, rigid_cmap
from qkcmap.hkqk import canonical_lift, cocycle, su_generators
from qkcmap.sampling import hk_points

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "cocycle_k1_c0.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    hk = rigid_cmap(cask_domain(1), 0.0)
    u, _ = su_generators(1)
    cands = [canonical_lift(A, hk) for A in u]
    rep = cocycle(cands, hk, hk_points(hk, args.points, np.random.default_rng(args.seed)))
    doc = {
        "k": 1,
        "c": 0.0,
        "basis": "iI, i(E11 - E00), E01 + E10, i(E01 - E10)",
        "A": (np.round(rep.A, 12) + 0.0).tolist(),
        "structure_constants": (np.round(rep.structure_constants, 12) + 0.0).tolist(),
        "max_spread": rep.max_spread,
    }
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {args.out} (max spread {rep.max_spread:.2e})")


if __name__ == "__main__":
    main()
