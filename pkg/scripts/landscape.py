"""Tabulate the condition landscape over the catalog.

For every catalog algebra: Metivier status (step 2), then a classification
of each horizontal basis direction and of a few seeded random directions.
Abnormal directions in step >= 3 can optionally be probed.

    python3 scripts/landscape.py [--random 3] [--seed 0] [--probe] [--json out.json]
"""

import argparse
import json
import time

from carnot.catalog import CATALOG
from carnot.conditions import classify, is_metivier, sample_vectors
from carnot.lie_algebra import format_vector
from carnot.probe import ProbeConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--random", type=int, default=3, help="random directions per algebra")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--probe", action="store_true")
    ap.add_argument("--json", help="also write rows to this file")
    args = ap.parse_args()

    probe = ProbeConfig(p=2, samples=1500, restarts=1, seed=args.seed) if args.probe else None
    rows = []
    header = f"{'algebra':<18} {'X':<22} {'reg':<6} {'sbh p':<6} {'H':<15} {'P/SP/SH':<12}"
    print(header)
    print("-" * len(header))
    for name, entry in CATALOG.items():
        alg = entry.build()
        if alg.step == 2:
            met = is_metivier(alg)
            print(f"{name:<18} metivier={met.verdict} ({met.method})")
        xs = [alg.basis_vector(j) for j in range(alg.horizontal_dim)]
        xs += sample_vectors(alg, args.random, args.seed)
        for x in xs:
            t0 = time.perf_counter()
            rep = classify(alg, x, probe)
            h = rep.h.status + (f" {rep.h.score:.2f}" if rep.h.score is not None else "")
            p = rep.sbh.witness_p if rep.sbh.holds else "-"
            label = format_vector(x[: alg.horizontal_dim])
            print(f"{name:<18} {label:<22} {str(rep.reg):<6} {str(p):<6} {h:<15} {rep.implied['P'].status:<12}")
            rows.append({"name": name, **rep.to_dict(), "seconds": time.perf_counter() - t0})

    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
