"""Compare exact differentials with central finite differences over a range of steps h.

    python3 scripts/fd_check.py [--trials 20] [--seed 0]
"""

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import fd_endpoint, fd_multiexp, relative_deviation  # noqa: E402

from carnot.catalog import CATALOG  # noqa: E402
from carnot.differential import dendpoint, dmultiexp  # noqa: E402
from carnot.endpoint import PiecewiseConstantControl  # noqa: E402
from carnot.lie_algebra import random_horizontal  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    steps = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7]
    print(f"{'algebra':<18}{'map':<10}" + "".join(f"h={h:<10.0e}" for h in steps))
    for name, entry in CATALOG.items():
        alg = entry.build()
        rng = random.Random(args.seed)
        worst = {("multiexp", h): 0.0 for h in steps} | {("endpoint", h): 0.0 for h in steps}
        for _ in range(args.trials):
            ys = [random_horizontal(alg, rng, bound=3, nonzero=False) for _ in range(rng.randint(1, 4))]
            x = random_horizontal(alg, rng, bound=3)
            control = PiecewiseConstantControl.uniform(alg, ys)
            exact_m, exact_e = dmultiexp(alg, ys), dendpoint(x, control)
            for h in steps:
                worst["multiexp", h] = max(worst["multiexp", h], relative_deviation(exact_m, fd_multiexp(alg, ys, h)))
                worst["endpoint", h] = max(worst["endpoint", h], relative_deviation(exact_e, fd_endpoint(alg, x, control, h)))
        for kind in ("multiexp", "endpoint"):
            print(f"{name:<18}{kind:<10}" + "".join(f"{worst[kind, h]:<12.1e}" for h in steps))


if __name__ == "__main__":
    main()
