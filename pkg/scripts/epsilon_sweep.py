"""Sweep epsilon on the synthetic suite and compare median test d2h to the small effect."""
import argparse

import numpy as np

from dodge.harness import Treatment, run_treatment
from dodge.metrics import Goal
from dodge.space import Task
from dodge.stats import small_effect
from dodge.synthetic import suite_splits


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilons", default="0.05,0.1,0.2")
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--seeds", type=int, default=25)
    args = ap.parse_args()
    epsilons = [float(e) for e in args.epsilons.split(",")]
    splits = suite_splits()
    scores = {e: {} for e in epsilons}
    for e in epsilons:
        for name, split in splits.items():
            scores[e][name] = [run_treatment(Treatment("DODGE", epsilon=e, n=args.n), split, Task.DEFECT,
                                             Goal.D2H, s).test_score for s in range(args.seeds)]
    print("dataset  " + "".join(f"e={e:<8g}" for e in epsilons))
    for name in splits:
        print(f"{name:9s}" + "".join(f"{np.median(scores[e][name]):<10.4f}" for e in epsilons))
    pooled = [v for e in epsilons for vs in scores[e].values() for v in vs]
    meds = [np.median([v for vs in scores[e].values() for v in vs]) for e in epsilons]
    print(f"suite    " + "".join(f"{m:<10.4f}" for m in meds))
    print(f"spread of medians {max(meds) - min(meds):.4f}, small effect {small_effect(pooled):.4f}")


if __name__ == "__main__":
    main()
