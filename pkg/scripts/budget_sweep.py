"""Best-train and test d2h of DODGE as the evaluation budget N grows."""
import argparse

import numpy as np

from dodge.harness import Treatment, run_treatment
from dodge.metrics import Goal
from dodge.space import Task
from dodge.stats import small_effect
from dodge.synthetic import suite_splits


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budgets", default="30,100,1000")
    ap.add_argument("--epsilon", type=float, default=0.2)
    ap.add_argument("--seeds", type=int, default=25)
    args = ap.parse_args()
    budgets = [int(n) for n in args.budgets.split(",")]
    splits = suite_splits()
    train, test = {}, {}
    for n in budgets:
        outs = [run_treatment(Treatment("DODGE", epsilon=args.epsilon, n=n), split, Task.DEFECT, Goal.D2H, s)
                for split in splits.values() for s in range(args.seeds)]
        train[n] = [o.train_score for o in outs]
        test[n] = [o.test_score for o in outs]
        print(f"N={n:<5d} median train d2h {np.median(train[n]):.4f}   median test d2h {np.median(test[n]):.4f}",
              flush=True)
    print(f"small effect (train) {small_effect([v for vs in train.values() for v in vs]):.4f}, "
          f"(test) {small_effect([v for vs in test.values() for v in vs]):.4f}")


if __name__ == "__main__":
    main()
