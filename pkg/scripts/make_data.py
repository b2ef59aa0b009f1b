"""Write the bundled CSV data: the poi stand-in versions and the synthetic suite."""
import argparse
from pathlib import Path

from dodge.synthetic import write_poi_standin, write_suite

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "data")
    ap.add_argument("--suite", action="store_true", help="also write data/synthetic/<name>/v1.csv, v2.csv")
    args = ap.parse_args()
    print("poi stand-in ->", write_poi_standin(args.out / "poi"))
    if args.suite:
        print("synthetic suite ->", write_suite(args.out / "synthetic"))


if __name__ == "__main__":
    main()
