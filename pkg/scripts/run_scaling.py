"""Time ingestion plus detection on doubling BA graphs."""

import argparse
import sys

from flowcomm.bench import PipelineConfig, time_scaling, write_timings


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--start", type=float, default=1e5)
    parser.add_argument("--doublings", type=int, default=4)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--m", type=int, default=5)
    args = parser.parse_args()

    sizes = [int(args.start) * 2**i for i in range(args.doublings + 1)]
    rows = time_scaling(sizes, PipelineConfig(m=args.m, repeats=args.repeats))
    write_timings(rows, sys.stdout)
    for (e1, t1), (e2, t2) in zip(rows, rows[1:]):
        print(f"# {e1} -> {e2}: ratio {t2 / t1:.2f}")


if __name__ == "__main__":
    main()
