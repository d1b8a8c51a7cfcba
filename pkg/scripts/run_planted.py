"""Planted-partition recovery over a range of seeds."""

import argparse
import statistics

from flowcomm.alpha import EmptyAlphaSet, detect_alphas
from flowcomm.bench import PlantedPartitionConfig, generate_planted
from flowcomm.metrics import Clustering, SamplingConfig, sample_pair_rates
from flowcomm.propagate import PropagationConfig, propagate_labels


def smallest_k(g, want):
    for step in range(1, 1001):
        try:
            if len(detect_alphas(g, step / 10)) >= want:
                return step / 10
        except EmptyAlphaSet:
            pass
    raise SystemExit("no k gives enough alphas")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--communities", type=int, default=2)
    parser.add_argument("--size", type=int, default=30)
    parser.add_argument("--p-in", type=float, default=0.3)
    parser.add_argument("--p-out", type=float, default=0.01)
    args = parser.parse_args()

    fps, fns = [], []
    print("seed\tk\talphas\tseparated\tfp_rate\tfn_rate")
    for seed in range(args.seeds):
        cfg = PlantedPartitionConfig(args.communities, args.size, args.p_in, args.p_out, seed=seed)
        g, truth = generate_planted(cfg)
        k = smallest_k(g, args.communities)
        alphas = detect_alphas(g, k)
        labeling = propagate_labels(g, alphas, PropagationConfig(seed=seed))
        report = sample_pair_rates(Clustering.from_labeling(labeling, g), truth, SamplingConfig(seed=seed))
        separated = len({a // args.size for a in alphas}) == len(alphas)
        fps.append(report.fp_rate)
        fns.append(report.fn_rate)
        print(f"{seed}\t{k}\t{','.join(map(str, alphas))}\t{int(separated)}\t{report.fp_rate:.4f}\t{report.fn_rate:.4f}")
    print(f"# median fp {statistics.median(fps):.4f}, median fn {statistics.median(fns):.4f}")


if __name__ == "__main__":
    main()
