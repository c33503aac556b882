"""Margins of no-embedding certificates for random contraction pairs.

Writes one CSV row per pair: dimension, margin, the dilation-level value
and the norm recomputed on the original pair.  Margins shrink with the
dimension (more eigenphases to dodge) but never reach zero.
"""
import argparse
import csv
import sys

import numpy as np

from l1ops import no_embedding_certificate


def contraction(rng, k):
    m = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    return m / np.linalg.norm(m, 2) * rng.uniform(0.05, 1.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--max-dim", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout)
    w.writerow(["dim", "margin", "achieved", "recomputed_norm", "bound_cos_pi_over_4k"])
    for _ in range(args.pairs):
        k = int(rng.integers(1, args.max_dim + 1))
        c = no_embedding_certificate(contraction(rng, k), contraction(rng, k))
        # 2k eigenphases leave a gap of at least 2 pi / 2k
        w.writerow([k, c.margin, c.witness.achieved, c.recomputed_norm, np.cos(np.pi / (4 * k))])


if __name__ == "__main__":
    main()
