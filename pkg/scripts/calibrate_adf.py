"""Monte Carlo calibration of the constant-only ADF critical values (lag 1).

Simulates driftless Gaussian random walks, computes the ADF t-statistic of
the lagged level in  dy_t = a + g*y_{t-1} + p*dy_{t-1} + e_t, and reports the
1/5/10% quantiles. The printed table is pasted into crisisgc.series.

    python scripts/calibrate_adf.py --reps 100000
"""

import argparse

import numpy as np


def adf_stats(y):
    dy = np.diff(y, axis=1)
    target = dy[:, 1:]
    rows = target.shape[1]
    X = np.stack([np.ones_like(target), y[:, 1:-1], dy[:, :-1]], axis=2)
    xtx = np.einsum("bri,brj->bij", X, X)
    xty = np.einsum("bri,br->bi", X, target)
    beta = np.linalg.solve(xtx, xty[..., None])[..., 0]
    resid = target - np.einsum("bri,bi->br", X, beta)
    s2 = np.einsum("br,br->b", resid, resid) / (rows - 3)
    cov_gg = s2 * np.linalg.inv(xtx)[:, 1, 1]
    return beta[:, 1] / np.sqrt(cov_gg)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--chunk", type=int, default=5_000)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--lengths", type=int, nargs="+", default=[250, 500, 1000])
    args = ap.parse_args()

    for n in args.lengths:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed, spawn_key=(n,))))
        stats = []
        done = 0
        while done < args.reps:
            b = min(args.chunk, args.reps - done)
            y = np.cumsum(rng.standard_normal((b, n)), axis=1)
            stats.append(adf_stats(y))
            done += b
        q = np.quantile(np.concatenate(stats), [0.01, 0.05, 0.10])
        print(f"    {n}: ({q[0]:.4f}, {q[1]:.4f}, {q[2]:.4f}),")


if __name__ == "__main__":
    main()
