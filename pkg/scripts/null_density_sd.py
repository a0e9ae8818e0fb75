"""Monte Carlo SD of the Granger verdict density under independence.

27 independent Gaussian series per 252-point window, 1000 windows. The SD is
the reference scale for the beta = 0 control in the acceptance suite.
"""

import argparse
import math

import numpy as np

from crisisgc.granger import GcConfig, causality_matrix
from crisisgc.numstat import RandomSource
from crisisgc.series import Ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--windows", type=int, default=1000)
    ap.add_argument("--members", type=int, default=27)
    ap.add_argument("--length", type=int, default=252)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=777)
    a = ap.parse_args()
    dates = np.datetime64("2000-01-03") + np.arange(a.length)
    ids = [f"S{k:02d}" for k in range(a.members)]
    cfg = GcConfig(alpha=a.alpha)
    dens = []
    for k in range(a.windows):
        z = RandomSource(a.seed, k).standard_normal((a.members, a.length))
        dens.append(causality_matrix(Ensemble.from_matrix(ids, dates, z), cfg).density())
    dens = np.array(dens)
    pairs = a.members * (a.members - 1)
    print(f"mean density {dens.mean():.5f}")
    print(f"sd {dens.std(ddof=1):.5f}  binomial sd {math.sqrt(a.alpha * (1 - a.alpha) / pairs):.5f}")


if __name__ == "__main__":
    main()
