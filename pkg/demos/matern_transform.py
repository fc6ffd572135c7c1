"""Radial transform of the Matern density against the Bessel-K closed form.

Run: python demos/matern_transform.py
"""

import numpy as np

from stationary_spde.covariance import hankel_transform, matern_covariance
from stationary_spde.densities import matern_density


def main():
    print(f"{'d':>2} {'alpha':>6} {'kappa':>6} {'max rel err':>12}")
    for d in (1, 2, 3):
        for alpha in (d / 2 + 0.5, d / 2 + 1, d / 2 + 2):
            for kappa in (0.5, 1.0, 2.0):
                lags = np.linspace(0.2 / kappa, 10 / kappa, 50)
                got = hankel_transform(matern_density(d, kappa, alpha), d, lags)
                ref = matern_covariance(lags, d, kappa, alpha)
                print(f"{d:>2} {alpha:>6.2f} {kappa:>6.2f} {np.max(np.abs(got / ref - 1)):>12.2e}")


if __name__ == "__main__":
    main()
