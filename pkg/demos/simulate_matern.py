"""Simulate a Matern field, then compare empirical and exact covariances.

Run: python demos/simulate_matern.py [n_realizations]
"""

import sys

import numpy as np

from stationary_spde.covariance import matern_covariance
from stationary_spde.densities import matern_density
from stationary_spde.simulate import GridSpec, empirical_covariance, grid_variance, simulate, truncation_bound


def main(n_realizations: int = 200):
    dens = matern_density(2, 1.0, 2.0)
    grid = GridSpec((64, 64), (0.25, 0.25))
    reals = simulate(dens, grid, seed=0, n_realizations=n_realizations)
    emp = empirical_covariance(reals, (8, 0))
    exact = matern_covariance(np.abs(emp.axes[0]), 2, 1.0, 2.0)
    print(f"grid variance {grid_variance(dens, grid):.6f}, exact {exact[8]:.6f}, "
          f"truncation bound {truncation_bound(dens, grid):.2e}")
    print(f"{'lag':>6} {'empirical':>11} {'exact':>11} {'z':>7}")
    for i in range(8, 17):
        z = (emp.values[i, 0] - exact[i]) / emp.stderr[i, 0]
        print(f"{emp.axes[0][i]:>6.2f} {emp.values[i, 0]:>11.6f} {exact[i]:>11.6f} {z:>7.2f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
