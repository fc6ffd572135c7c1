"""Existence, uniqueness and function-valuedness across the model catalog.

Run: python demos/existence_catalog.py
"""

from stationary_spde.analysis import check_existence, check_uniqueness
from stationary_spde.models import build_model

CATALOG = [
    ("matern", 2, {"kappa": 1.0, "alpha": 2.0}),
    ("matern", 2, {"kappa": 1.0, "alpha": 0.8}),
    ("matern_no_range", 3, {"alpha": 1.0}),
    ("matern_no_range", 3, {"alpha": 2.0}),
    ("heat", 2, {"a": 1.0}),
    ("heat", 3, {"a": 1.0}),
    ("wave", 2, {"c": 1.0}),
    ("stein", 2, dict(a=1, b=1, s=1, kappa=1, alpha=1, beta=1, nu=1.4)),
    ("stein", 2, dict(a=1, b=1, s=1, kappa=1, alpha=1, beta=1, nu=1.6)),
    ("evolving_matern", 2, dict(beta=1.5, a=1.0, kappa=1.0, alpha=2.0)),
    ("advection_diffusion", 2, {"kappa": 1.0, "v": [1.0, 0.0]}),
]


def main():
    print(f"{'model':<22} {'d':>2} {'exists':>7} {'unique':>7} {'finite':>7}  verdict")
    for name, d, params in CATALOG:
        m = build_model(name, d, params)
        rep = check_existence(m)
        uniq = check_uniqueness(m).unique
        print(f"{name:<22} {d:>2} {str(rep.exists):>7} {str(uniq):>7} {str(rep.finite):>7}  {rep.verdict}")


if __name__ == "__main__":
    main()
