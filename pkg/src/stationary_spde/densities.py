"""
Spectral densities and source terms.

All densities are taken with respect to Lebesgue measure on frequency space
under the unitary Fourier convention

    F(phi)(xi) = (2 pi)^(-D/2) int exp(-i xi.x) phi(x) dx,

so a stationary field with spectral measure ``mu`` has covariance
``rho = F(mu)`` and variance ``(2 pi)^(-D/2) mu(R^D)`` when ``mu`` is finite.
White noise has the constant density ``(2 pi)^(-D/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Atom",
    "ConeComponent",
    "SpectralDensity",
    "SourceTerm",
    "DensityError",
    "white_density",
    "zero_density",
    "matern_density",
    "product_density",
    "unitary_factor",
]


class DensityError(ValueError):
    pass


def unitary_factor(total_dim: int) -> float:
    """``(2 pi)^(-D/2)``, the density of white noise on ``R^D``."""
    return (2.0 * math.pi) ** (-total_dim / 2.0)


@dataclass(frozen=True)
class Atom:
    location: tuple
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(v) for v in self.location))
        if not self.weight >= 0:
            raise DensityError("atom weights must be nonnegative")

    @property
    def is_origin(self) -> bool:
        return all(v == 0.0 for v in self.location)


@dataclass(frozen=True)
class ConeComponent:
    """Measure ``sqrt(2 pi) (delta_{c|xi|} + delta_{-c|xi|})(omega)/2 d mu_S(xi)``."""

    speed: float
    spatial: "SpectralDensity"

    def __post_init__(self):
        if not self.speed > 0:
            raise DensityError("cone speed must be positive")
        if self.spatial.has_time:
            raise DensityError("cone spatial base must be a spatial density")


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Spectral measure: absolutely continuous part plus optional singular parts.

    Parameters
    ----------
    func : callable
        ``func(xi, omega) -> ndarray`` of nonnegative reals (may be ``inf`` on
        singular points). ``omega`` is ``None`` for spatial densities.
    dim : int
        Spatial dimension ``d``.
    has_time : bool
        Density lives on ``R^d x R``.
    isotropic : bool
        Depends on ``xi`` only through ``|xi|``.
    atoms : tuple of Atom
        Point masses, stored as ``+-`` location pairs (origin stored once).
    cone : ConeComponent, optional
    singular_points : tuple of str
        Known singular locations of ``func``, e.g. ``("origin",)``.
    """

    func: Callable
    dim: int
    has_time: bool = False
    isotropic: bool = False
    atoms: tuple = ()
    cone: Optional[ConeComponent] = None
    slow_growth_hint: Optional[int] = None
    singular_points: tuple = ()
    name: str = "density"
    params: dict = field(default_factory=dict)
    is_zero: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise DensityError("density dimension must be >= 1")
        _check_atom_pairs(self.atoms, self.dim + int(self.has_time))
        if self.cone is not None and not self.has_time:
            raise DensityError("cone components live on space-time")
        if self.cone is not None and self.cone.spatial.dim != self.dim:
            raise DensityError("cone spatial base dimension mismatch")

    @property
    def total_dim(self) -> int:
        return self.dim + int(self.has_time)

    def __call__(self, xi, omega=None) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 0 or xi.shape[-1] != self.dim:
            raise DensityError(f"expected spatial frequencies with last axis {self.dim}, got {xi.shape}")
        if self.has_time:
            if omega is None:
                omega = np.zeros(xi.shape[:-1])
            omega = np.broadcast_to(np.asarray(omega, dtype=float), xi.shape[:-1])
            return np.asarray(self.func(xi, omega), dtype=float)
        return np.asarray(self.func(xi, None), dtype=float)

    def radial(self, r, omega=None) -> np.ndarray:
        """Evaluate an isotropic density along the first axis."""
        r = np.asarray(r, dtype=float)
        xi = np.zeros(r.shape + (self.dim,))
        xi[..., 0] = r
        return self(xi, omega)

    def with_singular(self, **changes) -> "SpectralDensity":
        from dataclasses import replace

        return replace(self, **changes)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "has_time": self.has_time,
            "isotropic": self.isotropic,
            "atoms": [{"location": list(a.location), "weight": a.weight} for a in self.atoms],
            "cone_speed": None if self.cone is None else self.cone.speed,
            "singular_points": list(self.singular_points),
            "params": {k: _jsonable(v) for k, v in self.params.items()},
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def _check_atom_pairs(atoms, total_dim: int) -> None:
    remaining = {}
    for a in atoms:
        if len(a.location) != total_dim:
            raise DensityError("atom location dimension mismatch")
        remaining[a.location] = remaining.get(a.location, 0.0) + a.weight
    for loc, w in remaining.items():
        if all(v == 0.0 for v in loc):
            continue
        mirror = tuple(-v for v in loc)
        if mirror not in remaining or not math.isclose(remaining[mirror], w, rel_tol=1e-12, abs_tol=0.0):
            raise DensityError(f"atom at {loc} lacks an equal-weight mirror at {mirror}")


def white_density(dim: int, has_time: bool = False) -> SpectralDensity:
    level = unitary_factor(dim + int(has_time))

    def f(xi, om):
        return np.full(np.shape(xi)[:-1], level)

    return SpectralDensity(f, dim, has_time, isotropic=True, slow_growth_hint=None,
                           name="white_noise", params={"level": level})


def zero_density(dim: int, has_time: bool = False) -> SpectralDensity:
    def f(xi, om):
        return np.zeros(np.shape(xi)[:-1])

    return SpectralDensity(f, dim, has_time, isotropic=True, slow_growth_hint=0, name="zero", is_zero=True)


def matern_density(dim: int, kappa: float, alpha: float, scale: float = 1.0) -> SpectralDensity:
    """``scale (2 pi)^(-d/2) (kappa^2 + |xi|^2)^(-alpha)``."""
    if not kappa > 0:
        raise DensityError("matern density needs kappa > 0")
    level = scale * unitary_factor(dim)

    def f(xi, om):
        return level * (kappa ** 2 + np.sum(xi * xi, axis=-1)) ** (-alpha)

    return SpectralDensity(f, dim, False, isotropic=True, name="matern",
                           params={"kappa": kappa, "alpha": alpha, "scale": scale})


def product_density(spatial: SpectralDensity, temporal: SpectralDensity) -> SpectralDensity:
    """Tensor product of a spatial density and a one-dimensional temporal density."""
    if spatial.has_time:
        raise DensityError("spatial factor must not have a temporal axis")
    if temporal.has_time or temporal.dim != 1:
        raise DensityError("temporal factor must be a one-dimensional density")
    fs, ft = spatial.func, temporal.func

    def f(xi, om):
        return fs(xi, None) * ft(np.asarray(om, dtype=float)[..., None], None)

    atoms = []
    for a in spatial.atoms:
        for b in temporal.atoms:
            atoms.append(Atom(a.location + b.location, a.weight * b.weight))
    return SpectralDensity(
        f, spatial.dim, True, isotropic=spatial.isotropic, atoms=tuple(atoms),
        name=f"{spatial.name} x {temporal.name}",
        singular_points=tuple(sorted(set(spatial.singular_points) & set(temporal.singular_points))),
        params={"spatial": spatial.name, "temporal": temporal.name},
        is_zero=spatial.is_zero or temporal.is_zero,
    )


@dataclass(frozen=True, eq=False)
class SourceTerm:
    kind: str
    density: SpectralDensity
    spatial: Optional[SpectralDensity] = None
    temporal: Optional[SpectralDensity] = None

    @property
    def dim(self) -> int:
        return self.density.dim

    @property
    def has_time(self) -> bool:
        return self.density.has_time

    def describe(self) -> dict:
        out = {"kind": self.kind, "density": self.density.name}
        if self.spatial is not None:
            out["spatial"] = self.spatial.describe()
        if self.temporal is not None:
            out["temporal"] = self.temporal.describe()
        return out
