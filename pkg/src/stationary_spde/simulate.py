"""
Spectral simulation of stationary Gaussian fields on regular grids.

A realization on a grid with ``n_i`` points of spacing ``Delta_i`` per axis is

    U(x) = sum_k Z_k exp(i xi_k . x),    xi_k = 2 pi k / (n Delta),

with Hermitian-paired complex Gaussian weights of variance
``(2 pi)^(-D/2) f(xi_k) prod_i (2 pi / (n_i Delta_i))``, so that the grid
covariance is the box-truncated Riemann sum of the spectral integral.
Randomness comes from Philox streams keyed by ``(seed, realization)``, with
the draw for each frequency cell fixed by its position in the stream. Output
is therefore independent of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .covariance import CovarianceError, CovarianceGrid
from .densities import SpectralDensity, unitary_factor

__all__ = [
    "SimulationError",
    "SingularityError",
    "NoSolutionError",
    "GridSpec",
    "Realization",
    "CompareReport",
    "simulate",
    "simulate_model",
    "frequency_weights",
    "grid_variance",
    "truncation_bound",
    "empirical_covariance",
    "periodogram",
    "compare",
]

# Philox counter words separating the independent streams of one realization.
_STREAM_CONTINUOUS = 0
_STREAM_ATOMS = 1
_STREAM_CONE = 2


class SimulationError(ValueError):
    pass


class SingularityError(SimulationError):
    pass


class NoSolutionError(SimulationError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Regular grid; for space-time fields the last axis is time."""

    sizes: tuple
    spacings: tuple
    origin: Optional[tuple] = None

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        spacings = tuple(float(s) for s in self.spacings)
        if len(sizes) != len(spacings) or not sizes:
            raise SimulationError("grid needs one spacing per axis")
        if any(n < 2 for n in sizes):
            raise SimulationError("grid sizes must be >= 2")
        if any(not s > 0 for s in spacings):
            raise SimulationError("grid spacings must be positive")
        origin = (0.0,) * len(sizes) if self.origin is None else tuple(float(o) for o in self.origin)
        if len(origin) != len(sizes):
            raise SimulationError("origin dimension mismatch")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "origin", origin)

    @property
    def ndim(self) -> int:
        return len(self.sizes)

    def frequency_axes(self) -> list:
        """Angular frequencies per axis in FFT order, covering ``[-pi/Delta, pi/Delta)``."""
        return [2 * math.pi * np.fft.fftfreq(n, s) for n, s in zip(self.sizes, self.spacings)]

    def frequency_cell(self) -> float:
        return float(np.prod([2 * math.pi / (n * s) for n, s in zip(self.sizes, self.spacings)]))

    def coordinates(self) -> list:
        return [o + s * np.arange(n) for n, s, o in zip(self.sizes, self.spacings, self.origin)]


@dataclass
class Realization:
    grid: GridSpec
    values: np.ndarray
    seed: int
    index: int
    model: dict = field(default_factory=dict)


def _generator(seed: int, index: int, stream: int) -> np.random.Generator:
    key = np.array([seed % 2 ** 64, index % 2 ** 64], dtype=np.uint64)
    counter = np.array([0, 0, stream, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _mirror(arr: np.ndarray) -> np.ndarray:
    """``arr[-k]`` in FFT index order along every axis."""
    out = arr
    for ax in range(arr.ndim):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def _frequency_mesh(axes: Sequence[np.ndarray], dim: int, has_time: bool):
    mesh = np.meshgrid(*axes, indexing="ij")
    xi = np.stack(mesh[:dim], axis=-1)
    om = mesh[dim] if has_time else None
    return xi, om


def frequency_weights(density: SpectralDensity, grid: GridSpec, spatial_only: bool = False) -> np.ndarray:
    """Per-cell variances ``(2 pi)^(-D/2) f(xi_k) prod(Delta xi)`` in FFT order.

    Cells where the density is infinite are zeroed if the density declares the
    origin singular and the cell is the origin; any other infinite cell raises
    ``SingularityError``.
    """
    has_time = density.has_time and not spatial_only
    axes = grid.frequency_axes()
    if len(axes) != density.dim + int(has_time):
        raise SimulationError(f"grid has {grid.ndim} axes, density needs {density.dim + int(has_time)}")
    xi, om = _frequency_mesh(axes, density.dim, has_time)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.asarray(density.func(xi, om), dtype=float)
    f = np.broadcast_to(f, xi.shape[:-1]).copy()
    bad = ~np.isfinite(f)
    if bad.any():
        origin = (0,) * f.ndim
        if "origin" in density.singular_points and bad[origin]:
            # minimal solution: no random-constant component unless an atom is given
            f[origin] = 0.0
            bad[origin] = False
        if bad.any():
            where = tuple(int(i[0]) for i in np.nonzero(bad))
            raise SingularityError(f"density is infinite on grid frequency cell {where}")
    if (f < 0).any():
        raise SimulationError("density must be nonnegative")
    w = unitary_factor(len(axes)) * f * grid.frequency_cell()
    return 0.5 * (w + _mirror(w))


def grid_variance(density: SpectralDensity, grid: GridSpec) -> float:
    """Exact pointwise variance of the simulated continuous part."""
    return float(np.sum(frequency_weights(density, grid)))


def _hermitian_weights(rng: np.random.Generator, w: np.ndarray) -> np.ndarray:
    """Complex weights with ``E|Z_k|^2 = w_k`` and ``Z_{-k} = conj(Z_k)``."""
    normals = rng.standard_normal((2,) + w.shape)
    g = (normals[0] + 1j * normals[1]) / math.sqrt(2.0)
    return np.sqrt(w) * (g + np.conj(_mirror(g))) / math.sqrt(2.0)


def _synthesize(z: np.ndarray) -> np.ndarray:
    field_c = np.fft.ifftn(z) * z.size
    return field_c


def _check_real(field_c: np.ndarray) -> np.ndarray:
    re = field_c.real
    sd = float(np.std(re))
    resid = float(np.max(np.abs(field_c.imag))) if field_c.size else 0.0
    if resid > 1e-10 * max(sd, 1e-300) and resid > 1e-300:
        raise SimulationError(f"imaginary residual {resid:.3e} exceeds tolerance")
    return np.ascontiguousarray(re)


def _atom_field(density: SpectralDensity, grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
    coords = np.meshgrid(*grid.coordinates(), indexing="ij")
    pts = np.stack(coords, axis=-1)
    level = unitary_factor(density.total_dim)
    out = np.zeros(grid.sizes)
    seen = set()
    for atom in density.atoms:
        loc = atom.location
        if loc in seen:
            continue
        mirror = tuple(-v for v in loc)
        seen.add(loc)
        seen.add(mirror)
        if atom.is_origin:
            out += math.sqrt(level * atom.weight) * rng.standard_normal()
            continue
        # pair weight w at +-lambda gives covariance 2 w level cos(lambda . h)
        phase = pts @ np.asarray(loc)
        a, b = rng.standard_normal(2)
        out += math.sqrt(2 * level * atom.weight) * (a * np.cos(phase) + b * np.sin(phase))
    return out


def _cone_field(density: SpectralDensity, grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
    cone = density.cone
    spatial = GridSpec(grid.sizes[:-1], grid.spacings[:-1], grid.origin[:-1])
    w = frequency_weights(cone.spatial, spatial)
    zc = _hermitian_weights(rng, w)
    zs = _hermitian_weights(rng, w)
    xi, _ = _frequency_mesh(spatial.frequency_axes(), density.dim, False)
    speed = cone.speed * np.linalg.norm(xi, axis=-1)
    times = grid.coordinates()[-1]
    out = np.empty(grid.sizes)
    for j, t in enumerate(times):
        out[..., j] = _check_real(_synthesize(zc * np.cos(speed * t) + zs * np.sin(speed * t)))
    return out


def _one(density: SpectralDensity, grid: GridSpec, w: Optional[np.ndarray], seed: int, index: int) -> np.ndarray:
    values = np.zeros(grid.sizes)
    if w is not None:
        z = _hermitian_weights(_generator(seed, index, _STREAM_CONTINUOUS), w)
        values += _check_real(_synthesize(z))
    if density.atoms:
        values += _atom_field(density, grid, _generator(seed, index, _STREAM_ATOMS))
    if density.cone is not None:
        values += _cone_field(density, grid, _generator(seed, index, _STREAM_CONE))
    return values


def simulate(density: SpectralDensity, grid: GridSpec, seed: int = 0, n_realizations: int = 1,
             workers: int = 1, model: Optional[dict] = None) -> list:
    """Draw independent realizations of the stationary field with ``density``.

    Parameters
    ----------
    density : SpectralDensity
        Continuous part plus optional atoms and cone component.
    grid : GridSpec
        One axis per spatial dimension, plus a final time axis for space-time densities.
    seed : int
        Key of the counter-based generator; realization ``i`` uses stream ``(seed, i)``.
    n_realizations : int
    workers : int
        Threads used to generate realizations; results do not depend on it.
    """
    if n_realizations < 1:
        raise SimulationError("n_realizations must be >= 1")
    if grid.ndim != density.total_dim:
        raise SimulationError(f"grid has {grid.ndim} axes, density needs {density.total_dim}")
    w = None if density.is_zero else frequency_weights(density, grid)
    if w is not None and not np.any(w > 0):
        w = None

    def job(i):
        return Realization(grid, _one(density, grid, w, seed, i), seed, i, dict(model or {}))

    if workers <= 1:
        return [job(i) for i in range(n_realizations)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(n_realizations)))


def simulate_model(model, grid: GridSpec, seed: int = 0, n_realizations: int = 1, workers: int = 1) -> list:
    """Check existence, build the solution density and simulate it."""
    from .analysis import check_existence
    from .models import solution_spectral_density

    report = check_existence(model)
    if not report.exists:
        raise NoSolutionError(f"no stationary solution for {model.name}: {report.verdict}")
    density = solution_spectral_density(model, force=True)
    return simulate(density, grid, seed, n_realizations, workers, model=model.snapshot())


def truncation_bound(density: SpectralDensity, grid: GridSpec) -> float:
    """Upper bound on the variance lost by truncating to the frequency box.

    For an isotropic spatial density this is the spectral mass outside the
    largest ball inside the box, ``(2 pi)^(-d/2) S_{d-1} int_R^inf f(r) r^(d-1) dr``
    with ``R = pi / max(Delta)``.
    """
    if density.has_time or not density.isotropic:
        raise SimulationError("truncation bound implemented for isotropic spatial densities")
    d = density.dim
    radius = math.pi / max(grid.spacings)
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)

    def integrand(r):
        return float(density.radial(np.array([r]))[0]) * r ** (d - 1)

    tail, _ = integrate.quad(integrand, radius, np.inf, limit=400, epsabs=0.0, epsrel=1e-10)
    return unitary_factor(d) * sphere * tail


# ---------------------------------------------------------------- estimators

def _autocorrelation(x: np.ndarray, max_lag: Sequence[int]) -> np.ndarray:
    """Sum of ``x(p) x(p + L)`` over in-grid pairs, for ``|L_i| <= max_lag_i``."""
    shape = [n + m for n, m in zip(x.shape, max_lag)]
    fx = np.fft.rfftn(x, s=shape, axes=range(x.ndim))
    full = np.fft.irfftn(fx * np.conj(fx), s=shape, axes=range(x.ndim))
    idx = [np.r_[np.arange(0, m + 1), np.arange(s - m, s)] for s, m in zip(shape, max_lag)]
    block = full[np.ix_(*idx)]
    # reorder to lags -m..m
    for ax, m in enumerate(max_lag):
        block = np.roll(block, m, axis=ax)
    return block


def _pair_counts(sizes: Sequence[int], max_lag: Sequence[int]) -> np.ndarray:
    counts = [n - np.abs(np.arange(-m, m + 1)) for n, m in zip(sizes, max_lag)]
    return np.prod(np.stack(np.meshgrid(*counts, indexing="ij")), axis=0).astype(float)


def _symmetrize(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + np.flip(c))


def empirical_covariance(realizations: Sequence[Realization], max_lag: Sequence[int],
                         ergodic: bool = False) -> CovarianceGrid:
    """Zero-mean covariance estimate averaged over realizations and position pairs.

    Only pairs inside the grid contribute (no wrap-around). ``stderr`` holds the
    jackknife standard error over realizations when there are at least two.
    """
    if not realizations:
        raise SimulationError("no realizations")
    if len(realizations) < 2 and not ergodic:
        raise SimulationError("need >= 2 realizations or ergodic=True")
    grid = realizations[0].grid
    max_lag = [int(m) for m in max_lag]
    if len(max_lag) != grid.ndim:
        raise SimulationError("max_lag needs one entry per axis")
    for m, n in zip(max_lag, grid.sizes):
        if m < 0 or 2 * m >= n:
            raise SimulationError(f"max_lag {m} must be below half the grid extent {n}")
    counts = _pair_counts(grid.sizes, max_lag)
    per = []
    for r in realizations:
        if r.grid != grid:
            raise SimulationError("realizations live on different grids")
        per.append(_symmetrize(_autocorrelation(r.values, max_lag) / counts))
    per = np.stack(per)
    mean = _symmetrize(np.mean(per, axis=0))
    stderr = None
    if len(per) >= 2:
        # jackknife of a mean reduces to the sample standard error
        stderr = np.std(per, axis=0, ddof=1) / math.sqrt(len(per))
    axes = [s * np.arange(-m, m + 1) for s, m in zip(grid.spacings, max_lag)]
    return CovarianceGrid(axes, mean, "empirical", np.ones(mean.shape, dtype=bool), stderr,
                          {"n_realizations": len(per), "ergodic": ergodic})


def periodogram(realizations: Sequence[Realization], has_time: bool = False):
    """Mean periodogram in density units, with frequency axes in FFT order.

    For the continuous part of a simulated field the expectation equals the
    target density on every frequency cell.
    """
    grid = realizations[0].grid
    norm = unitary_factor(grid.ndim) * grid.frequency_cell()
    acc = np.zeros(grid.sizes)
    for r in realizations:
        acc += np.abs(np.fft.fftn(r.values) / r.values.size) ** 2
    return grid.frequency_axes(), acc / (len(realizations) * norm)


@dataclass(frozen=True)
class CompareReport:
    max_abs: float
    max_rel_on_valid: float
    rmse: float
    n_compared: int

    def to_dict(self) -> dict:
        return {"max_abs": self.max_abs, "max_rel_on_valid": self.max_rel_on_valid,
                "rmse": self.rmse, "n_compared": self.n_compared}


def compare(a: CovarianceGrid, b: CovarianceGrid, floor: float = 1e-12) -> CompareReport:
    """Deviation metrics of ``a`` from the reference ``b`` on jointly valid lags."""
    if not a.same_axes(b):
        raise CovarianceError("grids do not share axes")
    mask = np.asarray(a.valid, dtype=bool) & np.asarray(b.valid, dtype=bool)
    if not mask.any():
        raise CovarianceError("no jointly valid lags")
    diff = np.abs(np.asarray(a.values)[mask] - np.asarray(b.values)[mask])
    rel = diff / np.maximum(np.abs(np.asarray(b.values)[mask]), floor)
    return CompareReport(float(diff.max()), float(rel.max()), float(np.sqrt(np.mean(diff ** 2))), int(mask.sum()))
