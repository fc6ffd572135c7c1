"""
Radial Fourier transforms of isotropic densities.

For a radial density ``f(|xi|)`` on ``R^d`` the unitary Fourier transform is

    rho(h) = h^(-(d-2)/2) int_0^inf J_nu(h r) f(r) r^(d/2) dr,   nu = (d-2)/2,

which after ``x = h r`` becomes ``h^(-d) int_0^inf J_nu(x) x^(d/2) f(x/h) dx``.
The oscillatory integral is split at the zeros of ``J_nu``; the resulting
alternating series of interval contributions is summed with the Wynn
epsilon algorithm. The first interval is subdivided geometrically toward the
origin so that integrable power-law singularities of ``f`` are handled.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import special

__all__ = [
    "DivergenceError",
    "radial_transform",
    "radial_transform_batch",
    "radial_mass",
    "radial_mass_batch",
    "bessel_zeros",
    "wynn_epsilon",
]


class DivergenceError(ArithmeticError):
    """The transform integral diverges; ``end`` names the offending end."""

    def __init__(self, end: str, detail: str = ""):
        self.end = end
        super().__init__(f"integral diverges at {end}" + (f": {detail}" if detail else ""))


_GL_CACHE: dict = {}


def _gauss_legendre(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel_sums(func: Callable, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Gauss-Legendre integrals over each ``[a_i, b_i]``; result shape ``(m, panels)``."""
    x, w = _gauss_legendre(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = func(nodes)
    return half * (vals @ w)


def bessel_zeros(nu: float, start: int, count: int) -> np.ndarray:
    """Positive zeros ``j_{nu,k}`` for ``k = start .. start+count-1`` (1-based)."""
    k = np.arange(start, start + count, dtype=float)
    if nu == -0.5:
        return (k - 0.5) * math.pi
    if nu == 0.5:
        return k * math.pi
    b = (k + nu / 2 - 0.25) * math.pi
    mu = 4 * nu * nu
    z = b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
    for _ in range(20):
        step = special.jv(nu, z) / special.jvp(nu, z)
        z = z - step
        if np.max(np.abs(step)) < 1e-15 * np.max(z):
            break
    return z


def _kernel(nu: float, d: int) -> Callable:
    """``x -> J_nu(x) x^(d/2)``, with elementary forms for d = 1 and d = 3."""
    c = math.sqrt(2.0 / math.pi)
    if d == 1:
        return lambda x: c * np.cos(x)
    if d == 3:
        return lambda x: c * x * np.sin(x)
    half = d / 2.0
    return lambda x: special.jv(nu, x) * x ** half


def wynn_epsilon(partials) -> np.ndarray:
    """Wynn epsilon extrapolation; ``partials`` has the sequence on its last axis.

    Works columnwise on a batch (leading axes). Rows that hit an exactly
    converged difference keep the last even-column estimate.
    """
    s = np.asarray(partials, dtype=float)
    scalar = s.ndim == 1
    s = np.atleast_2d(s)
    n = s.shape[-1]
    best = s[:, -1].copy()
    if n < 3:
        return best[0] if scalar else best
    frozen = np.zeros(s.shape[0], dtype=bool)
    e_prev = np.zeros((s.shape[0], n + 1))
    e_cur = s.copy()
    for k in range(1, n):
        with np.errstate(invalid="ignore"):
            diff = np.diff(e_cur, axis=-1)
        hit = np.any(diff == 0.0, axis=-1) & ~frozen
        if np.any(hit) and k % 2 == 1:
            best[hit] = e_cur[hit, -1]
        frozen |= hit
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = e_prev[:, 1: diff.shape[-1] + 1] + 1.0 / diff
        e_prev, e_cur = e_cur, nxt
        if k % 2 == 0 and e_cur.shape[-1] > 0:
            ok = ~frozen & np.isfinite(e_cur[:, -1])
            best[ok] = e_cur[ok, -1]
        if e_cur.shape[-1] < 2:
            break
    return best[0] if scalar else best


def _geometric_origin(func: Callable, upper: float, n: int, levels: int = 60, max_levels: int = 1000):
    """Integral of ``func`` over ``(0, upper]`` on halving panels, with a geometric tail estimate.

    ``func`` maps nodes of shape ``(P, n)`` to values ``(m, P, n)``. Blocks of
    ``levels`` panels are added while any batch member's newest panel is
    non-negligible and no safe tail estimate exists.
    """
    total = None
    top = upper
    done = 0
    while True:
        edges = top * 0.5 ** np.arange(levels + 1)
        contrib = _panel_sums(func, edges[1:], edges[:-1], n)
        if not np.all(np.isfinite(contrib)):
            raise DivergenceError("origin", "non-finite integrand near zero")
        block = np.sum(contrib[:, ::-1], axis=-1)
        total = block if total is None else total + block
        done += levels
        top = edges[-1]
        c1, c2 = np.abs(contrib[:, -2]), np.abs(contrib[:, -1])
        scale = np.maximum(np.abs(total), 1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(c1 > 0, c2 / c1, 1.0)
            tail = np.where(ratio < 1, contrib[:, -1] * ratio / (1.0 - ratio), 0.0)
        small = c2 <= 1e-17 * scale
        safe = (ratio < 0.9) & (np.abs(tail) <= 1e-12 * scale)
        if np.all(small | safe):
            return total + np.where(small, 0.0, tail)
        if done >= max_levels or top < 1e-290:
            if np.any(~small & (ratio >= 0.999)):
                raise DivergenceError("origin", "local power-law exponent too negative")
            return total + np.where(small, 0.0, tail)


def _geometric_infinity(func: Callable, lower: float, n: int, levels: int = 200):
    """Integral of a non-oscillatory ``func`` over ``[lower, inf)`` on doubling panels."""
    edges = lower * 2.0 ** np.arange(levels + 1)
    contrib = _panel_sums(func, edges[:-1], edges[1:], n)
    if not np.all(np.isfinite(contrib)):
        raise DivergenceError("infinity", "non-finite integrand")
    scale = np.maximum(np.max(np.abs(contrib), axis=-1), 1e-300)
    c1, c2 = np.abs(contrib[:, -2]), np.abs(contrib[:, -1])
    live = c2 > 1e-15 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(c1 > 0, c2 / c1, 1.0)
    if np.any(live & (ratio >= 0.999)):
        raise DivergenceError("infinity", "integrand decays too slowly")
    tail = np.where(live, contrib[:, -1] * ratio / (1.0 - np.where(live, ratio, 0.0)), 0.0)
    return np.sum(contrib, axis=-1) + tail


def _oscillatory_tail(func, nu, n, rtol, max_intervals, offset=0.0, l1_scale=False, batch=48, window=21):
    """Sum of interval integrals between consecutive zeros.

    Tolerances are relative to ``|offset + partial|`` (``offset`` is the head
    integral), or with ``l1_scale`` to the running sum of ``|contribution|``;
    the latter suits batches of transforms whose results are far below their
    integrands' size and skips the non-decay divergence test.
    """
    l1 = np.abs(offset) if l1_scale else 0.0
    partial = None
    partials = None
    start = 1
    prev_est = None
    recent_mag = []
    done = None
    result = None
    while start < max_intervals:
        z = bessel_zeros(nu, start, batch + 1)
        contrib = _panel_sums(func, z[:-1], z[1:], n)
        if not np.all(np.isfinite(contrib)):
            raise DivergenceError("infinity", "non-finite integrand")
        if partial is None:
            partial = np.zeros(contrib.shape[0])
            done = np.zeros(contrib.shape[0], dtype=bool)
            result = np.zeros(contrib.shape[0])
        sums = partial[:, None] + np.cumsum(contrib, axis=-1)
        partial = sums[:, -1].copy()
        partials = sums if partials is None else np.concatenate([partials, sums], axis=-1)
        partials = partials[:, -window:]
        start += batch
        mag = np.mean(np.abs(contrib), axis=-1)
        recent_mag.append(mag)
        if l1_scale:
            l1 = l1 + np.sum(np.abs(contrib), axis=-1)
            scale = np.maximum(l1, 1e-300)
        else:
            scale = np.maximum(np.abs(partial + offset), 1e-300)
        negligible = np.max(np.abs(contrib[:, -8:]), axis=-1) <= 1e-17 * scale
        new = negligible & ~done
        result[new] = partial[new]
        done |= negligible
        if np.all(done):
            return result
        est = wynn_epsilon(partials)
        if prev_est is not None:
            ref = scale if l1_scale else np.maximum(np.abs(est + offset), 1e-300)
            conv = (np.abs(est - prev_est) <= rtol * ref) & ~done
            result[conv] = est[conv]
            done |= conv
            if np.all(done):
                return result
        prev_est = est
        if len(recent_mag) >= 6 and not l1_scale:
            stuck = (recent_mag[-1] >= 0.98 * recent_mag[-6]) & (mag > 1e-8 * scale) & ~done
            if np.any(stuck):
                raise DivergenceError("infinity", "oscillation amplitude does not decay")
    rest = ~done
    result[rest] = prev_est[rest] if prev_est is not None else partial[rest]
    return result


def _compact_tail(func, nu, n, end):
    """Integral from the first zero to ``end`` split at the zeros of ``J_nu``."""
    first = float(bessel_zeros(nu, 1, 1)[0])
    count = 1
    while bessel_zeros(nu, count, 1)[0] < end:
        count *= 2
    z = bessel_zeros(nu, 1, count)
    edges = np.concatenate([[first], z[(z > first) & (z < end)], [end]])
    return np.sum(_panel_sums(func, edges[:-1], edges[1:], n), axis=-1)


def radial_transform_batch(F: Callable, d: int, h: float, *, n_nodes: int = 24, rtol: float = 1e-13,
                           max_intervals: int = 40000, l1_scale: bool = False,
                           support: float | None = None) -> np.ndarray:
    """Radial transform of a batch of densities sharing the lag ``h``.

    ``F(r)`` receives radii of shape ``(P, n)`` and returns ``(m, P, n)``.
    ``support`` declares ``F = 0`` beyond that radius, so a jump there is
    integrated exactly instead of through the oscillatory extrapolation.
    """
    h = float(abs(h))
    if h == 0.0:
        return radial_mass_batch(F, d, n_nodes, support=support)
    nu = (d - 2) / 2.0
    kern = _kernel(nu, d)

    def integrand(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.nan_to_num(kern(x)[None] * F(x / h), nan=0.0, posinf=np.inf, neginf=-np.inf)

    first_zero = float(bessel_zeros(nu, 1, 1)[0])
    if support is not None:
        end = h * float(support)
        if end <= first_zero:
            return _geometric_origin(integrand, end, n_nodes) / h ** d
        head = _geometric_origin(integrand, first_zero, n_nodes)
        return (head + _compact_tail(integrand, nu, n_nodes, end)) / h ** d
    head = _geometric_origin(integrand, first_zero, n_nodes)
    tail = _oscillatory_tail(integrand, nu, n_nodes, rtol, max_intervals, offset=head, l1_scale=l1_scale)
    return (head + tail) / h ** d


def radial_transform(f: Callable, d: int, h: float, *, n_nodes: int = 24, rtol: float = 1e-13,
                     max_intervals: int = 40000, support: float | None = None) -> float:
    """Unitary radial Fourier transform of the isotropic density ``f`` at ``|lag| = h``.

    Parameters
    ----------
    f : callable
        Vectorized radial density ``r -> f(r)`` for ``r > 0``.
    d : int
        Dimension.
    h : float
        Lag modulus; ``h = 0`` gives the total mass term.
    support : float, optional
        Radius beyond which ``f`` vanishes.

    Raises
    ------
    DivergenceError
        When the integral diverges at the origin or at infinity.
    """
    F = lambda r: np.asarray(f(r))[None]
    return float(radial_transform_batch(F, d, h, n_nodes=n_nodes, rtol=rtol, max_intervals=max_intervals,
                                        support=support)[0])


def radial_mass_batch(F: Callable, d: int, n_nodes: int = 24, support: float | None = None) -> np.ndarray:
    area = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)

    def integrand(r):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.nan_to_num(F(r) * (r ** (d - 1))[None], nan=0.0)

    if support is not None:
        total = _geometric_origin(integrand, float(support), n_nodes)
    else:
        total = _geometric_origin(integrand, 1.0, n_nodes) + _geometric_infinity(integrand, 1.0, n_nodes)
    return (2.0 * math.pi) ** (-d / 2.0) * area * total


def radial_mass(f: Callable, d: int, n_nodes: int = 24, support: float | None = None) -> float:
    """``(2 pi)^(-d/2) int_{R^d} f(|xi|) d xi`` for an isotropic density."""
    return float(radial_mass_batch(lambda r: np.asarray(f(r))[None], d, n_nodes, support=support)[0])
