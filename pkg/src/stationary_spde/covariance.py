"""
Covariance functions: closed forms, radial spectral transforms, mixtures for
first and second order evolution models, and the white-noise convolution
theorem on grids.

All transforms use the unitary convention ``rho(h) = (2 pi)^(-D/2) int
exp(-i h.xi) mu(d xi)``; for even measures the sign of the exponent is
immaterial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import special

from .densities import SpectralDensity, unitary_factor
from .hankel import DivergenceError, radial_transform, radial_transform_batch
from .models import ModelError, ModelSpec, solution_spectral_density
from .symbols import Symbol

__all__ = [
    "LagPoint",
    "CovarianceGrid",
    "CovarianceError",
    "Unsupported",
    "LagValidityError",
    "DivergenceError",
    "closed_form",
    "matern_covariance",
    "hankel_transform",
    "spacetime_covariance",
    "evolution_mixture_covariance",
    "model_covariance",
    "covariance_grid",
    "convolve_white",
    "grid_from_function",
    "cell_average_radial",
]


class CovarianceError(ValueError):
    pass


class Unsupported(CovarianceError):
    """No closed form (or no implemented path) for this model."""


class LagValidityError(CovarianceError):
    """The covariance is a distribution without pointwise value at this lag."""


@dataclass(frozen=True)
class LagPoint:
    h: tuple
    u: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(v) for v in np.atleast_1d(self.h)))
        if self.u is not None:
            object.__setattr__(self, "u", float(self.u))

    @property
    def norm(self) -> float:
        return float(math.sqrt(sum(v * v for v in self.h)))


@dataclass
class CovarianceGrid:
    """Covariance values on a centered regular lag grid.

    ``axes[i]`` holds the lag samples of axis ``i`` (spatial axes first, then
    time). ``valid`` is False where the covariance has no pointwise meaning.
    """

    axes: list
    values: np.ndarray
    provenance: str
    valid: Optional[np.ndarray] = None
    stderr: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axes = [np.asarray(a, dtype=float) for a in self.axes]
        self.values = np.asarray(self.values, dtype=float)
        shape = tuple(a.size for a in self.axes)
        if self.values.shape != shape:
            raise CovarianceError(f"values shape {self.values.shape} does not match axes {shape}")
        if self.valid is None:
            self.valid = np.isfinite(self.values)
        self.valid = np.asarray(self.valid, dtype=bool)

    @property
    def spacing(self) -> tuple:
        return tuple(float(a[1] - a[0]) if a.size > 1 else 0.0 for a in self.axes)

    @property
    def center_index(self) -> tuple:
        return tuple(int(np.argmin(np.abs(a))) for a in self.axes)

    def same_axes(self, other: "CovarianceGrid") -> bool:
        return len(self.axes) == len(other.axes) and all(
            a.shape == b.shape and np.allclose(a, b, rtol=1e-12, atol=1e-12) for a, b in zip(self.axes, other.axes)
        )

    def lag_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(mesh, axis=-1)


# ---------------------------------------------------------------- closed forms

def matern_covariance(h, d: int, kappa: float, alpha: float, scale: float = 1.0) -> np.ndarray:
    """Covariance of the density ``scale (2 pi)^(-d/2) (kappa^2 + |xi|^2)^(-alpha)``.

    For ``0 < alpha <= d/2`` the covariance is locally integrable with a
    singularity at the origin, where ``inf`` is returned.
    """
    if not alpha > 0:
        raise LagValidityError("Matern covariance needs alpha > 0")
    h = np.abs(np.asarray(h, dtype=float))
    nu = alpha - d / 2.0
    c = scale * (2 * math.pi) ** (-d / 2.0) / (2 ** (alpha - 1) * kappa ** (2 * alpha - d) * math.gamma(alpha))
    x = kappa * h
    with np.errstate(invalid="ignore", divide="ignore"):
        val = c * x ** nu * special.kv(nu, x)
    at_zero = c * 2 ** (nu - 1) * math.gamma(nu) if nu > 0 else math.inf
    # K_nu overflows only where the leading small-argument term is exact to machine precision
    return np.where((x == 0) | ~np.isfinite(val), at_zero, val)


def _matern_derivative_term(x, d, kappa, alpha, scale):
    """``d/dx [x rho_M(x)]`` used by the three-dimensional waving Matern limit at ``h = 0``."""
    nu = alpha - d / 2.0
    c = scale * (2 * math.pi) ** (-d / 2.0) / (2 ** (alpha - 1) * kappa ** (2 * alpha - d) * math.gamma(alpha))
    z = kappa * abs(x)
    if z == 0:
        return float(matern_covariance(0.0, d, kappa, alpha, scale))
    # d/dz (z^nu K_nu(z)) = -z^nu K_{nu-1}(z)
    rho = c * z ** nu * special.kv(nu, z)
    drho = -c * kappa * z ** nu * special.kv(nu - 1, z)
    return float(rho + abs(x) * drho)


def _waving_matern(lag: LagPoint, d, c, kappa, alpha, a):
    h, u = lag.norm, abs(lag.u or 0.0)
    shift = c * u
    if d == 1:
        return 0.5 * float(matern_covariance(h + shift, 1, kappa, alpha, a) + matern_covariance(h - shift, 1, kappa, alpha, a))
    if d == 3:
        if h == 0.0:
            return _matern_derivative_term(shift, 3, kappa, alpha, a)

        def phi(x):
            return x * float(matern_covariance(abs(x), 3, kappa, alpha, a))

        return (phi(h + shift) + phi(h - shift)) / (2.0 * h)
    raise Unsupported("waving Matern closed form is available for d = 1 and d = 3")


def closed_form(model: ModelSpec, lag: LagPoint) -> float:
    """Closed-form covariance for Matern, no-range Matern, heat (d=3), waving Matern (d=1,3)
    and first order evolution models (through their spatial mixture)."""
    if len(lag.h) != model.d:
        raise CovarianceError(f"lag dimension {len(lag.h)} does not match model dimension {model.d}")
    if not model.has_time and lag.u not in (None, 0.0):
        raise CovarianceError("temporal lag given for a purely spatial model")
    p, d, h = model.params, model.d, lag.norm
    name = model.name
    if model.source.kind != "white_noise" and name != "waving_matern":
        raise Unsupported("closed forms assume a white-noise source")
    if name == "matern":
        if not p["alpha"] > d / 2:
            raise LagValidityError("Matern covariance with alpha <= d/2 is a distribution")
        return float(matern_covariance(h, d, p["kappa"], p["alpha"]))
    if name == "matern_no_range":
        alpha = p["alpha"]
        if not alpha < d / 2:
            raise Unsupported("no stationary solution for alpha >= d/2")
        if h == 0.0:
            raise LagValidityError("no-range Matern covariance is not defined at h = 0")
        return 2.0 ** (-2 * alpha) * math.pi ** (-d / 2) * math.gamma(d / 2 - alpha) / math.gamma(alpha) * h ** (2 * alpha - d)
    if name == "heat":
        if d != 3:
            raise Unsupported("heat covariance closed form is implemented for d = 3")
        a, u = p["a"], abs(lag.u or 0.0)
        if h == 0.0 and u == 0.0:
            raise LagValidityError("heat covariance is not defined at (h, u) = (0, 0)")
        pref = (2 * math.pi) ** -2 * math.pi / (2 * a)
        if h == 0.0:
            return pref / math.sqrt(math.pi * a * u)
        if u == 0.0:
            return pref / h
        return pref * math.erf(h / (2 * math.sqrt(a * u))) / h
    if name == "waving_matern":
        return _waving_matern(lag, d, p["c"], p["kappa"], p["alpha"], p["a"])
    if model.is_evolution and model.beta == 1.0:
        return evolution_mixture_covariance(1.0, model.spatial_symbol, lag, _spatial_source(model))
    raise Unsupported(f"no closed form for {name!r}")


# ---------------------------------------------------------------- transforms

def _radial(density: SpectralDensity, omega=None) -> Callable:
    def f(r):
        r = np.asarray(r, dtype=float)
        return density.radial(r, omega)

    return f


def hankel_transform(density: SpectralDensity, d: int, h_values, u: Optional[float] = None,
                     support: Optional[float] = None) -> np.ndarray:
    """Radial transform of an isotropic density at the lag moduli ``h_values``.

    For a space-time density the temporal lag ``u`` is handled by an inner
    one-dimensional cosine transform (see :func:`spacetime_covariance`).
    ``support`` declares a density that vanishes for ``|xi| > support``; the
    integral is then split at the Bessel zeros up to the cut.
    """
    if not density.isotropic:
        raise CovarianceError("hankel_transform requires a density isotropic in xi")
    if density.dim != d:
        raise CovarianceError("density dimension does not match d")
    h_values = np.atleast_1d(np.asarray(h_values, dtype=float))
    if density.has_time:
        return np.array([spacetime_covariance(density, d, h, u or 0.0) for h in h_values])
    f = _radial(density)
    return np.array([radial_transform(f, d, h, support=support) for h in h_values])


def spacetime_covariance(density: SpectralDensity, d: int, h: float, u: float) -> float:
    """Covariance of an isotropic space-time density by nested radial transforms.

    The inner transform over ``omega`` (a one-dimensional cosine transform,
    valid because isotropy in ``xi`` makes the density even in ``omega``)
    produces the spatial function that the outer Hankel transform consumes.
    """
    if not density.has_time:
        raise CovarianceError("spacetime_covariance needs a space-time density")
    func = density.func
    u = abs(float(u))

    def spatial(r):
        r = np.asarray(r, dtype=float)
        flat = r.ravel()

        def inner(om):
            # batch over radii: xi_i = r_i e_1, evaluated at every omega node
            xi = np.zeros((flat.size,) + om.shape + (d,))
            xi[..., 0] = flat.reshape((-1,) + (1,) * om.ndim)
            return func(xi, np.broadcast_to(om, xi.shape[:-1]))

        vals = radial_transform_batch(inner, 1, u, rtol=1e-13, l1_scale=True)
        return vals.reshape(r.shape)

    # the inner values carry ~1e-13 relative noise; ask the outer series for less
    return radial_transform(spatial, d, h, rtol=1e-10)


def _gamma_parts(g):
    a = np.abs(g)
    gr = np.real(g)
    return np.sqrt(np.maximum(a + gr, 0) / 2), np.sqrt(np.maximum(a - gr, 0) / 2)


def _mixture_kernel(beta: float, g_spatial: Symbol, source: SpectralDensity, u: float):
    """Spatial function whose Fourier transform is the evolution covariance at time lag ``u``."""
    gf, sf = g_spatial.func, source.func
    u = abs(u)
    if beta == 1.0:
        def k(xi, om=None):
            g = gf(xi, None)
            gr = np.abs(np.real(g))
            return sf(xi, None) * np.exp(1j * u * np.imag(g) - u * gr) / (2 * gr)
    elif beta == 2.0:
        def k(xi, om=None):
            g = gf(xi, None)
            g_re, g_im = _gamma_parts(g)
            with np.errstate(divide="ignore", invalid="ignore"):
                lim = np.where(g_re == 0, 2 * u, (np.exp(2j * g_re * u) - 1) / (1j * np.where(g_re == 0, 1, g_re)))
            bracket = 1 / (g_im + 1j * g_re) + np.exp(2j * g_re * u) / (g_im - 1j * g_re) + lim
            return sf(xi, None) * np.exp(-(g_im + 1j * g_re) * u) / (8 * g_im ** 2) * bracket
    else:
        raise Unsupported("mixture representation exists only for beta in {1, 2}")
    return k


def evolution_mixture_covariance(beta: float, g_spatial: Symbol, lag: LagPoint,
                                 source_spatial: SpectralDensity, cubature_nodes: int = 48) -> float:
    """Covariance of ``d_t^beta U + L_g U = X_S (x) W_T`` for ``beta`` in {1, 2}.

    Isotropic ``g`` and source use the Hankel path; otherwise a tensor
    Gauss-Legendre cubature over a box sized from the decay of the kernel.
    """
    if len(lag.h) != g_spatial.dim:
        raise CovarianceError("lag dimension mismatch")
    u = lag.u or 0.0
    if u < 0:
        # evenness rho(h, u) = rho(-h, -u); the kernels below assume u >= 0
        lag = LagPoint(tuple(-v for v in lag.h), -u)
        u = -u
    k = _mixture_kernel(float(beta), g_spatial, source_spatial, u)
    d = g_spatial.dim
    if g_spatial.isotropic and source_spatial.isotropic:
        e1 = np.zeros(d)
        e1[0] = 1.0

        def f(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(all="ignore"):
                return np.real(k(r[..., None] * e1))

        try:
            return radial_transform(f, d, lag.norm)
        except DivergenceError as exc:
            raise DivergenceError(exc.end, f"mixture kernel not integrable at lag {lag}") from None
    return _cubature(k, np.asarray(lag.h), d, cubature_nodes)


def _cubature(k, h: np.ndarray, d: int, n_nodes: int) -> float:
    """``(2 pi)^(-d/2) int exp(-i h.xi) k(xi) d xi`` on a panelled box."""
    rng = np.random.default_rng(7)
    dirs = rng.standard_normal((16, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    with np.errstate(all="ignore"):
        peak = float(np.max(np.abs(k(np.zeros((1, d))))))
        R = 1.0
        while R < 2.0 ** 20:
            edge = float(np.max(np.abs(k(R * dirs)))) * R ** d
            if edge <= 1e-13 * max(peak, 1e-300):
                break
            R *= 2.0
        else:
            raise DivergenceError("infinity", "mixture kernel does not decay")
    panels = max(8, int(math.ceil(2 * R * max(1.0, float(np.max(np.abs(h)))) / 2.0)))
    panels = min(panels, 256)
    x, w = np.polynomial.legendre.leggauss(n_nodes // 4 if d > 2 else n_nodes // 2)
    edges = np.linspace(-R, R, panels + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    grids = np.meshgrid(*([nodes] * d), indexing="ij")
    pts = np.stack(grids, axis=-1).reshape(-1, d)
    wt = np.ones(pts.shape[0])
    for ax in range(d):
        wt *= np.meshgrid(*([weights] * d), indexing="ij")[ax].ravel()
    with np.errstate(all="ignore"):
        vals = k(pts) * np.exp(-1j * (pts @ h))
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("origin", "mixture kernel is singular")
    return float(np.real(np.sum(vals * wt))) * (2 * math.pi) ** (-d / 2)


def _spatial_source(model: ModelSpec) -> SpectralDensity:
    """Spatial factor ``X_S`` of a source ``X_S (x) W_T`` (white noise included)."""
    src = model.source
    if src.kind == "white_noise":
        from .densities import white_density

        return white_density(model.d)
    if src.kind == "separable" and src.temporal.name == "white_noise":
        return src.spatial
    raise Unsupported("mixture covariance needs a source white in time")


def _cone_covariance(cone, d: int, lag: LagPoint) -> float:
    base = cone.spatial
    shift = cone.speed * abs(lag.u or 0.0)
    if base.isotropic:
        if lag.norm == 0.0 and shift > 0:
            # (2 pi)^(-d/2) S_{d-1} int f(r) r^(d-1) cos(shift r) dr as a cosine transform
            area = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
            g = lambda r: base.radial(r) * r ** (d - 1)
            return (2 * math.pi) ** (-d / 2) * area * math.sqrt(math.pi / 2) * radial_transform(g, 1, shift)

        def f(r):
            return base.radial(r) * np.cos(shift * r)

        return radial_transform(f, d, lag.norm)

    def k(xi, om=None):
        return base(xi) * np.cos(shift * np.linalg.norm(xi, axis=-1))

    return _cubature(k, np.asarray(lag.h), d, 48)


def _atom_covariance(atoms, lag: LagPoint, total_dim: int) -> float:
    z = lag.h + ((lag.u or 0.0),) if total_dim > len(lag.h) else lag.h
    s = sum(a.weight * math.cos(float(np.dot(a.location, z))) for a in atoms)
    return unitary_factor(total_dim) * s


def model_covariance(model: ModelSpec, lag: LagPoint, check: bool = True):
    """Best available covariance value and its provenance.

    Returns ``(value, provenance)``; provenance is ``closed_form``, ``mixture``
    or ``hankel``. Raises :class:`LagValidityError` for distributional lags.
    """
    if check:
        from .analysis import check_existence

        rep = check_existence(model)
        if rep.exists is False:
            raise ModelError(f"no stationary solution ({rep.verdict})")
        if model.name in ("matern_no_range", "heat") and lag.norm == 0.0 and not (lag.u or 0.0):
            raise LagValidityError("distributional covariance has no value at the origin")
    try:
        return closed_form(model, lag), "closed_form"
    except Unsupported:
        pass
    dens = solution_spectral_density(model, force=True)
    total = 0.0
    prov = "hankel"
    if not model.source.density.is_zero:
        if model.is_evolution and model.beta in (1.0, 2.0):
            try:
                total += evolution_mixture_covariance(model.beta, model.spatial_symbol, lag, _spatial_source(model))
                prov = "mixture"
            except Unsupported:
                total += _direct(dens, model, lag)
        else:
            total += _direct(dens, model, lag)
    if dens.cone is not None:
        total += _cone_covariance(dens.cone, model.d, lag)
    if dens.atoms:
        total += _atom_covariance(dens.atoms, lag, dens.total_dim)
    return total, prov


def _direct(dens: SpectralDensity, model: ModelSpec, lag: LagPoint) -> float:
    if not dens.isotropic:
        raise Unsupported("anisotropic models need the mixture path (evolution models with beta in {1, 2})")
    if dens.has_time:
        return spacetime_covariance(dens, model.d, lag.norm, lag.u or 0.0)
    return float(hankel_transform(dens, model.d, [lag.norm])[0])


def _centered_axis(n: int, spacing: float) -> np.ndarray:
    m = n // 2
    return np.arange(-m, m + 1) * spacing


def covariance_grid(model: ModelSpec, sizes: Sequence[int], spacings: Sequence[float]) -> CovarianceGrid:
    """Covariance on a centered odd-sized lag grid (spatial axes, then time).

    Isotropic models are evaluated once per distinct ``(|h|, |u|)``.
    """
    n_axes = model.d + int(model.has_time)
    if len(sizes) != n_axes or len(spacings) != n_axes:
        raise CovarianceError(f"grid needs {n_axes} axes")
    from .analysis import check_existence

    rep = check_existence(model)
    if rep.exists is False:
        raise ModelError(f"no stationary solution ({rep.verdict})")
    axes = [_centered_axis(n, s) for n, s in zip(sizes, spacings)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n_axes)
    iso = model.symbol.isotropic and model.source.density.isotropic
    keys = {}
    for i, p in enumerate(pts):
        hs = p[: model.d]
        u = abs(float(p[model.d])) if model.has_time else None
        key = (round(float(np.linalg.norm(hs)), 12), u) if iso else (tuple(hs), None if u is None else float(p[model.d]))
        keys.setdefault(key, []).append(i)
    values = np.full(pts.shape[0], np.nan)
    valid = np.zeros(pts.shape[0], dtype=bool)
    prov = set()
    for key, idx in keys.items():
        p = pts[idx[0]]
        lag = LagPoint(p[: model.d], float(p[model.d]) if model.has_time else None)
        try:
            v, pr = model_covariance(model, lag, check=False)
            if model.name in ("matern_no_range", "heat") and lag.norm == 0.0 and not (lag.u or 0.0):
                raise LagValidityError("origin")
        except LagValidityError:
            continue
        values[idx] = v
        valid[idx] = True
        prov.add(pr)
    shape = tuple(a.size for a in axes)
    provenance = prov.pop() if len(prov) == 1 else "mixed"
    return CovarianceGrid(axes, values.reshape(shape), provenance, valid.reshape(shape),
                          meta={"model": model.snapshot()})


def grid_from_function(func: Callable, sizes: Sequence[int], spacings: Sequence[float],
                       provenance: str = "closed_form") -> CovarianceGrid:
    """Evaluate ``func(lag_array)`` (last axis = lag components) on a centered grid."""
    axes = [_centered_axis(n, s) for n, s in zip(sizes, spacings)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(func(pts), dtype=float)
    return CovarianceGrid(axes, vals, provenance, np.isfinite(vals))


def cell_average_radial(rho: Callable, sizes: Sequence[int], spacing: float, radius: int = 2,
                        n_nodes: int = 12) -> CovarianceGrid:
    """Centered grid of a radial covariance with cell averages near the origin.

    Cells within ``radius`` (in cell units, Chebyshev distance) of the origin
    hold the mean of ``rho`` over the cell; the origin cell is integrated in
    polar coordinates so that integrable singularities at zero are handled.
    Other cells hold point values. Intended for convolution where one factor
    has a singularity at the origin.
    """
    d = len(sizes)
    axes = [_centered_axis(n, spacing) for n in sizes]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    with np.errstate(all="ignore"):
        vals = np.asarray(rho(np.linalg.norm(pts, axis=-1)), dtype=float)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    offs = 0.5 * spacing * x
    wts = 0.5 * w
    center = tuple(a.size // 2 for a in axes)
    mesh_offs = np.stack(np.meshgrid(*([offs] * d), indexing="ij"), axis=-1).reshape(-1, d)
    mesh_w = np.prod(np.stack(np.meshgrid(*([wts] * d), indexing="ij"), axis=-1).reshape(-1, d), axis=1)
    for idx in np.ndindex(*([2 * radius + 1] * d)):
        k = tuple(i - radius for i in idx)
        if k == (0,) * d:
            continue
        c = np.array(k, dtype=float) * spacing
        vals[tuple(ci + ki for ci, ki in zip(center, k))] = float(mesh_w @ rho(np.linalg.norm(c + mesh_offs, axis=1)))
    vals[center] = _origin_cell_mean(rho, d, spacing, n_nodes)
    return CovarianceGrid(axes, vals, "closed_form", np.isfinite(vals))


def _origin_cell_mean(rho: Callable, d: int, spacing: float, n_nodes: int) -> float:
    half = spacing / 2
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    if d == 1:
        # geometric panels toward 0 to resolve the singularity
        edges = half * 0.5 ** np.arange(60)
        total = 0.0
        for a, b in zip(edges[1:], edges[:-1]):
            r = 0.5 * (a + b) + 0.5 * (b - a) * x
            total += 0.5 * (b - a) * float(w @ rho(r))
        return 2 * total / spacing
    if d == 2:
        # 8 congruent triangles; theta in [0, pi/4], r up to half / cos(theta)
        th = np.pi / 8 + np.pi / 8 * x
        total = 0.0
        for t, wt in zip(th, w * np.pi / 8):
            rmax = half / math.cos(t)
            edges = rmax * 0.5 ** np.arange(60)
            acc = 0.0
            for a, b in zip(edges[1:], edges[:-1]):
                r = 0.5 * (a + b) + 0.5 * (b - a) * x
                acc += 0.5 * (b - a) * float(w @ (rho(r) * r))
            total += wt * acc
        return 8 * total / spacing ** 2
    raise CovarianceError("origin cell averaging implemented for d <= 2")


def convolve_white(rho_w: CovarianceGrid, rho_x: CovarianceGrid) -> CovarianceGrid:
    """Discrete version of ``rho_U = rho_U^W * rho_X`` on a shared centered grid.

    Linear convolution by zero-padded FFT, scaled by the cell volume; the
    output keeps the input axes (central crop of the full convolution).
    """
    if not rho_w.same_axes(rho_x):
        raise CovarianceError("convolve_white needs grids with identical axes")
    if not (np.all(rho_w.valid) and np.all(rho_x.valid)):
        raise CovarianceError("convolve_white needs pointwise-valid grids (empty validity masks)")
    shape = rho_w.values.shape
    full = [2 * n - 1 for n in shape]
    fshape = [sfft.next_fast_len(n, real=True) for n in full]
    cell = float(np.prod(rho_w.spacing))
    A = sfft.rfftn(rho_w.values, fshape)
    B = sfft.rfftn(rho_x.values, fshape)
    conv = sfft.irfftn(A * B, fshape)
    crop = tuple(slice(n // 2, n // 2 + n) for n in shape)
    out = conv[crop] * cell
    return CovarianceGrid(rho_w.axes, out, "convolution", np.ones(shape, dtype=bool))
