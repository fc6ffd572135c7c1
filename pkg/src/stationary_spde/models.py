"""
Registry of named SPDE models and the solution spectral density.

Every model binds a symbol ``g``, a source term ``X`` and, for models whose
symbol vanishes, an optional homogeneous component. The stationary solution of
``L_g U = X`` in the second-order sense has spectral density
``source(xi) / |g(xi)|^2``.

=====================  =======================================================
name                   params (defaults in parentheses)
=====================  =======================================================
matern                 kappa > 0, alpha
matern_no_range        alpha > 0
markov                 coefficients [c0, c1, ...] of p(t), p > 0 on [0, inf)
stein                  a, b > 0, s, kappa (s^2 + kappa^2 > 0), alpha, beta, nu
evolving_matern        beta > 0, a > 0, kappa > 0, alpha, s_beta (auto)
advection_diffusion    kappa > 0, v (0), Sigma SPD (identity)
langevin               D, k, eta0 > 0, eta1 >= 0, nu >= 0
heat                   a > 0
wave                   c > 0
waving_matern          c > 0, kappa > 0, alpha, a > 0 (1)
=====================  =======================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .densities import (
    Atom,
    ConeComponent,
    DensityError,
    SourceTerm,
    SpectralDensity,
    matern_density,
    product_density,
    unitary_factor,
    white_density,
    zero_density,
)
from .symbols import (
    EMPTY,
    PolyWeight,
    Symbol,
    ZeroSet,
    _time_factor,
    check_evolution_sceu,
    evolution_symbol,
    sample_frequencies,
)

__all__ = [
    "ModelError",
    "ModelNotFound",
    "ModelSpec",
    "build_model",
    "model_from_dict",
    "source_separable",
    "source_white",
    "solution_spectral_density",
    "density_from_dict",
    "MODEL_NAMES",
    "matern_symbol",
    "Classification",
    "classify",
    "classify_numeric",
]


class ModelError(ValueError):
    """Model parameters outside their domain."""


class ModelNotFound(LookupError):
    pass


@dataclass(frozen=True, eq=False)
class ModelSpec:
    name: str
    d: int
    has_time: bool
    params: dict
    symbol: Symbol
    source: SourceTerm
    spatial_symbol: Optional[Symbol] = None
    beta: Optional[float] = None
    homogeneous: Optional[SpectralDensity] = None
    flags: tuple = ()
    document: dict = field(default_factory=dict)

    @property
    def is_evolution(self) -> bool:
        return self.beta is not None

    def snapshot(self) -> dict:
        params = {}
        for k, v in self.params.items():
            params[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return {"name": self.name, "d": self.d, "params": params, "source": self.source.describe()}


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ModelError(message)


def _sq(xi):
    return np.sum(xi * xi, axis=-1)


def matern_symbol(d: int, kappa: float, alpha: float, scale: float = 1.0, sign: float = 1.0) -> Symbol:
    """``sign * scale * (kappa^2 + |xi|^2)^(alpha/2)``."""
    k2 = kappa * kappa
    big = max(1.0, k2)
    if alpha >= 0:
        bound = PolyWeight(scale * big ** (alpha / 2), int(math.ceil(alpha / 2)))
        witness = PolyWeight(1.0 / (scale * kappa ** alpha), 0)
    else:
        bound = PolyWeight(scale * kappa ** alpha, 0)
        witness = PolyWeight(big ** (-alpha / 2) / scale, int(math.ceil(-alpha / 2)))
    factor = sign * scale

    def f(xi, om):
        return factor * (k2 + _sq(xi)) ** (alpha / 2) + 0j

    return Symbol(f, d, isotropic=True, real_valued=True, bound=bound, zero_set=EMPTY,
                  sceu="certified", witness=witness,
                  name=f"{'-' if sign < 0 else ''}{scale:g}(kappa^2+|xi|^2)^{alpha / 2:g}")


def source_white(d: int, has_time: bool = False) -> SourceTerm:
    return SourceTerm("white_noise", white_density(d, has_time))


def source_separable(spatial: SpectralDensity, temporal: SpectralDensity) -> SourceTerm:
    """Separable source ``X_S (x) X_T``."""
    try:
        dens = product_density(spatial, temporal)
    except DensityError as exc:
        raise ModelError(str(exc)) from exc
    return SourceTerm("separable", dens, spatial=spatial, temporal=temporal)


def _evolution(name, d, params, beta, g, source, flags=(), homogeneous=None, **overrides):
    sym = evolution_symbol(beta, g)
    if overrides:
        from dataclasses import replace

        sym = replace(sym, **overrides)
    if source is None:
        source = source_white(d, True)
    return ModelSpec(name, d, True, params, sym, source, spatial_symbol=g, beta=beta,
                     homogeneous=homogeneous, flags=tuple(flags))


def _as_float(params, key, default=None):
    if key not in params:
        if default is None:
            raise ModelError(f"missing parameter {key!r}")
        return default
    try:
        return float(params[key])
    except (TypeError, ValueError) as exc:
        raise ModelError(f"parameter {key!r} must be a real number") from exc


def _build_matern(d, p, source):
    kappa, alpha = _as_float(p, "kappa"), _as_float(p, "alpha")
    _require(kappa > 0, "matern requires kappa > 0")
    sym = matern_symbol(d, kappa, alpha)
    return ModelSpec("matern", d, False, {"kappa": kappa, "alpha": alpha}, sym, source or source_white(d))


def _build_matern_no_range(d, p, source):
    alpha = _as_float(p, "alpha")
    _require(alpha > 0, "matern_no_range requires alpha > 0")

    def f(xi, om):
        return _sq(xi) ** (alpha / 2) + 0j

    sym = Symbol(f, d, isotropic=True, real_valued=True,
                 bound=PolyWeight(1.0, int(math.ceil(alpha / 2))),
                 zero_set=ZeroSet("origin"), sceu="refuted", name=f"|xi|^{alpha:g}")
    return ModelSpec("matern_no_range", d, False, {"alpha": alpha}, sym, source or source_white(d))


def _positive_on_halfline(coeffs) -> float:
    """Minimum of ``p`` on ``[0, inf)``; raises when ``p`` is not strictly positive there."""
    poly = np.polynomial.Polynomial(coeffs)
    _require(poly(0.0) > 0, "markov polynomial must satisfy p(0) > 0")
    if poly.degree() > 0:
        _require(coeffs[-1] > 0, "markov polynomial needs a positive leading coefficient")
        roots = poly.roots()
        real = roots[np.abs(roots.imag) <= 1e-12 * (1 + np.abs(roots.real))].real
        _require(not np.any(real >= 0), "markov polynomial p must be strictly positive on [0, inf)")
    candidates = [0.0]
    if poly.degree() > 1:
        crit = poly.deriv().roots()
        candidates += [c.real for c in crit if abs(c.imag) <= 1e-12 and c.real > 0]
    m = float(min(poly(c) for c in candidates))
    _require(m > 0, "markov polynomial p must be strictly positive on [0, inf)")
    return m


def _build_markov(d, p, source):
    coeffs = p.get("coefficients")
    _require(coeffs is not None and len(coeffs) >= 1, "markov requires polynomial coefficients")
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    _require(coeffs.size >= 1, "markov polynomial must be nonzero")
    pmin = _positive_on_halfline(coeffs)
    deg = coeffs.size - 1
    poly = np.polynomial.Polynomial(coeffs)

    def f(xi, om):
        return np.sqrt(poly(_sq(xi))) + 0j

    sym = Symbol(f, d, isotropic=True, real_valued=True,
                 bound=PolyWeight(math.sqrt(float(np.sum(np.abs(coeffs)))), int(math.ceil(deg / 2))),
                 zero_set=EMPTY, sceu="certified", witness=PolyWeight(1.0 / math.sqrt(pmin), 0),
                 name="p(|xi|^2)^(1/2)")
    return ModelSpec("markov", d, False, {"coefficients": coeffs.tolist()}, sym, source or source_white(d))


def _build_stein(d, p, source):
    a, b = _as_float(p, "a"), _as_float(p, "b")
    s, kappa = _as_float(p, "s"), _as_float(p, "kappa")
    alpha, beta, nu = _as_float(p, "alpha"), _as_float(p, "beta"), _as_float(p, "nu")
    _require(a > 0 and b > 0, "stein requires a > 0 and b > 0")
    _require(s * s + kappa * kappa > 0, "stein requires s^2 + kappa^2 > 0")
    s2, k2 = s * s, kappa * kappa

    def base(xi, om):
        return b * (s2 + om * om) ** beta + a * (k2 + _sq(xi)) ** alpha

    def f(xi, om):
        return base(xi, om) ** (nu / 2) + 0j

    sceu, witness, bound = "unknown", None, PolyWeight(math.inf, 0)
    if alpha > 0 and beta > 0:
        bmin = b * s2 ** beta + a * k2 ** alpha
        deg = int(math.ceil(max(alpha, beta)))
        cmax = b * max(1.0, s2) ** beta + a * max(1.0, k2) ** alpha
        if nu >= 0:
            witness = PolyWeight(bmin ** (-nu / 2), 0)
            bound = PolyWeight(cmax ** (nu / 2), int(math.ceil(deg * nu / 2)))
        else:
            witness = PolyWeight(cmax ** (-nu / 2), int(math.ceil(deg * (-nu) / 2)))
            bound = PolyWeight(bmin ** (nu / 2), 0)
        sceu = "certified"
    sym = Symbol(f, d, has_time=True, isotropic=True, real_valued=True, bound=bound,
                 zero_set=EMPTY if sceu == "certified" else ZeroSet("unknown"),
                 sceu=sceu, witness=witness, name="stein")
    params = dict(a=a, b=b, s=s, kappa=kappa, alpha=alpha, beta=beta, nu=nu)
    return ModelSpec("stein", d, True, params, sym, source or source_white(d, True))


def admissible_time_sign(beta: float) -> float:
    c, _ = _time_factor(beta)
    return -1.0 if c < 0 else 1.0


def _build_evolving_matern(d, p, source):
    beta, a = _as_float(p, "beta"), _as_float(p, "a")
    kappa, alpha = _as_float(p, "kappa"), _as_float(p, "alpha")
    _require(beta > 0, "evolving_matern requires beta > 0")
    _require(a > 0, "evolving_matern requires a > 0")
    _require(kappa > 0, "evolving_matern requires kappa > 0")
    auto = admissible_time_sign(beta)
    flags = []
    if p.get("s_beta") is not None:
        s_beta = _as_float(p, "s_beta")
        _require(s_beta in (1.0, -1.0), "s_beta must be +1 or -1")
        if s_beta != auto and _time_factor(beta)[0] != 0.0:
            flags.append("s_beta override violates g_R cos(beta pi/2) >= 0")
    else:
        s_beta = auto
    g = matern_symbol(d, kappa, alpha, scale=a, sign=s_beta)
    params = dict(beta=beta, a=a, kappa=kappa, alpha=alpha, s_beta=s_beta)
    return _evolution("evolving_matern", d, params, beta, g, source, flags)


def _build_advection(d, p, source):
    kappa = _as_float(p, "kappa")
    _require(kappa > 0, "advection_diffusion requires kappa > 0")
    v = np.asarray(p.get("v", np.zeros(d)), dtype=float).reshape(-1)
    _require(v.size == d, f"advection velocity v must have length {d}")
    sigma = np.asarray(p.get("Sigma", np.eye(d)), dtype=float).reshape(d, d)
    _require(np.allclose(sigma, sigma.T, rtol=0, atol=1e-14), "Sigma must be symmetric")
    eig = np.linalg.eigvalsh(sigma)
    _require(eig[0] > 0, "Sigma must be positive-definite")
    k2 = kappa * kappa
    iso = bool(np.all(v == 0) and np.allclose(sigma, sigma[0, 0] * np.eye(d)))

    def real(xi, om):
        return k2 + np.einsum("...i,ij,...j->...", xi, sigma, xi) + 0j

    def f(xi, om):
        return real(xi, om) + 1j * (xi @ v)

    const = k2 + float(eig[-1]) + float(np.linalg.norm(v))
    g_r = Symbol(real, d, isotropic=iso, real_valued=True, bound=PolyWeight(k2 + float(eig[-1]), 1),
                 zero_set=EMPTY, sceu="certified", witness=PolyWeight(1.0 / k2, 0), name="kappa^2 + xi'Sigma xi")
    g = Symbol(f, d, isotropic=iso, real_valued=bool(np.all(v == 0)), bound=PolyWeight(const, 1),
               zero_set=EMPTY, sceu="certified", witness=PolyWeight(1.0 / k2, 0),
               name="kappa^2 + xi'Sigma xi + i v'xi", real_part_symbol=g_r)
    params = dict(kappa=kappa, v=v.tolist(), Sigma=sigma.tolist())
    if source is None:
        source = source_separable(white_density(d), white_density(1))
    return _evolution("advection_diffusion", d, params, 1.0, g, source)


def _build_langevin(d, p, source):
    D, k, eta0 = _as_float(p, "D"), _as_float(p, "k"), _as_float(p, "eta0")
    eta1, nu = _as_float(p, "eta1", 0.0), _as_float(p, "nu", 0.0)
    _require(D > 0 and k > 0 and eta0 > 0, "langevin requires D, k, eta0 > 0")
    _require(eta1 >= 0 and nu >= 0, "langevin requires eta1 >= 0 and nu >= 0")
    C = D / (2 * k ** d * eta0)
    c1, c2 = eta1 * k ** 2, nu * k ** 4

    def f(xi, om):
        r2 = _sq(xi)
        return C * (1.0 + c1 * r2 + c2 * r2 * r2) + 0j

    deg = 2 if c2 > 0 else (1 if c1 > 0 else 0)
    g = Symbol(f, d, isotropic=True, real_valued=True, bound=PolyWeight(C * (1 + c1 + c2), deg),
               zero_set=EMPTY, sceu="certified", witness=PolyWeight(1.0 / C, 0), name="langevin")
    params = dict(D=D, k=k, eta0=eta0, eta1=eta1, nu=nu, C=C)
    return _evolution("langevin", d, params, 1.0, g, source)


def _laplacian_symbol(d, coef, name):
    def f(xi, om):
        return coef * _sq(xi) + 0j

    return Symbol(f, d, isotropic=True, real_valued=True, bound=PolyWeight(coef, 1),
                  zero_set=ZeroSet("origin"), sceu="refuted", name=name)


def _build_heat(d, p, source):
    a = _as_float(p, "a")
    _require(a > 0, "heat requires diffusivity a > 0")
    g = _laplacian_symbol(d, a, f"{a:g}|xi|^2")
    return _evolution("heat", d, {"a": a}, 1.0, g, source, zero_set=ZeroSet("origin"), sceu="refuted", witness=None)


def _build_wave(d, p, source, name="wave", homogeneous=None, extra=None):
    c = _as_float(p, "c")
    _require(c > 0, f"{name} requires propagation velocity c > 0")
    g = _laplacian_symbol(d, c * c, f"{c * c:g}|xi|^2")
    params = {"c": c}
    params.update(extra or {})
    return _evolution(name, d, params, 2.0, g, source, homogeneous=homogeneous,
                      zero_set=ZeroSet("cone", speed=c), sceu="refuted", witness=None)


def _build_waving_matern(d, p, source):
    kappa, alpha = _as_float(p, "kappa"), _as_float(p, "alpha")
    a = _as_float(p, "a", 1.0)
    _require(kappa > 0 and a > 0, "waving_matern requires kappa > 0 and a > 0")
    c = _as_float(p, "c")
    _require(c > 0, "waving_matern requires propagation velocity c > 0")
    base = matern_density(d, kappa, alpha, scale=a)
    hom = SpectralDensity(lambda xi, om: np.zeros(np.shape(xi)[:-1]), d, True, isotropic=True,
                          cone=ConeComponent(c, base), name="waving_matern",
                          params={"c": c, "kappa": kappa, "alpha": alpha, "a": a}, is_zero=False)
    if source is None:
        source = SourceTerm("zero", zero_density(d, True))
    return _build_wave(d, {"c": c}, source, name="waving_matern", homogeneous=hom,
                       extra={"kappa": kappa, "alpha": alpha, "a": a})


_BUILDERS = {
    "matern": _build_matern,
    "matern_no_range": _build_matern_no_range,
    "markov": _build_markov,
    "stein": _build_stein,
    "evolving_matern": _build_evolving_matern,
    "advection_diffusion": _build_advection,
    "langevin": _build_langevin,
    "heat": _build_heat,
    "wave": _build_wave,
    "waving_matern": _build_waving_matern,
}
MODEL_NAMES = tuple(_BUILDERS)
_TIME_MODELS = {"stein", "evolving_matern", "advection_diffusion", "langevin", "heat", "wave", "waving_matern"}


def build_model(name: str, d: int, params: Optional[dict] = None, source: Optional[SourceTerm] = None,
                **kw) -> ModelSpec:
    """Construct a named model; parameters may be passed as a dict or keywords."""
    if name not in _BUILDERS:
        raise ModelNotFound(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise ModelError("spatial dimension d must be an integer >= 1")
    p = dict(params or {})
    p.update(kw)
    if source is not None:
        want_time = name in _TIME_MODELS
        if source.dim != d or source.has_time != want_time:
            raise ModelError("source term dimensions do not match the model")
    return _BUILDERS[name](int(d), p, source)


def density_from_dict(doc: dict, dim: int) -> SpectralDensity:
    """Density document: ``{"kind": "white" | "matern" | "zero", ...,"atoms": [...]}``."""
    kind = doc.get("kind", "white")
    if kind in ("white", "white_noise"):
        dens = white_density(dim)
    elif kind == "matern":
        dens = matern_density(dim, float(doc["kappa"]), float(doc["alpha"]), float(doc.get("scale", 1.0)))
    elif kind == "zero":
        dens = zero_density(dim)
    else:
        raise ModelError(f"unknown density kind {kind!r}")
    atoms = []
    for item in doc.get("atoms", []):
        loc = tuple(float(v) for v in item["location"])
        if len(loc) != dim:
            raise ModelError("atom location dimension mismatch")
        w = float(item["weight"])
        atoms.append(Atom(loc, w))
        mirror = tuple(-v for v in loc)
        if mirror != loc and not any(a.location == mirror for a in atoms) and \
                not any(tuple(float(v) for v in it["location"]) == mirror for it in doc.get("atoms", [])):
            atoms.append(Atom(mirror, w))
    if atoms:
        from dataclasses import replace

        dens = replace(dens, atoms=tuple(atoms))
    return dens


def _source_from_dict(doc: Optional[dict], d: int, has_time: bool) -> Optional[SourceTerm]:
    if not doc:
        return None
    kind = doc.get("kind", "white_noise")
    if kind == "white_noise":
        return source_white(d, has_time)
    if kind == "zero":
        return SourceTerm("zero", zero_density(d, has_time))
    if kind == "separable":
        if not has_time:
            raise ModelError("separable sources need a space-time model")
        return source_separable(density_from_dict(doc.get("spatial", {}), d),
                                density_from_dict(doc.get("temporal", {}), 1))
    if kind == "custom":
        if has_time:
            raise ModelError("custom density documents are spatial only; use separable for space-time")
        return SourceTerm("custom", density_from_dict(doc.get("density", {}), d))
    raise ModelError(f"unknown source kind {kind!r}")


def model_from_dict(doc: dict) -> ModelSpec:
    """Build a model from ``{"name", "d", "params", "source"}``."""
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    for key in ("name", "d"):
        if key not in doc:
            raise ModelError(f"model document lacks {key!r}")
    name, d = doc["name"], doc["d"]
    if name not in _BUILDERS:
        raise ModelNotFound(f"unknown model {name!r}")
    if not isinstance(d, int) or d < 1:
        raise ModelError("d must be an integer >= 1")
    src = _source_from_dict(doc.get("source"), d, name in _TIME_MODELS)
    model = build_model(name, d, doc.get("params", {}), source=src)
    from dataclasses import replace

    return replace(model, document=dict(doc))


def solution_spectral_density(model: ModelSpec, force: bool = False) -> SpectralDensity:
    """Density ``source / |g|^2`` of the stationary solution, plus homogeneous parts.

    Without ``force``, existence is checked first (immediate for
    SCEU-certified symbols). Points where ``g = 0`` evaluate to ``inf``.
    Source atoms on zeros of ``g`` make the division problem unsolvable.
    """
    if not force and model.symbol.sceu != "certified":
        from .analysis import check_existence

        rep = check_existence(model)
        if not rep.exists:
            raise ModelError(f"no stationary solution for {model.name}: {rep.verdict}")
    sym, src = model.symbol, model.source.density
    sf, gf = src.func, sym.func
    spatial_sym = not sym.has_time

    def f(xi, om):
        num = sf(xi, om)
        g2 = np.abs(gf(xi, None if spatial_sym else om)) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(g2 > 0, num / np.where(g2 > 0, g2, 1.0), np.where(num > 0, np.inf, 0.0))
        return out

    atoms = []
    for atom in src.atoms:
        loc = np.asarray(atom.location)
        xi = loc[: model.d]
        om = loc[model.d] if model.has_time else None
        gv = abs(complex(sym(xi, om)))
        if gv == 0.0 and atom.weight > 0:
            raise ModelError("source atom located on a zero of the symbol: no stationary solution")
        atoms.append(Atom(atom.location, atom.weight / gv ** 2))
    cone = None
    if model.homogeneous is not None:
        atoms.extend(model.homogeneous.atoms)
        cone = model.homogeneous.cone
    singular = ("origin",) if sym.zero_set.kind == "origin" else ()
    if sym.zero_set.kind == "cone":
        singular = ("cone",)
    return SpectralDensity(
        f, model.d, model.has_time, isotropic=sym.isotropic and src.isotropic,
        atoms=tuple(atoms), cone=cone, singular_points=singular,
        name=f"solution[{model.name}]", params=dict(model.params), is_zero=src.is_zero,
    )


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class Classification:
    """Space-time structure of the solution covariance; ``None`` for spatial models."""

    separable: Optional[bool]
    symmetric: Optional[bool]
    method: str

    def to_dict(self) -> dict:
        return {"separable": self.separable, "symmetric": self.symmetric, "method": self.method}


def _white_in_time(source: SourceTerm) -> bool:
    if source.kind == "white_noise":
        return True
    return source.kind == "separable" and source.temporal is not None and source.temporal.name == "white_noise"


def classify(model: ModelSpec, n_samples: int = 2000, seed: int = 0) -> Classification:
    """Separability and time symmetry of an evolution model's solution.

    For ``(d/dt)^beta U + L_g U = X_S (x) W_T`` the density factorizes iff
    ``g`` is real and constant, and is even in ``omega`` iff ``g`` is real or
    ``beta`` is an even integer. Other space-time models fall back to
    ``classify_numeric``.
    """
    if not model.has_time:
        return Classification(None, None, "spatial model")
    if not model.is_evolution or not _white_in_time(model.source):
        return classify_numeric(model, seed=seed)
    xi, _ = sample_frequencies(model.d, n_samples, seed)
    g = np.asarray(model.spatial_symbol(xi), dtype=complex)
    scale = np.maximum(np.abs(g), 1e-300)
    real = bool(np.all(np.abs(g.imag) <= 1e-12 * scale))
    constant = bool(np.all(np.abs(g - g[0]) <= 1e-12 * max(abs(g[0]), 1e-300)))
    even_integer = float(model.beta).is_integer() and int(model.beta) % 2 == 0
    return Classification(real and constant, real or even_integer, "evolution criterion")


def classify_numeric(model: ModelSpec, n_space: int = 40, n_time: int = 31, seed: int = 0,
                     rtol: float = 1e-9) -> Classification:
    """Rank-one test of the log density and an ``omega -> -omega`` comparison on a sampled grid."""
    if not model.has_time:
        return Classification(None, None, "spatial model")
    dens = solution_spectral_density(model, force=True)
    xi, _ = sample_frequencies(model.d, n_space, seed, spread=1.0)
    om = np.concatenate([-np.logspace(-1, 1, n_time // 2)[::-1], [0.0], np.logspace(-1, 1, n_time // 2)])
    xx = np.repeat(xi[:, None, :], om.size, axis=1)
    oo = np.broadcast_to(om[None, :], xx.shape[:-1])
    with np.errstate(divide="ignore"):
        f = dens(xx, oo)
        f_rev = dens(xx, -oo)
        logf = np.log(f)
    finite = np.isfinite(logf)
    keep_rows = finite.all(axis=1)
    lf = logf[keep_rows]
    resid = lf - lf.mean(axis=1, keepdims=True) - lf.mean(axis=0, keepdims=True) + lf.mean()
    scale = max(float(np.max(np.abs(lf))), 1.0)
    separable = bool(np.max(np.abs(resid)) <= rtol * scale)
    both = np.isfinite(f) & np.isfinite(f_rev)
    symmetric = bool(np.all(np.abs(f[both] - f_rev[both]) <= 1e-12 * np.maximum(np.abs(f[both]), 1e-300)))
    return Classification(separable, symmetric, "sampled density")
