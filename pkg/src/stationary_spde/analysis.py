"""
Existence and uniqueness of stationary solutions, homogeneous solutions, and
spatial traces of evolution equations.

The existence test decides whether ``mu_U = mu_X / |g|^2`` is a slow-growing
measure: for some order ``N`` the integral of ``mu_U / (1 + |xi|^2 + omega^2)^N``
is finite. Two things can go wrong and are probed separately:

* local singularities on the zero set of ``g`` (independent of ``N``);
* growth at infinity (decides the minimal ``N``).

Both are judged from dyadic shell masses ``M_k``. Near a singular point
``M(r) ~ r^s`` must have ``s > 0``; at infinity ``s < 0``. A least-squares slope
within 0.05 of the critical value is reported as ``borderline`` unless the
asymptotic slope (deepest five shells) sits on the critical value itself,
which is the logarithmically divergent case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .densities import Atom, ConeComponent, SpectralDensity, unitary_factor
from .models import ModelError, ModelSpec, solution_spectral_density
from .symbols import PolyWeight, Symbol, _time_factor, check_evolution_sceu, sample_frequencies

__all__ = [
    "AnalysisError",
    "ExistenceReport",
    "UniquenessReport",
    "TraceReport",
    "check_existence",
    "check_uniqueness",
    "homogeneous_spectral",
    "i_beta",
    "i_beta_trapezoid",
    "i_beta_closed_form",
    "trace_analysis",
    "soem_trace",
]

BAND = 0.05
CRITICAL_TOL = 1e-3
LEVELS = np.arange(4, 21)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class AnalysisError(ValueError):
    """Request outside the analysable class (reported with a reason)."""


@dataclass
class ExistenceReport:
    exists: Optional[bool]
    N: Optional[int]
    unique: Optional[bool]
    finite: bool
    verdict: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def function_valued(self) -> bool:
        return self.finite

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "N": self.N,
            "unique": self.unique,
            "finite": self.finite,
            "function_valued": self.function_valued,
            "verdict": self.verdict,
            "diagnostics": self.diagnostics,
        }


@dataclass
class UniquenessReport:
    unique: Optional[bool]
    zero_set: dict
    verdict: str
    min_abs_g: Optional[float] = None


def _sphere_area(dim: int) -> float:
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def _directions(dim: int, isotropic: bool, seed: int, count: int = 8) -> np.ndarray:
    if isotropic or dim == 1:
        if dim == 1 and not isotropic:
            return np.array([[1.0], [-1.0]])
        e = np.zeros((1, dim))
        e[0, 0] = 1.0
        return e
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim, 0xD1]))
    u = rng.standard_normal((count, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _shell_masses(F, dim: int, dirs: np.ndarray, outward: bool, levels=LEVELS) -> np.ndarray:
    """Masses of ``F`` on dyadic shells ``2^k <= r < 2^(k+1)`` (``outward``) or ``2^-(k+1) <= r < 2^-k``."""
    a = levels.astype(float)
    lo, hi = (a, a + 1) if outward else (-(a + 1), -a)
    log2r = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * _GL_X[None, :]
    r = 2.0 ** log2r
    pts = r[..., None, None] * dirs[None, None, :, :]
    vals = F(pts.reshape(-1, dim)).reshape(r.shape + (dirs.shape[0],))
    vals = np.nan_to_num(np.mean(vals, axis=-1), nan=0.0, posinf=np.inf)
    integrand = vals * r ** dim * math.log(2.0)
    return _sphere_area(dim) * 0.5 * (integrand @ _GL_W)


def _power_slope(masses: np.ndarray, outward: bool, levels=LEVELS):
    """Slope ``s`` of ``log2 M`` against ``log2 r`` over all and the deepest five shells."""
    if np.any(np.isinf(masses)):
        return math.inf if outward else -math.inf, None
    if np.all(masses <= 0):
        return -math.inf if outward else math.inf, None
    x = levels.astype(float) if outward else -levels.astype(float)
    m = np.maximum(masses, 1e-300)
    y = np.log2(m)
    s_all = float(np.polyfit(x, y, 1)[0])
    s_deep = float(np.polyfit(x[-5:], y[-5:], 1)[0])
    return s_all, s_deep


def _classify(margin: float, deep_margin: Optional[float]) -> str:
    """``margin > 0`` means convergent; margin measured from the critical value."""
    if margin > BAND:
        return "convergent"
    if margin < -BAND:
        return "divergent"
    if deep_margin is not None and abs(deep_margin) <= CRITICAL_TOL:
        return "critical"
    return "borderline"


def _shell_verdict(F, dim, dirs, outward):
    s_all, s_deep = _power_slope(_shell_masses(F, dim, dirs, outward), outward)
    sign = -1.0 if outward else 1.0
    margin = sign * s_all
    deep = None if s_deep is None else sign * s_deep
    return {"exponent": s_all, "deep_exponent": s_deep, "class": _classify(margin, deep)}


class _OmegaMarginal:
    """``xi -> int f(xi, w) weight_N(xi, w) dw`` by trapezoid in ``t = log|w|``."""

    def __init__(self, f, dim, t_lo=-60.0, t_hi=200.0, dt=0.05, N_max=8):
        self.f, self.dim, self.N_max = f, dim, N_max
        self.t = np.arange(t_lo, t_hi + dt / 2, dt)
        self.dt = dt
        self.w = np.exp(self.t)
        self.eps = math.exp(t_lo)

    def __call__(self, xi, N: Optional[int] = None) -> np.ndarray:
        """Weighted marginals; ``N=None`` returns all orders, shape ``(N_max+1, n)``."""
        xi = np.asarray(xi, dtype=float)
        n = xi.shape[0]
        out = np.zeros((self.N_max + 1, n))
        chunk = max(1, 400_000 // self.t.size)
        for s in range(0, n, chunk):
            x = xi[s: s + chunk]
            m = x.shape[0]
            xr = np.repeat(x, self.t.size, axis=0)
            r2 = np.sum(x * x, axis=1)
            with np.errstate(all="ignore"):
                acc = np.zeros((m, self.t.size))
                for sign in (1.0, -1.0):
                    om = np.tile(sign * self.w, m)
                    acc += np.nan_to_num(self.f(xr, om).reshape(m, -1), nan=0.0, posinf=0.0)
                acc *= self.w[None, :]
                center = np.nan_to_num(self.f(x, np.zeros(m)), nan=0.0, posinf=0.0) * 2 * self.eps
                logbase = np.log1p(r2[:, None] + self.w[None, :] ** 2)
                for k in range(self.N_max + 1):
                    wk = np.exp(-k * logbase) if k else 1.0
                    vals = acc * wk
                    tr = self.dt * (vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1]))
                    out[k, s: s + m] = tr + center * (1 + r2) ** (-k)
        return out if N is None else out[N]


def _local_window(f, dim):
    marg = _OmegaMarginal(f, dim, t_lo=-60.0, t_hi=0.0, N_max=0)
    return lambda xi: marg(xi, 0)


def _omega_tail(f, xi0: np.ndarray, N: int):
    """Dyadic shells in ``|omega|`` at fixed ``xi0``."""
    r2 = float(np.sum(xi0 * xi0))

    def F1(pts):
        om = pts[:, 0]
        xi = np.broadcast_to(xi0, (om.size, xi0.size))
        with np.errstate(all="ignore"):
            v = f(xi, om) + f(xi, -om)
        return 0.5 * v * (1.0 + r2 + om * om) ** (-N)

    # one-dimensional shells: area factor 2 accounts for +-omega; halve above
    return _shell_verdict(F1, 1, np.array([[1.0]]), outward=True)


def _cone_probe(f, dim, speed, seed, n_points=6):
    """Exponent of ``f ~ delta^-p`` transversal to the cone ``|omega| = c|xi|``."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim, 0xC0]))
    deltas = 2.0 ** -LEVELS.astype(float)
    worst = None
    for _ in range(n_points):
        u = rng.standard_normal(dim)
        u /= np.linalg.norm(u)
        r0 = 10 ** rng.uniform(-0.5, 0.5)
        sgn = rng.choice([-1.0, 1.0])
        xi0, om0 = r0 * u, sgn * speed * r0
        normal = np.concatenate([-speed * u, [sgn]]) / math.sqrt(1 + speed * speed)
        pts = np.concatenate([xi0, [om0]])[None, :] + deltas[:, None] * normal[None, :]
        with np.errstate(all="ignore"):
            vals = f(pts[:, :dim], pts[:, dim])
        if np.all(vals == 0):
            p, p_deep = -math.inf, None
        else:
            y = np.log2(np.maximum(vals, 1e-300))
            x = -LEVELS.astype(float)
            p = -float(np.polyfit(x, y, 1)[0])
            p_deep = -float(np.polyfit(x[-5:], y[-5:], 1)[0])
        # transversal integrability needs p < codimension 1
        rec = {"exponent": p, "deep_exponent": p_deep,
               "class": _classify(1 - p, None if p_deep is None else 1 - p_deep)}
        if worst is None or _rank(rec["class"]) > _rank(worst["class"]):
            worst = rec
    return worst


def _rank(cls: str) -> int:
    return {"convergent": 0, "borderline": 1, "critical": 2, "divergent": 3}[cls]


def _finite_parts_growth(model: ModelSpec, dens: SpectralDensity, N_max: int, seed: int):
    """Minimal ``N`` for the absolutely continuous part; returns ``(N, records, borderline)``."""
    d = model.d
    dirs = _directions(d, dens.isotropic, seed)
    records = []
    borderline = False
    if dens.has_time:
        marg = _OmegaMarginal(dens.func, d, N_max=N_max)
        cache = {}

        def G(N):
            def F(pts):
                key = (N, pts.shape)
                if key not in cache:
                    cache.clear()
                    allN = marg(pts)
                    for k in range(N_max + 1):
                        cache[(k, pts.shape)] = allN[k]
                return cache[key]
            return F

        probe_xi = [np.zeros(d)] + [r * dirs[0] for r in (0.5, 2.0)]
    for N in range(N_max + 1):
        if dens.has_time:
            rec = _shell_verdict(G(N), d, dirs, outward=True)
            tails = [_omega_tail(dens.func, x0, N) for x0 in probe_xi]
            tail = max(tails, key=lambda t: _rank(t["class"]))
            cls = max(rec["class"], tail["class"], key=_rank)
            rec = {"N": N, "spatial": rec, "temporal_tail": tail, "class": cls}
        else:
            base = dens.func

            def F(pts, N=N):
                with np.errstate(all="ignore"):
                    return base(pts, None) * (1 + np.sum(pts * pts, axis=1)) ** (-N)

            rec = dict(_shell_verdict(F, d, dirs, outward=True), N=N)
        records.append(rec)
        if rec["class"] == "convergent":
            return N, records, borderline
        if rec["class"] == "borderline":
            borderline = True
    return None, records, borderline


def _cone_growth(cone: ConeComponent, N_max: int, seed: int):
    base = cone.spatial
    c2 = cone.speed ** 2
    dirs = _directions(base.dim, base.isotropic, seed)
    records = []
    for N in range(N_max + 1):
        def F(pts, N=N):
            return base(pts) * (1 + (1 + c2) * np.sum(pts * pts, axis=1)) ** (-N)

        rec = dict(_shell_verdict(F, base.dim, dirs, outward=True), N=N)
        records.append(rec)
        if rec["class"] == "convergent":
            return N, records
    return None, records


def _local_checks(model: ModelSpec, dens: SpectralDensity, seed: int) -> list:
    zs = model.symbol.zero_set
    d = model.d
    out = []
    if zs.kind == "origin":
        dirs = _directions(d, dens.isotropic, seed)
        F = _local_window(dens.func, d) if dens.has_time else (lambda pts: dens.func(pts, None))
        rec = _shell_verdict(F, d, dirs, outward=False)
        rec["component"] = "origin"
        out.append(rec)
    elif zs.kind == "cone":
        rec = _cone_probe(dens.func, d, zs.speed, seed)
        rec["component"] = f"cone(c={zs.speed:g})"
        out.append(rec)
        # the cone apex sits at the origin; its local behaviour is covered by the surface probes
    elif zs.kind == "samples":
        D = dens.total_dim
        dirs = _directions(D, False, seed, count=16)
        for p in zs.points:
            p = np.asarray(p, dtype=float)

            def F(pts, p=p):
                z = pts + p[None, :]
                with np.errstate(all="ignore"):
                    if dens.has_time:
                        return dens.func(z[:, :d], z[:, d])
                    return dens.func(z, None)

            rec = _shell_verdict(F, D, dirs, outward=False)
            rec["component"] = f"point{tuple(p.tolist())}"
            out.append(rec)
    return out


def check_existence(model: ModelSpec, N_max: int = 8, force_quadrature: bool = False,
                    seed: int = 0) -> ExistenceReport:
    """Decide whether ``mu_X / |g|^2`` is slow-growing and find the minimal order ``N``.

    Verdicts are ``exists``, ``no_solution``, ``borderline`` and ``not_found``
    (no convergent order up to ``N_max``).
    """
    sym = model.symbol
    unique = {"empty": True, "unknown": None}.get(sym.zero_set.kind, False)
    diag: dict = {"zero_set": sym.zero_set.to_dict(), "sceu": sym.sceu}
    try:
        dens = solution_spectral_density(model, force=True)
    except ModelError as exc:
        diag["atoms"] = str(exc)
        return ExistenceReport(False, None, unique, False, "no_solution", diag)

    if model.source.density.is_zero:
        # only the homogeneous component remains
        N = 0
        if dens.cone is not None:
            N, recs = _cone_growth(dens.cone, N_max, seed)
            diag["growth"] = recs
        if dens.atoms and N is not None:
            N = max(N, 0)
        return ExistenceReport(True, N, unique, N == 0, "exists" if N is not None else "not_found", diag)

    if sym.sceu == "certified" and not force_quadrature:
        N, recs, border = _finite_parts_growth(model, dens, N_max, seed)
        diag["growth"] = recs
        diag["short_circuit"] = "sceu"
        return ExistenceReport(True, N, True, N == 0, "exists", diag)

    local = _local_checks(model, dens, seed)
    diag["local"] = local
    worst = max((r["class"] for r in local), key=_rank, default="convergent")
    if sym.zero_set.kind == "unknown":
        xi, om = sample_frequencies(model.d, 4000, seed, model.has_time)
        m = float(np.min(np.abs(sym(xi, om))))
        diag["min_abs_g"] = m
        if m == 0.0:
            return ExistenceReport(None, None, None, False, "borderline", diag)
    if worst in ("divergent", "critical"):
        return ExistenceReport(False, None, unique, False, "no_solution", diag)
    N, recs, border = _finite_parts_growth(model, dens, N_max, seed)
    diag["growth"] = recs
    if worst == "borderline":
        return ExistenceReport(None, N, unique, False, "borderline", diag)
    if N is None:
        verdict = "borderline" if border else "not_found"
        return ExistenceReport(None, None, unique, False, verdict, diag)
    return ExistenceReport(True, N, unique, N == 0, "exists", diag)


def check_uniqueness(model: ModelSpec, seed: int = 0) -> UniquenessReport:
    zs = model.symbol.zero_set
    if zs.kind == "empty":
        return UniquenessReport(True, zs.to_dict(), "unique")
    if zs.kind == "unknown":
        xi, om = sample_frequencies(model.d, 4000, seed, model.has_time)
        m = float(np.min(np.abs(model.symbol(xi, om))))
        return UniquenessReport(None, zs.to_dict(), "unknown", m)
    return UniquenessReport(False, zs.to_dict(), "not_unique", 0.0)


def homogeneous_spectral(model: ModelSpec, spatial_base: Optional[SpectralDensity] = None,
                         weight: Optional[float] = None) -> SpectralDensity:
    """Spectral measure of stationary solutions of ``L_g U_H = 0``.

    Origin zero set: an atom of mass ``weight`` at the origin; the field is a
    random constant of variance ``(2 pi)^(-D/2) weight``. Cone zero set: the
    cone measure built on ``spatial_base``.
    """
    zs = model.symbol.zero_set
    zero = lambda xi, om: np.zeros(np.shape(xi)[:-1])
    if zs.kind == "origin":
        if weight is None or not weight > 0:
            raise AnalysisError("origin homogeneous solution needs a weight a > 0")
        loc = (0.0,) * (model.d + int(model.has_time))
        return SpectralDensity(zero, model.d, model.has_time, isotropic=True,
                               atoms=(Atom(loc, float(weight)),), name="random_constant",
                               params={"weight": float(weight)})
    if zs.kind == "cone":
        if spatial_base is None:
            raise AnalysisError("cone homogeneous solution needs a spatial base density")
        return SpectralDensity(zero, model.d, True, isotropic=spatial_base.isotropic,
                               cone=ConeComponent(zs.speed, spatial_base), name="cone",
                               params={"c": zs.speed, "base": spatial_base.name})
    raise AnalysisError(f"homogeneous solutions are trivial or unsupported for zero set {zs.kind!r}")


# ---------------------------------------------------------------- spatial traces

def _default_sign(beta: float) -> float:
    c, _ = _time_factor(beta)
    return -1.0 if c < 0 else 1.0


def _i_beta_check(beta, sign):
    if not beta > 0.5:
        raise AnalysisError("I_beta diverges for beta <= 1/2 (not temporally integrable)")
    if sign is None:
        sign = _default_sign(beta)
    if sign not in (1.0, -1.0, 1, -1):
        raise AnalysisError("sign_gR must be +1 or -1")
    c, _ = _time_factor(beta)
    if sign * c == -1.0:
        raise AnalysisError("I_beta diverges: denominator has a double root at theta = 1")
    return float(sign), c


def _i_beta_integrand(beta, sc):
    inv = 1.0 / beta

    def f(t):
        # theta = e^t; multiply the other way round to avoid overflow
        e = np.exp(-t)
        return np.exp((inv - 1.0) * t) / (np.exp(t) + 2.0 * sc + e)

    return f


def i_beta(beta: float, sign_gR: Optional[float] = None, tol: float = 1e-13) -> float:
    """``int_0^inf theta^(1/beta-1) / (theta^2 + 2 theta sign cos(beta pi/2) + 1) d theta``.

    Adaptive Gauss-Legendre in ``t = log theta`` over a range fixed by the
    exponential decay rates ``1/beta`` (left) and ``2 - 1/beta`` (right).
    """
    sign, c = _i_beta_check(beta, sign_gR)
    f = _i_beta_integrand(beta, sign * c)
    lo = -40.0 * beta
    hi = 40.0 / (2.0 - 1.0 / beta)
    x10, w10 = np.polynomial.legendre.leggauss(10)
    x20, w20 = np.polynomial.legendre.leggauss(20)

    def gl(a, b, x, w):
        return 0.5 * (b - a) * float(w @ f(0.5 * (a + b) + 0.5 * (b - a) * x))

    total = 0.0
    stack = [(lo + (hi - lo) * k / 32, lo + (hi - lo) * (k + 1) / 32) for k in range(32)]
    while stack:
        a, b = stack.pop()
        coarse, fine = gl(a, b, x10, w10), gl(a, b, x20, w20)
        if abs(fine - coarse) <= tol * max(abs(fine), 1e-300) or b - a < 1e-6:
            total += fine
        else:
            m = 0.5 * (a + b)
            stack.extend([(a, m), (m, b)])
    return total


def i_beta_trapezoid(beta: float, sign_gR: Optional[float] = None, step: float = 0.01,
                     span: float = 60.0) -> float:
    """Independent oracle: trapezoid rule in ``t = log theta`` over a wide fixed range."""
    sign, c = _i_beta_check(beta, sign_gR)
    f = _i_beta_integrand(beta, sign * c)
    lo = -span * max(beta, 1.0)
    hi = span / min(2.0 - 1.0 / beta, 1.0)
    t = np.arange(lo, hi + step / 2, step)
    v = f(t)
    return float(step * (v.sum() - 0.5 * (v[0] + v[-1])))


def i_beta_closed_form(beta: float, sign_gR: Optional[float] = None) -> float:
    """``pi sin((1-mu) t) / (sin(mu pi) sin t)`` with ``mu = 1/beta``, ``cos t = sign cos(beta pi/2)``."""
    sign, c = _i_beta_check(beta, sign_gR)
    mu = 1.0 / beta
    t = math.acos(max(-1.0, min(1.0, sign * c)))
    if abs(mu - 1.0) < 1e-15:
        return 1.0 if t == 0.0 else t / math.sin(t)
    ratio = (1.0 - mu) if t == 0.0 else math.sin((1.0 - mu) * t) / math.sin(t)
    return math.pi * ratio / math.sin(mu * math.pi)


@dataclass
class TraceReport:
    temporally_integrable: bool
    I_beta: float
    trace_density: SpectralDensity
    trace_symbol: Symbol
    scale_factor: float
    notes: tuple = ()


def _require_real(g: Symbol, seed: int = 0):
    if g.real_valued:
        return
    xi, _ = sample_frequencies(g.dim, 2000, seed)
    if np.max(np.abs(np.imag(g(xi)))) > 0:
        raise AnalysisError("spatial traces are implemented for g_I = 0 only (beta != 1, 2)")


def trace_analysis(beta: float, g_spatial: Symbol, source_spatial: SpectralDensity) -> TraceReport:
    """Spatial trace of ``(d_t^beta + L_g) U = X_S (x) W_T`` with real ``g``.

    The trace density is ``|g_R|^(1/beta-2) I_beta/(pi beta) source`` and the
    trace solves ``L_h U_S = X_S`` with ``h = sqrt(pi beta/I_beta) |g_R|^(1-1/(2 beta))``.
    """
    if not beta > 0.5:
        raise AnalysisError("the solution is not temporally integrable for beta <= 1/2")
    _require_real(g_spatial)
    prop = check_evolution_sceu(beta, g_spatial)
    if not prop.holds:
        raise AnalysisError(f"condition for existence uniform in g_I fails: {prop.reason}")
    g_r = g_spatial.real_part()
    c, _ = _time_factor(beta)
    xi, _ = sample_frequencies(g_spatial.dim, 200, 1)
    sign = 1.0 if c == 0.0 else float(np.sign(np.real(g_r(xi[:1])))[0]) or 1.0
    ib = i_beta(beta, sign)
    scale = ib / (math.pi * beta)
    expo = 1.0 / beta - 2.0
    gf, sf = g_r.func, source_spatial.func

    def dens(x, om):
        return np.abs(np.real(gf(x, None))) ** expo * scale * sf(x, None)

    e = 1.0 - 1.0 / (2.0 * beta)
    K = math.sqrt(1.0 / scale)

    def sym(x, om):
        return K * np.abs(np.real(gf(x, None))) ** e + 0j

    witness = None
    if g_r.witness is not None:
        witness = PolyWeight(g_r.witness.const ** e / K, int(math.ceil(g_r.witness.degree * e - 1e-12)))
    bound = PolyWeight(K * g_r.bound.const ** e, int(math.ceil(g_r.bound.degree * e - 1e-12)))
    trace_sym = Symbol(sym, g_spatial.dim, isotropic=g_spatial.isotropic, real_valued=True, bound=bound,
                       zero_set=g_r.zero_set, sceu="certified" if witness else "unknown",
                       witness=witness, name=f"trace[{g_spatial.name}]")
    td = SpectralDensity(dens, g_spatial.dim, isotropic=g_spatial.isotropic and source_spatial.isotropic,
                         name=f"trace(beta={beta:g})", params={"beta": beta, "I_beta": ib})
    return TraceReport(True, ib, td, trace_sym, scale)


def soem_trace(g_spatial: Symbol, source_spatial: Optional[SpectralDensity] = None) -> TraceReport:
    """Spatial trace of the second-order evolution model (``beta = 2``) with white-in-time source.

    ``g`` may be complex; the trace density is
    ``source / (2 sqrt(2) |g| sqrt(|g| - g_R))``.
    """
    d = g_spatial.dim
    if source_spatial is None:
        from .densities import white_density

        source_spatial = white_density(d)
    xi, _ = sample_frequencies(d, 4000, 3)
    xi = np.concatenate([np.zeros((1, d)), xi])
    gv = g_spatial(xi)
    gap = np.abs(gv) - np.real(gv)
    if np.any(gap <= 0):
        raise AnalysisError("singular trace: |g| - g_R vanishes (g_I = 0 with g_R > 0 somewhere)")
    gf, sf = g_spatial.func, source_spatial.func
    k = 2.0 * math.sqrt(2.0)

    def dens(x, om):
        g = gf(x, None)
        a = np.abs(g)
        return sf(x, None) / (k * a * np.sqrt(a - np.real(g)))

    def sym(x, om):
        g = gf(x, None)
        a = np.abs(g)
        return np.sqrt(k * a * np.sqrt(a - np.real(g))) + 0j

    trace_sym = Symbol(sym, d, isotropic=g_spatial.isotropic, real_valued=True,
                       zero_set=g_spatial.zero_set, sceu="unknown", name=f"soem_trace[{g_spatial.name}]")
    td = SpectralDensity(dens, d, isotropic=g_spatial.isotropic and source_spatial.isotropic,
                         name="soem_trace", params={"beta": 2.0})
    return TraceReport(True, math.pi / 2, td, trace_sym, 1.0 / k)
