"""
Symbol functions of pseudo-differential operators.

A symbol ``g`` acts on frequency space: spatial frequencies ``xi`` with shape
``(..., d)`` and, for space-time symbols, a temporal frequency ``omega`` with
shape ``(...)``. Symbols are immutable and carry metadata that downstream
modules rely on: a polynomial upper bound, a zero-set descriptor and an SCEU
status (``|g|`` bounded below by the inverse of a strictly positive
polynomial), certified by a witness polynomial.

Witness polynomials all have the form ``p(xi, omega) = C (1 + |xi|^2 + omega^2)^m``
which is closed under products and under (ceil-rounded) real powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "FrequencyPoint",
    "PolyWeight",
    "ZeroSet",
    "Symbol",
    "SymbolError",
    "eval_symbol",
    "combine",
    "check_hermitian",
    "HermitianReport",
    "evolution_symbol",
    "check_evolution_sceu",
    "EvolutionSCEU",
    "constant_symbol",
    "zero_symbol",
    "fractional_time_symbol",
    "sample_frequencies",
]

SCEU_STATES = ("certified", "refuted", "unknown")


class SymbolError(ValueError):
    """Invalid symbol construction or evaluation."""


@dataclass(frozen=True)
class FrequencyPoint:
    spatial: tuple
    temporal: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "spatial", tuple(float(v) for v in np.atleast_1d(self.spatial)))
        if len(self.spatial) < 1:
            raise SymbolError("frequency point needs at least one spatial component")

    @property
    def dim(self) -> int:
        return len(self.spatial)


@dataclass(frozen=True)
class PolyWeight:
    """The function ``const * (1 + |xi|^2 + omega^2)^degree``.

    Used both as polynomial upper bound (``|g| <= weight``) and as SCEU
    witness (``|g| * weight >= 1``).
    """

    const: float
    degree: int

    def __call__(self, xi, omega=None):
        xi = np.asarray(xi, dtype=float)
        s = 1.0 + np.sum(xi * xi, axis=-1)
        if omega is not None:
            s = s + np.asarray(omega, dtype=float) ** 2
        return self.const * s ** self.degree

    def __mul__(self, other: "PolyWeight") -> "PolyWeight":
        return PolyWeight(self.const * other.const, self.degree + other.degree)

    def power(self, r: float) -> "PolyWeight":
        """Smallest weight of this form dominating ``self ** r`` (``r >= 0``)."""
        if r < 0:
            raise SymbolError("PolyWeight.power needs r >= 0")
        return PolyWeight(self.const ** r, int(math.ceil(self.degree * r - 1e-12)))


@dataclass(frozen=True)
class ZeroSet:
    """Descriptor of ``g^{-1}({0})``.

    kind is one of ``empty``, ``origin``, ``cone`` (space-time cone
    ``|omega| = speed |xi|``), ``samples`` (explicit point list) or ``unknown``.
    """

    kind: str
    speed: Optional[float] = None
    points: tuple = ()

    def __post_init__(self):
        if self.kind not in ("empty", "origin", "cone", "samples", "unknown"):
            raise SymbolError(f"unknown zero-set kind {self.kind!r}")
        if self.kind == "cone" and not (self.speed and self.speed > 0):
            raise SymbolError("cone zero set needs a positive speed")

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.speed is not None:
            out["speed"] = self.speed
        if self.points:
            out["points"] = [list(p) for p in self.points]
        return out


EMPTY = ZeroSet("empty")
UNKNOWN = ZeroSet("unknown")


def _union(a: ZeroSet, b: ZeroSet) -> ZeroSet:
    if a.kind == "empty":
        return b
    if b.kind == "empty":
        return a
    if a == b and a.kind in ("origin", "cone"):
        return a
    if a.kind == "samples" and b.kind == "samples":
        return ZeroSet("samples", points=tuple(dict.fromkeys(a.points + b.points)))
    return UNKNOWN


@dataclass(frozen=True, eq=False)
class Symbol:
    """A complex symbol function with checkable metadata.

    ``func(xi, omega)`` must be vectorized: ``xi`` has shape ``(..., dim)``,
    ``omega`` shape ``(...)`` (``None`` for purely spatial symbols).

    Parameters
    ----------
    real_valued : bool
        ``g_I`` is identically zero.
    real_part : Symbol, optional
        Metadata-carrying symbol for ``g_R``; built on demand otherwise.
    """

    func: Callable
    dim: int
    has_time: bool = False
    isotropic: bool = False
    real_valued: bool = False
    bound: PolyWeight = PolyWeight(math.inf, 0)
    zero_set: ZeroSet = UNKNOWN
    sceu: str = "unknown"
    witness: Optional[PolyWeight] = None
    name: str = "symbol"
    real_part_symbol: Optional["Symbol"] = None
    constant: Optional[complex] = None

    def __post_init__(self):
        if self.dim < 1:
            raise SymbolError("symbol dimension must be >= 1")
        if self.sceu not in SCEU_STATES:
            raise SymbolError(f"sceu must be one of {SCEU_STATES}")
        if self.sceu == "certified" and self.witness is None:
            raise SymbolError("a certified symbol needs a witness polynomial")

    @property
    def poly_bound_degree(self) -> int:
        return self.bound.degree

    def __call__(self, xi, omega=None) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 0 or xi.shape[-1] != self.dim:
            raise SymbolError(f"expected spatial frequencies with last axis {self.dim}, got {xi.shape}")
        if self.has_time:
            if omega is None:
                omega = np.zeros(xi.shape[:-1])
            omega = np.broadcast_to(np.asarray(omega, dtype=float), xi.shape[:-1])
        out = self.func(xi, omega if self.has_time else None)
        return np.asarray(out, dtype=complex)

    def real_part(self) -> "Symbol":
        """Symbol of ``g_R``."""
        if self.real_part_symbol is not None:
            return self.real_part_symbol
        if self.real_valued:
            return self
        f = self.func
        return Symbol(
            func=lambda xi, om: np.real(f(xi, om)),
            dim=self.dim,
            has_time=self.has_time,
            isotropic=self.isotropic,
            real_valued=True,
            bound=self.bound,
            name=f"Re({self.name})",
        )

    def imag_part(self) -> "Symbol":
        f = self.func
        return Symbol(
            func=lambda xi, om: np.imag(f(xi, om)),
            dim=self.dim,
            has_time=self.has_time,
            real_valued=True,
            bound=self.bound,
            name=f"Im({self.name})",
            constant=0.0 if self.real_valued else None,
        )

    def metadata(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "has_time": self.has_time,
            "isotropic": self.isotropic,
            "real_valued": self.real_valued,
            "poly_bound_degree": self.bound.degree,
            "zero_set": self.zero_set.to_dict(),
            "sceu": self.sceu,
            "witness_degree": None if self.witness is None else self.witness.degree,
        }


def eval_symbol(symbol: Symbol, freq: FrequencyPoint) -> complex:
    """Evaluate a symbol at a single frequency point."""
    if freq.dim != symbol.dim:
        raise SymbolError(f"frequency dimension {freq.dim} does not match symbol dimension {symbol.dim}")
    if freq.temporal is not None and not symbol.has_time:
        raise SymbolError("temporal frequency given for a purely spatial symbol")
    xi = np.asarray(freq.spatial, dtype=float)
    om = None
    if symbol.has_time:
        om = np.asarray(0.0 if freq.temporal is None else freq.temporal)
    return complex(symbol(xi, om))


def constant_symbol(value: complex, dim: int, has_time: bool = False, name: Optional[str] = None) -> Symbol:
    value = complex(value)
    mag = abs(value)
    real = value.imag == 0.0

    def f(xi, om):
        return np.full(np.shape(xi)[:-1], value, dtype=complex)

    certified = mag > 0
    return Symbol(
        func=f,
        dim=dim,
        has_time=has_time,
        isotropic=True,
        real_valued=real,
        bound=PolyWeight(mag, 0),
        zero_set=EMPTY if certified else ZeroSet("unknown"),
        sceu="certified" if certified else "refuted",
        witness=PolyWeight(1.0 / mag, 0) if certified else None,
        name=name or f"const({value})",
        constant=value,
    )


def zero_symbol(dim: int, has_time: bool = False) -> Symbol:
    return constant_symbol(0.0, dim, has_time, name="0")


def _align(a: Symbol, b: Symbol) -> None:
    if a.dim != b.dim:
        raise SymbolError(f"symbol dimensions differ: {a.dim} vs {b.dim}")


def _lift(s: Symbol) -> Callable:
    """Evaluator that ignores omega when the symbol is purely spatial."""
    if s.has_time:
        return s.func
    f = s.func
    return lambda xi, om: f(xi, None)


def combine(op: str, a: Symbol, b: Optional[Symbol] = None, r: Optional[float] = None) -> Symbol:
    """Algebra of symbols: ``sum``, ``product``, ``modulus_squared``, ``real_power``.

    Metadata is propagated conservatively: statuses that cannot be proven
    from the operands' metadata become ``unknown``.

    ``real_power`` computes ``|a|^r`` for real-valued nonnegative or for any
    symbol through its modulus.
    """
    if op in ("sum", "product"):
        if b is None:
            raise SymbolError(f"{op} needs two operands")
        _align(a, b)
        has_time = a.has_time or b.has_time
        fa, fb = _lift(a), _lift(b)
        iso = a.isotropic and b.isotropic
        real = a.real_valued and b.real_valued
        if op == "sum":
            if b.constant == 0:
                return a
            if a.constant == 0:
                return b
            bound = PolyWeight(a.bound.const + b.bound.const, max(a.bound.degree, b.bound.degree))
            return Symbol(
                func=lambda xi, om: fa(xi, om) + fb(xi, om),
                dim=a.dim, has_time=has_time, isotropic=iso, real_valued=real,
                bound=bound, zero_set=UNKNOWN, sceu="unknown",
                name=f"({a.name} + {b.name})",
            )
        certified = a.sceu == "certified" and b.sceu == "certified"
        refuted = a.sceu == "refuted" or b.sceu == "refuted"
        return Symbol(
            func=lambda xi, om: fa(xi, om) * fb(xi, om),
            dim=a.dim, has_time=has_time, isotropic=iso, real_valued=real,
            bound=a.bound * b.bound,
            zero_set=_union(a.zero_set, b.zero_set),
            sceu="certified" if certified else ("refuted" if refuted else "unknown"),
            witness=a.witness * b.witness if certified else None,
            name=f"({a.name} * {b.name})",
        )
    if op == "modulus_squared":
        fa = a.func
        certified = a.sceu == "certified"
        return Symbol(
            func=lambda xi, om: np.abs(fa(xi, om)) ** 2 + 0j,
            dim=a.dim, has_time=a.has_time, isotropic=a.isotropic, real_valued=True,
            bound=a.bound * a.bound,
            zero_set=a.zero_set,
            sceu=a.sceu,
            witness=a.witness * a.witness if certified else None,
            name=f"|{a.name}|^2",
        )
    if op == "real_power":
        if r is None:
            raise SymbolError("real_power needs an exponent r")
        r = float(r)
        fa = a.func
        if r < 0:
            if a.zero_set.kind not in ("empty",) or a.sceu != "certified":
                raise SymbolError(
                    "negative power needs a symbol with empty zero set and certified SCEU"
                )
            bound = a.witness.power(-r)
            witness = a.bound.power(-r) if math.isfinite(a.bound.const) else None
            sceu = "certified" if witness is not None else "unknown"
            zero_set = EMPTY
        else:
            bound = a.bound.power(r)
            witness = a.witness.power(r) if a.sceu == "certified" and r > 0 else None
            sceu = a.sceu if r > 0 else "certified"
            if r == 0:
                witness = PolyWeight(1.0, 0)
            zero_set = a.zero_set if r > 0 else EMPTY
        return Symbol(
            func=lambda xi, om: np.abs(fa(xi, om)) ** r + 0j,
            dim=a.dim, has_time=a.has_time, isotropic=a.isotropic, real_valued=True,
            bound=bound, zero_set=zero_set, sceu=sceu, witness=witness,
            name=f"|{a.name}|^{r:g}",
        )
    raise SymbolError(f"unknown combine operation {op!r}")


def sample_frequencies(dim: int, n: int, seed: int, has_time: bool = False, spread: float = 2.0):
    """Seeded frequency sweep spanning ``10**-spread .. 10**spread`` in magnitude."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim, int(has_time), 0x5EED]))
    direction = rng.standard_normal((n, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = 10.0 ** rng.uniform(-spread, spread, size=n)
    xi = direction * radius[:, None]
    omega = None
    if has_time:
        omega = rng.choice([-1.0, 1.0], size=n) * 10.0 ** rng.uniform(-spread, spread, size=n)
    return xi, omega


@dataclass(frozen=True)
class HermitianReport:
    max_violation: float
    max_relative: float
    passed: bool
    n_samples: int


def check_hermitian(symbol: Symbol, n_samples: int = 10_000, seed: int = 0) -> HermitianReport:
    """Sample ``|g(-x) - conj(g(x))|`` on a seeded sweep."""
    if n_samples < 1:
        raise SymbolError("n_samples must be >= 1")
    xi, om = sample_frequencies(symbol.dim, n_samples, seed, symbol.has_time)
    g_plus = symbol(xi, om)
    g_minus = symbol(-xi, None if om is None else -om)
    viol = np.abs(g_minus - np.conj(g_plus))
    scale = 1.0 + np.abs(g_plus)
    rel = viol / scale
    return HermitianReport(
        max_violation=float(np.max(viol)),
        max_relative=float(np.max(rel)),
        passed=bool(np.all(viol <= 1e-12 * scale)),
        n_samples=n_samples,
    )


def _time_factor(beta: float):
    """Return ``(cos(beta pi/2), sin(beta pi/2))`` with exact zeros at integers."""
    c = math.cos(beta * math.pi / 2)
    s = math.sin(beta * math.pi / 2)
    if float(beta).is_integer():
        k = int(beta) % 4
        c, s = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][k]
    return c, s


def fractional_time_symbol(beta: float) -> Callable:
    """``omega -> (i omega)^beta`` with ``sgn(0) = 0``."""
    if not beta > 0:
        raise SymbolError("beta must be > 0")
    c, s = _time_factor(beta)

    def f(omega):
        omega = np.asarray(omega, dtype=float)
        mag = np.abs(omega) ** beta
        return mag * c + 1j * np.sign(omega) * mag * s

    return f


def evolution_symbol(beta: float, g_spatial: Symbol) -> Symbol:
    """Space-time symbol ``(i omega)^beta + g(xi)`` of an evolution equation."""
    if not beta > 0:
        raise SymbolError("beta must be > 0")
    if g_spatial.has_time:
        raise SymbolError("evolution_symbol expects a purely spatial symbol")
    tf = fractional_time_symbol(beta)
    gf = g_spatial.func

    def f(xi, om):
        return tf(om) + gf(xi, None)

    bound = PolyWeight(1.0 + g_spatial.bound.const, max(int(math.ceil(beta / 2)), g_spatial.bound.degree))
    prop = check_evolution_sceu(beta, g_spatial)
    if prop.holds:
        sceu, witness, zero_set = "certified", g_spatial.real_part().witness, EMPTY
    else:
        sceu, witness, zero_set = "unknown", None, UNKNOWN
    c, _ = _time_factor(beta)
    g_r = g_spatial.real_part()
    return Symbol(
        func=f,
        dim=g_spatial.dim,
        has_time=True,
        isotropic=g_spatial.isotropic,
        real_valued=False,
        bound=bound,
        zero_set=zero_set,
        sceu=sceu,
        witness=witness,
        name=f"(i w)^{beta:g} + {g_spatial.name}",
        real_part_symbol=Symbol(
            func=lambda xi, om: np.abs(np.asarray(om, float)) ** beta * c + g_r.func(xi, None),
            dim=g_spatial.dim, has_time=True, isotropic=g_spatial.isotropic,
            real_valued=True, bound=bound, name=f"Re(({beta:g}) evolution)",
        ),
    )


@dataclass(frozen=True)
class EvolutionSCEU:
    holds: Optional[bool]
    reason: str
    indeterminate: bool = False


def check_evolution_sceu(beta: float, g_spatial: Symbol, n_samples: int = 2000, seed: int = 0) -> EvolutionSCEU:
    """Necessary and sufficient SCEU test for ``(i omega)^beta + g`` uniform in ``g_I``.

    Holds iff ``g_R`` is SCEU-certified and ``g_R cos(beta pi/2) >= 0``;
    the sign condition is checked on a seeded sweep and skipped for odd
    integer ``beta``.
    """
    if not beta > 0:
        raise SymbolError("beta must be > 0")
    g_r = g_spatial.real_part()
    c, _ = _time_factor(beta)
    xi, _ = sample_frequencies(g_spatial.dim, n_samples, seed)
    xi = np.concatenate([np.zeros((1, g_spatial.dim)), xi])
    if c != 0.0:
        vals = np.real(g_r(xi))
        if np.any(vals * c < 0):
            return EvolutionSCEU(False, "sign condition g_R cos(beta pi/2) >= 0 violated on sweep")
    if g_r.sceu == "certified":
        w = g_r.witness(xi)
        if np.any(np.abs(g_r(xi)) * w < 1.0 - 1e-12):
            return EvolutionSCEU(False, "witness polynomial of g_R fails on sweep")
        return EvolutionSCEU(True, "g_R is SCEU-certified" + ("" if c != 0.0 else "; cos(beta pi/2) = 0"))
    if g_r.sceu == "refuted":
        return EvolutionSCEU(False, "g_R does not satisfy the SCEU")
    # SCEU status unknown: probe for zeros of g_R before giving up
    vals = np.abs(g_r(xi))
    if np.min(vals) == 0.0:
        return EvolutionSCEU(False, "g_R vanishes on the sweep, SCEU impossible")
    return EvolutionSCEU(None, "SCEU status of g_R unknown", indeterminate=True)
