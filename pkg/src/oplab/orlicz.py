"""N-functions, modulars and Luxemburg norms.

Functions on a carrier are plain arrays (or anything with a ``samples``
attribute) aligned with the carrier's atoms or cells.  A carrier is an
:class:`~oplab.measure.AtomicMeasureSpace` or a :class:`~oplab.grid.GridDomain`;
all it has to provide is ``float_weights()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateRange, InvalidOrliczFunction, NonFiniteFunction, ValidationError

__all__ = [
    "OrliczFunction",
    "Power",
    "PowerLog",
    "ExpMinus",
    "Custom",
    "Modular",
    "Delta2Report",
    "eval_phi",
    "modular",
    "luxemburg_norm",
    "delta2_check",
    "orlicz_class_member",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12

_FAMILIES = ("power", "powerlog", "expminus", "custom")


@dataclass(frozen=True)
class OrliczFunction:
    """An N-function ``phi``, evaluated at ``|t|``.

    Use the :func:`Power`, :func:`PowerLog`, :func:`ExpMinus` and :func:`Custom`
    constructors rather than instantiating directly.
    """

    family: str
    p: float | None = None
    label: str = ""
    func: Callable | None = field(default=None, compare=False, repr=False)
    declared_convex: bool = True

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InvalidOrliczFunction(f"unknown family {self.family!r}")
        if self.family == "power" and not (self.p is not None and self.p > 1):
            raise InvalidOrliczFunction(f"Power needs p > 1, got {self.p}")
        if self.family == "powerlog" and not (self.p is not None and self.p >= 1):
            raise InvalidOrliczFunction(f"PowerLog needs p >= 1, got {self.p}")
        if self.family == "custom" and not callable(self.func):
            raise InvalidOrliczFunction("Custom needs a callable evaluator")
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self) -> str:
        if self.family == "power":
            return f"|t|^{self.p:g}"
        if self.family == "powerlog":
            return f"|t|^{self.p:g} log(1+|t|)"
        if self.family == "expminus":
            return "exp|t| - |t| - 1"
        return "custom"

    @property
    def is_builtin(self) -> bool:
        return self.family != "custom"

    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            if self.family == "power":
                out = t**self.p
            elif self.family == "powerlog":
                out = t**self.p * np.log1p(t)
            elif self.family == "expminus":
                # expm1 keeps precision near 0; overflow to inf is intended
                out = np.expm1(t) - t
            else:
                out = _call_custom(self.func, t)
        if out.ndim == 0:
            return float(out)
        return out

    def to_dict(self) -> dict:
        if self.family == "custom":
            raise ValidationError("custom N-functions are not serializable")
        d = {"family": self.family}
        if self.p is not None:
            d["p"] = self.p
        return d


def _call_custom(func, t: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(func(t), dtype=float)
        if out.shape != t.shape:
            raise TypeError
    except (TypeError, ValueError):
        out = np.array([float(func(float(x))) for x in t.ravel()]).reshape(t.shape)
    if np.any(np.isnan(out)) or np.any(out < 0):
        raise InvalidOrliczFunction("custom evaluator returned a negative or NaN value")
    return out


def Power(p: float, label: str = "") -> OrliczFunction:
    return OrliczFunction("power", float(p), label)


def PowerLog(p: float, label: str = "") -> OrliczFunction:
    return OrliczFunction("powerlog", float(p), label)


def ExpMinus(label: str = "") -> OrliczFunction:
    return OrliczFunction("expminus", None, label)


def Custom(func: Callable, declared_convex: bool = True, label: str = "", depth: int = 20) -> OrliczFunction:
    """Wrap a user evaluator on ``[0, inf)``; validated by sampling.

    The checks are necessary conditions only: positivity off zero, the two
    limits of ``phi(t)/t`` along ``2^{±k}`` for ``k <= depth`` and midpoint
    convexity on a grid.  ``phi`` must also be continuous, which sampling
    cannot confirm.
    """
    phi = OrliczFunction("custom", None, label or "custom", func, bool(declared_convex))
    _sample_validate(phi, depth)
    return phi


def _sample_validate(phi: OrliczFunction, depth: int) -> None:
    if phi(0.0) != 0.0:
        raise InvalidOrliczFunction("phi(0) must be 0")
    ks = np.arange(1, depth + 1)
    small = 2.0 ** (-ks)
    big = 2.0**ks
    vs, vb = phi(small), phi(big)
    if np.any(vs <= 0) or np.any(vb <= 0):
        raise InvalidOrliczFunction("phi must be positive away from 0")
    rs, rb = vs / small, vb / big
    if np.any(np.diff(rs) > 1e-12 * rs[:-1]) or not rs[-1] < rs[0]:
        raise InvalidOrliczFunction("phi(t)/t does not decrease towards 0 along t = 2^-k")
    rb = rb[np.isfinite(rb)]
    if rb.size < 2 or np.any(np.diff(rb) < -1e-12 * rb[:-1]) or not rb[-1] > rb[0]:
        raise InvalidOrliczFunction("phi(t)/t does not grow along t = 2^k")
    grid = np.concatenate([[0.0], np.geomspace(2.0**-depth, 2.0**depth, 8 * depth)])
    a, b = np.meshgrid(grid, grid)
    lhs = phi((a + b) / 2)
    rhs = (phi(a) + phi(b)) / 2
    finite = np.isfinite(rhs)
    if np.any(lhs[finite] > rhs[finite] * (1 + 1e-12) + 1e-300):
        raise InvalidOrliczFunction("phi fails midpoint convexity on the sample grid")


def eval_phi(phi: OrliczFunction, t: float) -> float:
    return float(phi(t))


@dataclass(frozen=True)
class Modular:
    value: float

    def __post_init__(self):
        if not self.value >= 0:
            raise ValidationError(f"modular must be >= 0, got {self.value}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value


def _values(f) -> np.ndarray:
    f = getattr(f, "samples", f)
    return np.asarray(f, dtype=float).ravel()


def _weights(space) -> np.ndarray:
    return np.asarray(space.float_weights(), dtype=float).ravel()


def _aligned(f, space) -> tuple[np.ndarray, np.ndarray]:
    v, w = _values(f), _weights(space)
    if v.shape != w.shape:
        raise ValidationError(f"function has {v.size} samples, carrier has {w.size} atoms/cells")
    return v, w


def _modular_sum(phi: OrliczFunction, v: np.ndarray, w: np.ndarray) -> float:
    pos = w > 0
    terms = phi(v[pos])
    with np.errstate(over="ignore", invalid="ignore"):
        total = float(np.sum(terms * w[pos]))
    return total if not math.isnan(total) else math.inf


def modular(phi: OrliczFunction, f, space) -> Modular:
    """``sum phi(|f|) dmu`` over atoms, or the cell-volume Riemann sum on a grid."""
    v, w = _aligned(f, space)
    return Modular(_modular_sum(phi, v, w))


def luxemburg_norm(phi: OrliczFunction, f, space, tol: float = DEFAULT_TOL) -> float:
    """``inf {k > 0 : modular(phi, f/k) <= 1}`` by bisection, to relative accuracy ``tol``.

    The returned value is the upper end of the final bracket, so the modular
    of ``f / norm`` never exceeds 1.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    v, w = _aligned(f, space)
    if not np.all(np.isfinite(v)):
        raise NonFiniteFunction("function has infinite or NaN samples")
    v = np.abs(v[w > 0])
    w = w[w > 0]
    peak = float(v.max()) if v.size else 0.0
    if peak == 0.0:
        return 0.0

    def rho(k: float) -> float:
        return _modular_sum(phi, v / k, w)

    hi = peak * max(1.0, float(w.sum()))
    while rho(hi) > 1:
        hi *= 2
    lo = hi / 2
    while rho(lo) <= 1:
        hi = lo
        lo /= 2
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if rho(mid) <= 1:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class Delta2Report:
    """Outcome of a Delta_2 check on ``[u_lo, u_hi]``.

    ``satisfied_on_sample`` is the analytic verdict for builtin families and the
    sample-based heuristic (``sample_verdict``) for custom ones.  ``u_lo`` plays
    the role of the threshold above which the doubling bound is required.
    """

    satisfied_on_sample: bool
    max_ratio: float
    witness_u: float
    sample_verdict: bool
    analytic: bool | None
    u: tuple
    ratios: tuple


_DELTA2_ANALYTIC = {"power": True, "powerlog": True, "expminus": False}


def delta2_check(phi: OrliczFunction, u_lo: float, u_hi: float, samples: int = 64) -> Delta2Report:
    """Sample ``phi(2u)/phi(u)`` on a geometric grid.

    Heuristic: the ratio bound looks satisfied when the samples are finite and
    the upper half of the range does not push the ratio past its lower-half
    maximum.  Finitely many samples never decide the condition for a custom
    ``phi``.
    """
    if not (0 < u_lo < u_hi):
        raise DegenerateRange(f"need 0 < u_lo < u_hi, got [{u_lo}, {u_hi}]")
    if samples < 2:
        raise ValidationError("need at least 2 samples")
    u = np.geomspace(u_lo, u_hi, samples)
    with np.errstate(over="ignore", invalid="ignore"):
        r = phi(2 * u) / phi(u)
    finite = bool(np.all(np.isfinite(r)))
    i_max = int(np.nanargmax(np.where(np.isfinite(r), r, np.inf)))
    max_ratio = float(r[i_max])
    half = samples // 2
    sample_verdict = finite and float(r[half:].max()) <= float(r[: half + 1].max()) * (1 + 1e-9)
    analytic = _DELTA2_ANALYTIC.get(phi.family)
    verdict = analytic if analytic is not None else sample_verdict
    return Delta2Report(
        satisfied_on_sample=verdict,
        max_ratio=max_ratio,
        witness_u=float(u[i_max]),
        sample_verdict=sample_verdict,
        analytic=analytic,
        u=tuple(u.tolist()),
        ratios=tuple(r.tolist()),
    )


def orlicz_class_member(phi: OrliczFunction, f, space) -> bool:
    """Finite modular at scale 1.

    On a finite carrier this holds for every finite-valued ``f``, whether or not
    ``phi`` is Delta_2; the class and the space only separate on infinite carriers.
    """
    return modular(phi, f, space).finite
