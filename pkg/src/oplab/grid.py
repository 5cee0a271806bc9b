"""Orlicz-Sobolev norms on cell-centred grids over boxes in R^1 and R^2.

Lebesgue measure is approximated by cell volumes, weak derivatives by finite
differences (``numpy.gradient``: central in the interior, second-order
one-sided at the walls) and composition with an affine self-map by
multilinear interpolation of the cell-centre samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import MapEscapesDomain, PreconditionViolated, SingularMatrix, ValidationError
from .orlicz import DEFAULT_TOL, OrliczFunction, luxemburg_norm

__all__ = [
    "GridDomain",
    "GridFunction",
    "AffineMap",
    "ChainRuleReport",
    "BoundReport",
    "VanishingReport",
    "BUILTIN_FUNCTIONS",
    "builtin_function",
    "weak_derivative",
    "sobolev_norm",
    "compose",
    "affine_rn_derivative",
    "verify_chain_rule",
    "verify_boundedness",
    "verify_kernel_derivative_vanishing",
]

ESCAPE_TOL = 1e-12
SNAP_TOL = 1e-9  # in units of h


@dataclass(frozen=True)
class GridDomain:
    bounds: tuple
    resolution: tuple

    def __init__(self, bounds: Sequence[Sequence[float]], resolution: int | Sequence[int]):
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        n = len(bounds)
        if n not in (1, 2):
            raise ValidationError(f"grid dimension must be 1 or 2, got {n}")
        if isinstance(resolution, (int, np.integer)):
            resolution = (int(resolution),) * n
        resolution = tuple(int(m) for m in resolution)
        if len(resolution) != n:
            raise ValidationError("one resolution per axis")
        for lo, hi in bounds:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValidationError(f"bad interval [{lo}, {hi}]")
        if any(m < 4 for m in resolution):
            raise ValidationError("need at least 4 cells per axis")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def unit(cls, n: int, m: int) -> "GridDomain":
        return cls([(0.0, 1.0)] * n, m)

    @property
    def n(self) -> int:
        return len(self.bounds)

    @property
    def shape(self) -> tuple:
        return self.resolution

    @property
    def h(self) -> tuple:
        return tuple((hi - lo) / m for (lo, hi), m in zip(self.bounds, self.resolution))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.h)

    @property
    def volume(self) -> float:
        return math.prod(hi - lo for lo, hi in self.bounds)

    def axis_centers(self, i: int) -> np.ndarray:
        lo, _ = self.bounds[i]
        return lo + (np.arange(self.resolution[i]) + 0.5) * self.h[i]

    def mesh(self) -> tuple:
        """Cell-centre coordinate arrays, ``indexing='ij'`` (row-major cells)."""
        return tuple(np.meshgrid(*(self.axis_centers(i) for i in range(self.n)), indexing="ij"))

    def centers(self) -> np.ndarray:
        """Cell centres as an array of shape ``shape + (n,)``."""
        return np.stack(self.mesh(), axis=-1)

    def corners(self) -> np.ndarray:
        grids = np.meshgrid(*self.bounds, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def contains(self, points: np.ndarray, tol: float = ESCAPE_TOL) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        inside = np.ones(points.shape[:-1], dtype=bool)
        for i, (lo, hi) in enumerate(self.bounds):
            inside &= (points[..., i] >= lo - tol) & (points[..., i] <= hi + tol)
        return inside

    def float_weights(self) -> np.ndarray:
        return np.full(self.shape, self.cell_volume)

    def refined(self, factor: int = 2) -> "GridDomain":
        return GridDomain(self.bounds, tuple(m * factor for m in self.resolution))

    def to_dict(self) -> dict:
        return {"n": self.n, "bounds": [list(b) for b in self.bounds], "resolution": list(self.resolution)}


@dataclass(frozen=True, eq=False)
class GridFunction:
    domain: GridDomain
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.size == math.prod(self.domain.shape):
            s = s.reshape(self.domain.shape)
        if s.shape != self.domain.shape:
            raise ValidationError(f"samples of shape {s.shape} do not fit grid {self.domain.shape}")
        if not np.all(np.isfinite(s)):
            raise ValidationError("grid samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_callable(cls, domain: GridDomain, fn: Callable) -> "GridFunction":
        """Sample ``fn(x)`` or ``fn(x, y)`` at cell centres."""
        values = np.broadcast_to(fn(*domain.mesh()), domain.shape)
        return cls(domain, values)

    @classmethod
    def zeros(cls, domain: GridDomain) -> "GridFunction":
        return cls(domain, np.zeros(domain.shape))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.domain, self.samples + other.samples)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.domain, self.samples * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``T(x) = A x + b``.  Jacobian entries are the entries of ``A``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        b = np.atleast_1d(np.array(self.b, dtype=float))
        if A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise ValidationError(f"incompatible affine map shapes A{A.shape}, b{b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValidationError("affine map entries must be finite")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def M(self) -> float:
        """Sup bound on the partial derivatives of the components of T."""
        return float(np.abs(self.A).max())

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.A))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.A.T + self.b

    def then(self, other: "AffineMap") -> "AffineMap":
        """``other ∘ self``."""
        return AffineMap(other.A @ self.A, other.A @ self.b + other.b)

    def inverse(self) -> "AffineMap":
        if abs(self.det) < 1e-14:
            raise SingularMatrix(f"|det A| = {abs(self.det):.3g} is numerically zero")
        Ainv = np.linalg.inv(self.A)
        return AffineMap(Ainv, -Ainv @ self.b)

    def check_self_map(self, domain: GridDomain) -> None:
        """Affine images of a box are spanned by the images of its corners."""
        if self.n != domain.n:
            raise ValidationError(f"map acts on R^{self.n}, domain lives in R^{domain.n}")
        images = self(domain.corners())
        if not np.all(domain.contains(images)):
            raise MapEscapesDomain("T maps a corner of the box outside the box")

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def reflection(cls, domain: GridDomain, axis: int = 0) -> "AffineMap":
        """Mirror the box along one axis."""
        A = np.eye(domain.n)
        b = np.zeros(domain.n)
        A[axis, axis] = -1.0
        lo, hi = domain.bounds[axis]
        b[axis] = lo + hi
        return cls(A, b)

    @classmethod
    def contraction(cls, domain: GridDomain, factor: float = 0.5) -> "AffineMap":
        """Shrink every axis towards the lower corner."""
        lo = np.array([b[0] for b in domain.bounds])
        A = factor * np.eye(domain.n)
        return cls(A, lo - A @ lo)

    @classmethod
    def swap(cls, domain: GridDomain) -> "AffineMap":
        if domain.n != 2 or domain.bounds[0] != domain.bounds[1]:
            raise ValidationError("swap needs a square 2-d box")
        return cls(np.array([[0.0, 1.0], [1.0, 0.0]]), np.zeros(2))

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "b": self.b.tolist()}


# Closed forms of the builtin scenario functions; ``mid`` and ``r`` are the
# per-axis box midpoint and quarter side length.
def _coords(domain: GridDomain):
    X = domain.mesh()
    mid = [0.5 * (lo + hi) for lo, hi in domain.bounds]
    r = [0.25 * (hi - lo) for lo, hi in domain.bounds]
    return X, mid, r


def _hat(domain):
    X, mid, r = _coords(domain)
    return math.prod(np.maximum(0.0, 1.0 - np.abs(x - c) / q) for x, c, q in zip(X, mid, r))


def _bump(domain):
    X, mid, r = _coords(domain)
    out = np.ones(domain.shape)
    for x, c, q in zip(X, mid, r):
        s2 = ((x - c) / q) ** 2
        inside = s2 < 1
        vals = np.zeros(domain.shape)
        vals[inside] = np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
        out *= vals
    return out


def _sine(domain):
    X = domain.mesh()
    return math.prod(np.sin(math.pi * (x - lo) / (hi - lo)) for x, (lo, hi) in zip(X, domain.bounds))


BUILTIN_FUNCTIONS = {
    "zero": lambda d: np.zeros(d.shape),
    "linear": lambda d: sum(d.mesh()),
    "quadratic": lambda d: sum(x**2 for x in d.mesh()),
    "product": lambda d: math.prod(d.mesh()),
    "hat": _hat,
    "bump": _bump,
    "sine": _sine,
}


def builtin_function(name: str, domain: GridDomain) -> GridFunction:
    try:
        fn = BUILTIN_FUNCTIONS[name]
    except KeyError:
        raise ValidationError(f"unknown builtin function {name!r}; choose from {sorted(BUILTIN_FUNCTIONS)}") from None
    return GridFunction(domain, np.broadcast_to(fn(domain), domain.shape))


def weak_derivative(f: GridFunction, axis: int) -> GridFunction:
    d = f.domain
    if not 0 <= axis < d.n:
        raise ValidationError(f"axis {axis} out of range for a {d.n}-d grid")
    return GridFunction(d, np.gradient(f.samples, d.h[axis], axis=axis, edge_order=2))


def sobolev_norm(phi: OrliczFunction, f: GridFunction, domain: GridDomain | None = None, tol: float = DEFAULT_TOL) -> float:
    """``||f||_phi + sum_i ||d_i f||_phi`` on the grid carrier."""
    domain = domain or f.domain
    total = luxemburg_norm(phi, f, domain, tol)
    for i in range(domain.n):
        total += luxemburg_norm(phi, weak_derivative(f, i), domain, tol)
    return total


def _interpolate(f: GridFunction, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation; points in the outer half-cell reuse the wall stencil."""
    d = f.domain
    idx, frac = [], []
    for i in range(d.n):
        lo, _ = d.bounds[i]
        u = (points[..., i] - lo) / d.h[i] - 0.5
        # a point that is a cell centre up to rounding reads that sample exactly
        nearest = np.rint(u)
        u = np.where(np.abs(u - nearest) < SNAP_TOL, nearest, u)
        j = np.clip(np.floor(u).astype(int), 0, d.resolution[i] - 2)
        idx.append(j)
        frac.append(u - j)
    out = np.zeros(points.shape[:-1])
    for corner in np.ndindex(*(2,) * d.n):
        weight = np.ones(points.shape[:-1])
        sel = []
        for i, c in enumerate(corner):
            weight = weight * (frac[i] if c else 1.0 - frac[i])
            sel.append(idx[i] + c)
        out += weight * f.samples[tuple(sel)]
    return out


def compose(f: GridFunction, T: AffineMap, domain: GridDomain | None = None) -> GridFunction:
    """Samples of ``f ∘ T`` at the cell centres."""
    domain = domain or f.domain
    if T.n != domain.n:
        raise ValidationError(f"map acts on R^{T.n}, domain lives in R^{domain.n}")
    images = T(domain.centers())
    if not np.all(domain.contains(images)):
        raise MapEscapesDomain("T sends a cell centre outside the closed box")
    return GridFunction(domain, _interpolate(f, images))


def affine_rn_derivative(T: AffineMap, domain: GridDomain) -> GridFunction:
    """Density of Lebesgue measure pushed through T: ``|det A|^{-1}`` on ``T(box)``, else 0."""
    det = abs(T.det)
    if det < 1e-14:
        raise SingularMatrix(f"|det A| = {det:.3g} is numerically zero")
    pre = T.inverse()(domain.centers())
    return GridFunction(domain, np.where(domain.contains(pre), 1.0 / det, 0.0))


@dataclass(frozen=True)
class ChainRuleReport:
    max_abs_residual: float
    grid_h: float
    cells_checked: int = 0


def verify_chain_rule(f: GridFunction, T: AffineMap, domain: GridDomain | None = None) -> ChainRuleReport:
    """Max interior gap between ``d_i(f∘T)`` and ``sum_k (d_k f ∘ T) A[k, i]``."""
    domain = domain or f.domain
    T.check_self_map(domain)
    fT = compose(f, T, domain)
    df_T = [compose(weak_derivative(f, k), T, domain).samples for k in range(domain.n)]
    interior = _chain_rule_interior(T, domain)
    worst = 0.0
    for i in range(domain.n):
        lhs = weak_derivative(fT, i).samples
        rhs = sum(df_T[k] * T.A[k, i] for k in range(domain.n))
        if interior.any():
            worst = max(worst, float(np.abs(lhs - rhs)[interior].max()))
    return ChainRuleReport(worst, max(domain.h), int(interior.sum()))


def _chain_rule_interior(T: AffineMap, domain: GridDomain) -> np.ndarray:
    """Cells away from the walls whose central stencils only read interpolated values.

    Values of ``f∘T`` at images landing in the outer half-cell are linear
    extrapolations, whose error does not match the interior interpolation
    error; differencing across the two loses an order, like a wall stencil.
    """
    images = T(domain.centers())
    hull = np.ones(domain.shape, dtype=bool)
    for i in range(domain.n):
        c = domain.axis_centers(i)
        eps = 1e-12 * (c[-1] - c[0])
        hull &= (images[..., i] >= c[0] - eps) & (images[..., i] <= c[-1] + eps)
    ok = np.zeros(domain.shape, dtype=bool)
    ok[tuple(slice(1, -1) for _ in range(domain.n))] = True
    ok &= hull
    for i in range(domain.n):
        ok &= np.roll(hull, 1, axis=i) & np.roll(hull, -1, axis=i)
    return ok


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    holds: bool
    slack: float
    rn_sup: float
    M: float


def verify_boundedness(
    phi: OrliczFunction,
    f: GridFunction,
    T: AffineMap,
    domain: GridDomain | None = None,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Check ``||f∘T||_{1,phi} <= ||f_T||_inf (1 + n M) ||f||_{1,phi}`` up to slack h."""
    domain = domain or f.domain
    T.check_self_map(domain)
    rn_sup = float(affine_rn_derivative(T, domain).samples.max())
    lhs = sobolev_norm(phi, compose(f, T, domain), domain, tol)
    rhs = rn_sup * (1 + domain.n * T.M) * sobolev_norm(phi, f, domain, tol)
    slack = max(domain.h)
    return BoundReport(lhs, rhs, lhs <= rhs * (1 + 1e-6) + slack, slack, rn_sup, T.M)


@dataclass(frozen=True)
class VanishingReport:
    max_outside: float
    max_in_band: float
    boundary_band_width: int
    cells_checked: int


def _stencil_touch(mask: np.ndarray, axis: int) -> np.ndarray:
    """Cells whose ``np.gradient(edge_order=2)`` stencil along ``axis`` reads a masked cell."""
    m = np.moveaxis(mask, axis, 0)
    touch = np.zeros_like(m)
    touch[1:-1] = m[:-2] | m[2:]
    touch[0] = m[1] | m[2]
    touch[-1] = m[-2] | m[-3]
    return np.moveaxis(touch, 0, axis)


def verify_kernel_derivative_vanishing(
    f: GridFunction, omega0_mask: np.ndarray, domain: GridDomain | None = None
) -> VanishingReport:
    """Weak derivatives of ``f`` away from the mask, where ``f`` is zero.

    The excluded band is every unmasked cell whose difference stencil reaches
    into the mask: one cell wide in the interior, two at a wall where the
    one-sided stencil is longer.
    """
    domain = domain or f.domain
    mask = np.asarray(omega0_mask, dtype=bool)
    if mask.shape != domain.shape:
        raise ValidationError(f"mask shape {mask.shape} does not match grid {domain.shape}")
    if np.any(f.samples[~mask] != 0):
        raise PreconditionViolated("f is nonzero outside the mask")
    band = np.zeros_like(mask)
    for i in range(domain.n):
        band |= _stencil_touch(mask, i)
    band &= ~mask
    adjacent = np.zeros_like(mask)
    for i in range(domain.n):
        m, a = np.moveaxis(mask, i, 0), np.moveaxis(adjacent, i, 0)
        a[1:] |= m[:-1]
        a[:-1] |= m[1:]
    width = 2 if np.any(band & ~adjacent) else 1
    outside = ~mask & ~band
    grads = np.max([np.abs(weak_derivative(f, i).samples) for i in range(domain.n)], axis=0)
    max_outside = float(grads[outside].max()) if outside.any() else 0.0
    max_in_band = float(grads[band].max()) if band.any() else 0.0
    return VanishingReport(max_outside, max_in_band, width, int(outside.sum()))
