"""Finite measures on the circle and on R^d, and their Fourier-Stieltjes transforms.

Circle measures are sums of three parts, each evaluated exactly where possible:

* atoms at :class:`CirclePoint` positions (exact wrapped phases),
* a density sampled on a uniform periodic grid (trapezoid rule, or a closed
  form when the density is analytic),
* a convolution product of small atomic factors, kept symbolic so that the
  transform is the product of per-factor transforms.

Transforms follow ``sigma_hat(n) = sum mass * exp(2 i pi n angle)`` on the
circle and ``sigma_hat(t) = int exp(i t.x) dsigma(x)`` on R^d.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .config import MeasureConfig
from .errors import (
    ConvolutionError,
    DomainError,
    NotProbabilityError,
    NyquistWarning,
    ResolutionError,
    WeightScheduleError,
)
from .fixedpoint import CirclePoint

CIRCLE = "T"
REAL = "R"

_DEFAULTS = MeasureConfig()


def as_index_array(ns) -> np.ndarray:
    """Integer indices as an int64 array when they fit, an object array otherwise."""
    if isinstance(ns, np.ndarray) and ns.dtype.kind in "iu":
        return ns.astype(np.int64)
    items = [int(n) for n in np.atleast_1d(np.asarray(ns, dtype=object))]
    if all(-(2**62) < n < 2**62 for n in items):
        return np.array(items, dtype=np.int64)
    out = np.empty(len(items), dtype=object)
    out[:] = items
    return out


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Atom:
    point: CirclePoint | tuple
    mass: complex


@dataclass(frozen=True, eq=False)
class AtomicFactor:
    """A finite atomic measure used as one factor of a convolution product."""

    atoms: tuple
    weight: float | None = None  # the a_j of a two-point factor, for reporting

    @classmethod
    def two_point(cls, position: CirclePoint, a: float) -> AtomicFactor:
        return cls((Atom(CirclePoint.zero(), 1.0 - a), Atom(position, a)), weight=a)

    @property
    def mass(self) -> complex:
        return sum(complex(at.mass) for at in self.atoms)

    def coefficients(self, ns) -> np.ndarray:
        return _atom_coefficients(self.atoms, ns)

    def is_identity(self) -> bool:
        return (
            len(self.atoms) == 1
            and self.atoms[0].point.word == 0
            and complex(self.atoms[0].mass) == 1
        )


@dataclass(frozen=True, eq=False)
class CircleDensity:
    """Density against normalised Lebesgue measure, sampled at ``j / G``.

    ``analytic`` (when given) returns exact Fourier coefficients; otherwise the
    trapezoid rule is used, exact up to ``bandlimit`` for trigonometric
    polynomials and flagged with :class:`NyquistWarning` above ``G / 2``.
    """

    values: np.ndarray
    bandlimit: int | None = None
    analytic: Callable | None = None
    spec: dict = field(default_factory=dict)

    @property
    def grid_size(self) -> int:
        return len(self.values)

    @property
    def mass(self) -> complex:
        return complex(np.mean(self.values))

    @cached_property
    def _spectrum(self) -> np.ndarray:
        return np.fft.ifft(self.values)

    def coefficients(self, ns) -> np.ndarray:
        ns = as_index_array(ns)
        if self.analytic is not None:
            return np.asarray(self.analytic(ns), dtype=complex)
        G = self.grid_size
        idx = np.array([int(n) % G for n in ns], dtype=np.int64) if ns.dtype == object else np.mod(ns, G)
        out = self._spectrum[idx]
        absn = np.abs(ns.astype(float)) if ns.dtype == object else np.abs(ns)
        if self.bandlimit is not None:
            out = np.where(absn > self.bandlimit, 0.0, out)
        elif np.any(absn > G // 2):
            warnings.warn(
                f"density coefficient requested above Nyquist index {G // 2}; value is aliased",
                NyquistWarning,
                stacklevel=3,
            )
        return out

    def scaled(self, c: complex) -> CircleDensity:
        analytic = None
        if self.analytic is not None:
            base = self.analytic
            analytic = lambda ns: c * np.asarray(base(ns), dtype=complex)  # noqa: E731
        spec = dict(self.spec, weight=complex(self.spec.get("weight", 1.0)) * c) if self.spec else {}
        return CircleDensity(self.values * c, self.bandlimit, analytic, spec)

    # -- constructors -------------------------------------------------
    @classmethod
    def lebesgue(cls, weight: complex = 1.0, grid_size: int = _DEFAULTS.grid_size) -> CircleDensity:
        values = np.full(grid_size, weight, dtype=complex if np.iscomplexobj(weight) else float)
        w = weight

        def analytic(ns):
            return np.where(np.asarray([int(n) == 0 for n in ns]), w, 0.0).astype(complex)

        return cls(values, bandlimit=0, analytic=analytic, spec={"kind": "lebesgue", "weight": weight})

    @classmethod
    def poisson(cls, r: float, weight: float = 1.0, grid_size: int = _DEFAULTS.grid_size) -> CircleDensity:
        """Poisson kernel ``(1 - r^2) / |1 - r e^{2 i pi theta}|^2``, coefficients ``r^|n|``."""
        if not 0 <= r < 1:
            raise ValueError("Poisson radius must lie in [0, 1)")
        theta = np.arange(grid_size) / grid_size
        values = weight * (1 - r * r) / (1 - 2 * r * np.cos(2 * np.pi * theta) + r * r)

        def analytic(ns):
            absn = np.abs(np.asarray([float(n) for n in ns]))
            with np.errstate(under="ignore"):
                return (weight * np.power(r, absn)).astype(complex)

        return cls(values, analytic=analytic, spec={"kind": "poisson", "r": r, "weight": weight})

    @classmethod
    def from_samples(cls, values, bandlimit: int | None = None) -> CircleDensity:
        values = np.asarray(values)
        return cls(values, bandlimit=bandlimit, spec={"kind": "samples"})


@dataclass(frozen=True, eq=False)
class NodeDensity:
    """Absolutely continuous part on R^d as weighted quadrature nodes.

    ``weights`` already include the density value, so the mass is their sum.
    ``tail`` is "compact", "decaying" (truncated but rapidly decaying), or
    "unbounded" (transform refused).
    """

    nodes: np.ndarray
    weights: np.ndarray
    tail: str = "compact"

    @property
    def mass(self) -> complex:
        return complex(np.sum(self.weights))


# ---------------------------------------------------------------------------
# the measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """A finite complex measure on the circle (``domain="T"``) or on R^d.

    Total mass is the sum of atom masses, the density mass, and, when
    ``factors`` is non-empty, the mass of their convolution product.
    """

    domain: str = CIRCLE
    dim: int = 1
    atoms: tuple = ()
    density: CircleDensity | NodeDensity | None = None
    factors: tuple = ()
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.domain not in (CIRCLE, REAL):
            raise DomainError(f"unknown domain {self.domain!r}")
        if self.domain == CIRCLE:
            if self.density is not None and not isinstance(self.density, CircleDensity):
                raise DomainError("circle measures take a CircleDensity")
            keys = [(a.point.word, a.point.ratio) for a in self.atoms]
        else:
            if self.factors:
                raise DomainError("convolution factors are only supported on the circle")
            if self.density is not None and not isinstance(self.density, NodeDensity):
                raise DomainError("measures on R^d take a NodeDensity")
            keys = [tuple(a.point) for a in self.atoms]
        if len(set(keys)) != len(keys):
            raise ValueError("atoms must sit at pairwise distinct points")

    # -- constructors -------------------------------------------------
    @classmethod
    def circle(cls, atoms=(), density=None, factors=(), label="", meta=None) -> SpectralMeasure:
        """Build a circle measure; ``atoms`` is an iterable of ``(point, mass)``
        where ``point`` is a CirclePoint or anything :meth:`CirclePoint.parse` accepts."""
        built = []
        for point, mass in atoms:
            if not isinstance(point, CirclePoint):
                point = CirclePoint.parse(point) if isinstance(point, str) else CirclePoint.from_fraction(point)
            built.append(Atom(point, mass))
        return cls(CIRCLE, 1, tuple(built), density, tuple(factors), label, dict(meta or {}))

    @classmethod
    def real(cls, points=(), masses=(), density=None, label="", meta=None) -> SpectralMeasure:
        pts = [tuple(float(c) for c in np.atleast_1d(p)) for p in points]
        if density is not None:
            dim = density.nodes.shape[1]
        elif pts:
            dim = len(pts[0])
        else:
            dim = 1
        if any(len(p) != dim for p in pts):
            raise DomainError("all points must share one dimension")
        atoms = tuple(Atom(p, m) for p, m in zip(pts, masses))
        return cls(REAL, dim, atoms, density, (), label, dict(meta or {}))

    # -- basic quantities ---------------------------------------------
    @property
    def total_mass(self) -> complex:
        total = sum((complex(a.mass) for a in self.atoms), 0j)
        if self.density is not None:
            total += self.density.mass
        if self.factors:
            total += np.prod([f.mass for f in self.factors])
        return complex(total)

    def is_probability(self, tol: float = 1e-9) -> bool:
        masses = [complex(a.mass) for a in self.atoms]
        for f in self.factors:
            masses.extend(complex(a.mass) for a in f.atoms)
        if any(abs(m.imag) > tol or m.real < -tol for m in masses):
            return False
        if self.density is not None:
            vals = self.density.values if self.domain == CIRCLE else self.density.weights
            vals = np.asarray(vals)
            if np.iscomplexobj(vals) and np.max(np.abs(vals.imag), initial=0.0) > tol:
                return False
            if np.min(vals.real, initial=0.0) < -tol:
                return False
        return abs(self.total_mass - 1) <= tol

    def require_probability(self, tol: float = 1e-9) -> None:
        if not self.is_probability(tol):
            raise NotProbabilityError(f"{self.label or 'measure'} is not a probability measure")

    def atom_mass_at(self, point) -> complex:
        """Mass of the atom exactly at ``point`` (0 if there is none); factors and
        densities are ignored."""
        if self.domain == CIRCLE:
            p = point if isinstance(point, CirclePoint) else CirclePoint.from_fraction(point)
            return sum((complex(a.mass) for a in self.atoms if a.point.word == p.word), 0j)
        p = tuple(float(c) for c in np.atleast_1d(point))
        return sum((complex(a.mass) for a in self.atoms if tuple(a.point) == p), 0j)

    def sum_squared_atoms(self) -> float:
        """``sum |sigma({lambda})|^2`` over the explicit atoms."""
        return float(sum(abs(complex(a.mass)) ** 2 for a in self.atoms))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def _atom_coefficients(atoms, ns, guard_bits: int | None = 28) -> np.ndarray:
    ns = as_index_array(ns)
    out = np.zeros(len(ns), dtype=complex)
    for a in atoms:
        out += complex(a.mass) * a.point.phases(ns, guard_bits)
    return out


def fourier_coefficients(measure: SpectralMeasure, ns) -> np.ndarray:
    """``sigma_hat(n)`` for every integer in ``ns`` (circle measures only)."""
    if measure.domain != CIRCLE:
        raise DomainError("Fourier coefficients at integers need a measure on the circle")
    ns = as_index_array(ns)
    out = _atom_coefficients(measure.atoms, ns)
    if measure.density is not None:
        out = out + measure.density.coefficients(ns)
    if measure.factors:
        prod = np.ones(len(ns), dtype=complex)
        for f in measure.factors:
            prod *= f.coefficients(ns)
        out = out + prod
    return out


def fourier_coefficient(measure: SpectralMeasure, n: int) -> complex:
    """``sigma_hat(n) = int lambda^n dsigma(lambda)`` for a circle measure."""
    return complex(fourier_coefficients(measure, [n])[0])


def fourier_transforms_real(measure: SpectralMeasure, ts) -> np.ndarray:
    """``int exp(i t.x) dsigma(x)`` for each row of ``ts`` (shape (K, d) or (K,))."""
    if measure.domain != REAL:
        raise DomainError("real-variable transform needs a measure on R^d")
    ts = np.asarray(ts, dtype=float)
    if ts.ndim <= 1:
        ts = ts.reshape(-1, measure.dim) if measure.dim > 1 else ts.reshape(-1, 1)
    if ts.shape[1] != measure.dim:
        raise DomainError(f"frequency dimension {ts.shape[1]} != measure dimension {measure.dim}")
    out = np.zeros(len(ts), dtype=complex)
    if measure.atoms:
        pts = np.array([a.point for a in measure.atoms], dtype=float)
        masses = np.array([complex(a.mass) for a in measure.atoms])
        out += np.exp(1j * ts @ pts.T) @ masses
    dens = measure.density
    if dens is not None:
        if dens.tail == "unbounded":
            raise DomainError("density has unbounded support and no decay flag; transform refused")
        for start in range(0, len(ts), 256):
            block = ts[start:start + 256]
            out[start:start + 256] += np.exp(1j * block @ dens.nodes.T) @ dens.weights
    return out


def fourier_transform_real(measure: SpectralMeasure, t) -> complex:
    t = np.atleast_1d(np.asarray(t, dtype=float)).reshape(1, -1)
    return complex(fourier_transforms_real(measure, t)[0])


# ---------------------------------------------------------------------------
# convolution
# ---------------------------------------------------------------------------


def _merge_atoms(atoms) -> tuple:
    merged: dict = {}
    order = []
    for a in atoms:
        key = (a.point.word, a.point.ratio) if isinstance(a.point, CirclePoint) else tuple(a.point)
        if key not in merged:
            merged[key] = [a.point, 0j]
            order.append(key)
        merged[key][1] += complex(a.mass)
    return tuple(Atom(merged[k][0], _real_if_possible(merged[k][1])) for k in order)


def _real_if_possible(z: complex):
    return z.real if z.imag == 0 else z


def _atoms_times_atoms(xs, ys, circle: bool) -> list:
    out = []
    for x in xs:
        for y in ys:
            if circle:
                p = x.point + y.point
            else:
                p = tuple(np.add(x.point, y.point))
            out.append(Atom(p, complex(x.mass) * complex(y.mass)))
    return out


def expand_factors(factors, cap: int = _DEFAULTS.expansion_cap) -> list:
    """Multiply out a convolution product of atomic factors into atoms."""
    if len(factors) > cap:
        raise ConvolutionError(f"refusing to expand {len(factors)} factors (cap {cap})")
    atoms = [Atom(CirclePoint.zero(), 1.0)]
    for f in factors:
        atoms = list(_merge_atoms(_atoms_times_atoms(atoms, f.atoms, True)))
    return atoms


def _atoms_times_density(atoms, dens: CircleDensity) -> CircleDensity:
    G = dens.grid_size
    step = (1 << 128) // G
    values = np.zeros(G, dtype=complex)
    for a in atoms:
        if (1 << 128) % G or a.point.word % step:
            raise ConvolutionError("atom is not on the density grid; shift would need resampling")
        values += complex(a.mass) * np.roll(dens.values, a.point.word // step)
    analytic = None
    if dens.analytic is not None:
        base = dens.analytic
        analytic = lambda ns: base(ns) * _atom_coefficients(atoms, ns)  # noqa: E731
    return CircleDensity(_real_array_if_possible(values), dens.bandlimit, analytic, {"kind": "samples"})


def _density_times_density(d1: CircleDensity, d2: CircleDensity) -> CircleDensity:
    if d1.grid_size != d2.grid_size:
        raise ConvolutionError("density convolution needs matching grid resolutions")
    values = np.fft.ifft(np.fft.fft(d1.values) * np.fft.fft(d2.values)) / d1.grid_size
    analytic = None
    if d1.analytic is not None and d2.analytic is not None:
        a1, a2 = d1.analytic, d2.analytic
        analytic = lambda ns: a1(ns) * a2(ns)  # noqa: E731
    bl = None
    if d1.bandlimit is not None and d2.bandlimit is not None:
        bl = min(d1.bandlimit, d2.bandlimit)
    return CircleDensity(_real_array_if_possible(values), bl, analytic, {"kind": "samples"})


def _real_array_if_possible(values: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(values) and np.max(np.abs(values.imag), initial=0.0) < 1e-13 * max(
        1.0, float(np.max(np.abs(values), initial=0.0))
    ):
        return values.real.copy()
    return values


def convolve(a: SpectralMeasure, b: SpectralMeasure, cap: int = _DEFAULTS.expansion_cap) -> SpectralMeasure:
    """Convolution of two measures on the same group.

    Atoms convolve pairwise; factor products absorb atomic measures as new
    factors; densities convolve on a shared grid. Cross terms that cannot be
    represented exactly raise :class:`ConvolutionError`.
    """
    if a.domain != b.domain or a.dim != b.dim:
        raise DomainError("convolution needs measures on the same group")
    circle = a.domain == CIRCLE
    if not circle:
        if a.density is not None or b.density is not None:
            raise ConvolutionError("densities on R^d are not convolved")
        atoms = _merge_atoms(_atoms_times_atoms(a.atoms, b.atoms, False))
        return SpectralMeasure(REAL, a.dim, atoms, label=f"({a.label})*({b.label})")

    def parts(m):
        out = []
        if m.atoms:
            out.append(("A", list(m.atoms)))
        if m.density is not None:
            out.append(("D", m.density))
        if m.factors:
            out.append(("F", [f for f in m.factors if not f.is_identity()]))
        return out

    atoms: list = []
    densities: list = []
    products: list = []
    for ka, va in parts(a):
        for kb, vb in parts(b):
            kinds = {ka, kb}
            if kinds == {"A"}:
                atoms.extend(_atoms_times_atoms(va, vb, True))
            elif kinds == {"A", "F"}:
                ats, fs = (va, vb) if ka == "A" else (vb, va)
                extra = AtomicFactor(tuple(ats))
                products.append(list(fs) + ([] if extra.is_identity() else [extra]))
            elif kinds == {"F"}:
                products.append(list(va) + list(vb))
            elif kinds == {"A", "D"}:
                ats, dens = (va, vb) if ka == "A" else (vb, va)
                densities.append(_atoms_times_density(ats, dens))
            elif kinds == {"D"}:
                densities.append(_density_times_density(va, vb))
            else:  # density with a factor product
                fs, dens = (va, vb) if ka == "F" else (vb, va)
                densities.append(_atoms_times_density(expand_factors(fs, cap), dens))
    factors: tuple = ()
    if len(products) == 1:
        factors = tuple(products[0])
    elif products:
        for p in products:
            atoms.extend(expand_factors(p, cap))
    density = None
    if densities:
        density = densities[0]
        for d in densities[1:]:
            density = _add_densities(density, d)
    return SpectralMeasure(
        CIRCLE, 1, _merge_atoms(atoms), density, factors, label=f"({a.label})*({b.label})"
    )


def _add_densities(d1: CircleDensity, d2: CircleDensity) -> CircleDensity:
    if d1.grid_size != d2.grid_size:
        raise ConvolutionError("cannot add densities on different grids")
    analytic = None
    if d1.analytic is not None and d2.analytic is not None:
        a1, a2 = d1.analytic, d2.analytic
        analytic = lambda ns: a1(ns) + a2(ns)  # noqa: E731
    bl = None
    if d1.bandlimit is not None and d2.bandlimit is not None:
        bl = max(d1.bandlimit, d2.bandlimit)
    return CircleDensity(d1.values + d2.values, bl, analytic, {"kind": "samples"})


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def dirac(point=0) -> SpectralMeasure:
    return SpectralMeasure.circle([(point, 1.0)], label=f"delta_{point}")


def lebesgue(weight: float = 1.0, grid_size: int = _DEFAULTS.grid_size) -> SpectralMeasure:
    return SpectralMeasure.circle(density=CircleDensity.lebesgue(weight, grid_size), label="lebesgue")


def bernoulli_weights(epsilon: float, depth: int) -> list:
    """Default schedule ``a_j = min(eps/(4 pi), eps/(4 pi j))``.

    Decreasing with ``a_1 < eps / (2 pi)``; the full series is harmonic, hence
    divergent, which is what makes the infinite product continuous.
    """
    if epsilon <= 0:
        raise WeightScheduleError("epsilon must be positive")
    c = epsilon / (4 * math.pi)
    return [min(c, c / j) for j in range(1, depth + 1)]


def bernoulli_witness(weights: Sequence[float], depth: int) -> SpectralMeasure:
    """Truncated convolution ``*_{j<=J} ((1-a_j) delta_0 + a_j delta_{2^-j})``.

    Points are in turns, so ``2^-j`` turns is ``exp(i pi 2^(1-j))``. The
    measure records, for each ``k < J``, the bound ``2 pi a_{k+1}`` on
    ``|sigma_hat(2^k) - 1|``.
    """
    if depth < 1:
        raise WeightScheduleError("truncation depth must be at least 1")
    a = [float(w) for w in weights[:depth]]
    if len(a) < depth:
        raise WeightScheduleError(f"need {depth} weights, got {len(a)}")
    if any(not 0 < w < 1 for w in a):
        raise WeightScheduleError("weights must lie in (0, 1)")
    if any(a[j + 1] > a[j] for j in range(depth - 1)):
        raise WeightScheduleError("weights must be non-increasing")
    factors = tuple(
        AtomicFactor.two_point(CirclePoint.from_fraction(math.ldexp(1.0, -j)), a[j - 1])
        for j in range(1, depth + 1)
    )
    bounds = {k: 2 * math.pi * a[k] for k in range(depth)}
    return SpectralMeasure(
        CIRCLE,
        1,
        factors=factors,
        label=f"bernoulli(J={depth})",
        meta={"weights": tuple(a), "tail_bounds": bounds},
    )


def check_riesz_frequencies(freqs: Sequence[int]) -> None:
    """Frequencies must be positive and super-increasing: ``m_{k+1} > sum_{i<=k} m_i``.

    This is implied by a ratio of at least 3 and is what keeps the constant
    term of the product equal to 1.
    """
    total = 0
    for m in freqs:
        if int(m) != m or m <= 0:
            raise ValueError("Riesz frequencies must be positive integers")
        if m <= total:
            raise ValueError(f"frequency {m} is not larger than the sum {total} of its predecessors")
        total += int(m)


def riesz_product(
    frequencies: Sequence[int],
    coefficients: Sequence[float],
    depth: int | None = None,
    grid_size: int = _DEFAULTS.grid_size,
) -> SpectralMeasure:
    """Density ``prod_{k<=K} (1 + alpha_k cos(2 pi m_k theta))`` on a periodic grid.

    The product is a trigonometric polynomial of degree ``sum m_k``; the grid
    must exceed twice that degree so the trapezoid coefficients are exact.
    """
    K = len(frequencies) if depth is None else depth
    freqs = [int(m) for m in frequencies[:K]]
    alphas = [float(x) for x in coefficients[:K]]
    if len(freqs) < K or len(alphas) < K:
        raise ValueError("not enough frequencies or coefficients for the requested depth")
    check_riesz_frequencies(freqs)
    if any(abs(x) > 1 for x in alphas):
        raise ValueError("Riesz coefficients must lie in [-1, 1]")
    degree = sum(freqs)
    if grid_size <= 2 * degree:
        raise ResolutionError(f"grid of {grid_size} points cannot resolve degree {degree}")
    theta = np.arange(grid_size) / grid_size
    values = np.ones(grid_size)
    for m, x in zip(freqs, alphas):
        values *= 1 + x * np.cos(2 * np.pi * m * theta)
    dens = CircleDensity(
        values,
        bandlimit=degree,
        spec={"kind": "riesz", "frequencies": freqs, "coefficients": alphas},
    )
    return SpectralMeasure(
        CIRCLE,
        1,
        density=dens,
        label=f"riesz(K={K})",
        meta={"frequencies": tuple(freqs), "coefficients": tuple(alphas)},
    )


def riesz_coefficient(frequencies: Sequence[int], coefficients: Sequence[float], n: int) -> float:
    """Exact coefficient of the Riesz product at ``n`` by signed-digit enumeration.

    Expands each factor as ``1 + (alpha/2) e^{+} + (alpha/2) e^{-}`` and sums
    the weights of every representation ``n = sum eps_k m_k``.
    """
    freqs = [int(m) for m in frequencies]
    alphas = [float(x) for x in coefficients]
    prefix = [0]
    for m in freqs:
        prefix.append(prefix[-1] + m)

    def walk(i: int, target: int) -> float:
        if i < 0:
            return 1.0 if target == 0 else 0.0
        if abs(target) > prefix[i + 1]:
            return 0.0
        m = freqs[i]
        total = walk(i - 1, target)
        half = alphas[i] / 2
        if half:
            total += half * walk(i - 1, target - m)
            total += half * walk(i - 1, target + m)
        return total

    return walk(len(freqs) - 1, int(n))


# ---------------------------------------------------------------------------
# measures on R^d
# ---------------------------------------------------------------------------


def uniform_ball(radius: float, dim: int = 1, nodes: int = 64) -> NodeDensity:
    """Normalised uniform density on the Euclidean ball B(0, radius) in R^1 or R^2."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    if dim == 1:
        return NodeDensity((radius * x).reshape(-1, 1), w / 2, "compact")
    if dim == 2:
        r = radius * (x + 1) / 2
        wr = w * radius / 2 * r
        phi = 2 * np.pi * np.arange(2 * nodes) / (2 * nodes)
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        weights = np.outer(wr, np.full(len(phi), 2 * np.pi / len(phi))).ravel()
        pts = np.column_stack([(rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel()])
        return NodeDensity(pts, weights / (np.pi * radius**2), "compact")
    raise ValueError("uniform_ball supports dimension 1 or 2")


def gaussian_density(scale: float = 1.0, half_width: float = 12.0, points: int = 4001) -> NodeDensity:
    """Centred normal density on R with standard deviation ``scale`` (trapezoid nodes)."""
    x = np.linspace(-half_width * scale, half_width * scale, points)
    h = x[1] - x[0]
    w = np.exp(-0.5 * (x / scale) ** 2) / (scale * math.sqrt(2 * math.pi)) * h
    return NodeDensity(x.reshape(-1, 1), w, "decaying")


def product_measure(a: SpectralMeasure, b: SpectralMeasure) -> SpectralMeasure:
    """Product of two measures on R^p and R^q, living on R^(p+q)."""
    if a.domain != REAL or b.domain != REAL:
        raise DomainError("product_measure is for measures on R^d")
    p, q = a.dim, b.dim

    def as_nodes(m):
        pts, ws, tails = [], [], []
        if m.atoms:
            pts.append(np.array([x.point for x in m.atoms], dtype=float).reshape(-1, m.dim))
            ws.append(np.array([complex(x.mass) for x in m.atoms]))
        if m.density is not None:
            pts.append(m.density.nodes)
            ws.append(np.asarray(m.density.weights, dtype=complex))
            tails.append(m.density.tail)
        return pts, ws, tails

    atoms_pts, atoms_m = [], []
    dens_pts, dens_w = [], []
    pa, wa, ta = as_nodes(a)
    pb, wb, tb = as_nodes(b)
    a_atomic = [bool(a.atoms)] + ([False] if a.density is not None else [])
    b_atomic = [bool(b.atoms)] + ([False] if b.density is not None else [])
    a_atomic = a_atomic[: len(pa)] if a.atoms else [False] * len(pa)
    b_atomic = b_atomic[: len(pb)] if b.atoms else [False] * len(pb)
    for X, Wx, ax in zip(pa, wa, a_atomic):
        for Y, Wy, by in zip(pb, wb, b_atomic):
            grid = np.column_stack([np.repeat(X, len(Y), axis=0), np.tile(Y, (len(X), 1))])
            w = np.outer(Wx, Wy).ravel()
            if ax and by:
                atoms_pts.append(grid)
                atoms_m.append(w)
            else:
                dens_pts.append(grid)
                dens_w.append(w)
    density = None
    if dens_pts:
        tail = "unbounded" if "unbounded" in ta + tb else ("decaying" if "decaying" in ta + tb else "compact")
        weights = np.concatenate(dens_w)
        if np.max(np.abs(weights.imag), initial=0.0) == 0:
            weights = weights.real
        density = NodeDensity(np.vstack(dens_pts), weights, tail)
    points = np.vstack(atoms_pts) if atoms_pts else np.zeros((0, p + q))
    masses = np.concatenate(atoms_m) if atoms_m else np.zeros(0)
    atoms = tuple(Atom(tuple(pt), _real_if_possible(complex(m))) for pt, m in zip(points, masses))
    return SpectralMeasure(REAL, p + q, atoms, density, (), label=f"({a.label})x({b.label})")


def discretize(measure: SpectralMeasure, cap: int = _DEFAULTS.expansion_cap):
    """Positions (turns) and masses of a purely atomic stand-in for a circle measure.

    Densities become their grid samples (the trapezoid rule reads them that
    way); factor products are expanded when small enough.
    """
    if measure.domain != CIRCLE:
        raise DomainError("discretize is for circle measures")
    turns = [a.point.turns for a in measure.atoms]
    masses = [complex(a.mass) for a in measure.atoms]
    if measure.factors:
        for a in expand_factors(measure.factors, cap):
            turns.append(a.point.turns)
            masses.append(complex(a.mass))
    t = np.array(turns, dtype=float)
    m = np.array(masses, dtype=complex)
    if measure.density is not None:
        G = measure.density.grid_size
        t = np.concatenate([t, np.arange(G) / G])
        m = np.concatenate([m, np.asarray(measure.density.values, dtype=complex) / G])
    return t, m
