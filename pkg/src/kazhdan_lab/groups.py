"""Heisenberg groups and the affine group Aff+(R): laws, matrix coefficients, reductions.

Matrix coefficients of the infinite-dimensional families are computed by
trapezoid quadrature of sampled windows on uniform grids. Windows built from
closed forms keep their formula, so translated or dilated copies are exact;
sampled windows are shifted by Fourier phase and dilated by interpolation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import GroupConfig
from .errors import DimensionError, SchemaError, SupportError
from .kazhdan import WitnessVerdict
from .measures import SpectralMeasure, fourier_transforms_real, product_measure, uniform_ball

_DEFAULTS = GroupConfig()


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HeisenbergElement:
    """``(t, q, p)`` in R x R^n x R^n with
    ``(t1,q1,p1)(t2,q2,p2) = (t1+t2+(p1.q2-p2.q1)/2, q1+q2, p1+p2)``."""

    t: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise DimensionError("q and p must be vectors of one length")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.q)

    @classmethod
    def identity(cls, n: int = 1) -> HeisenbergElement:
        return cls(0.0, np.zeros(n), np.zeros(n))

    def __mul__(self, other: HeisenbergElement) -> HeisenbergElement:
        t = self.t + other.t + 0.5 * (self.p @ other.q - other.p @ self.q)
        return HeisenbergElement(t, self.q + other.q, self.p + other.p)

    def inverse(self) -> HeisenbergElement:
        return HeisenbergElement(-self.t, -self.q, -self.p)

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.t], self.q, self.p])


@dataclass(frozen=True)
class AffineElement:
    """``(a, b)`` with a > 0 and ``(a, b)(a', b') = (a a', b + a b')``."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("the dilation a must be positive")

    @classmethod
    def identity(cls) -> AffineElement:
        return cls(1.0, 0.0)

    def __mul__(self, other: AffineElement) -> AffineElement:
        return AffineElement(self.a * other.a, self.b + self.a * other.b)

    def inverse(self) -> AffineElement:
        return AffineElement(1 / self.a, -self.b / self.a)


# ---------------------------------------------------------------------------
# windows
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WindowFunction:
    """Samples of a function on the uniform grid ``x``.

    ``support`` is the closed interval outside which the function vanishes
    (or is below double precision for decaying closed forms); ``formula``
    evaluates the function anywhere when it is known in closed form.
    """

    x: np.ndarray
    values: np.ndarray
    support: tuple
    formula: Callable | None = None
    name: str = "samples"

    @property
    def step(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.step))

    def normalized(self) -> WindowFunction:
        c = 1 / self.norm
        f = self.formula
        formula = None if f is None else (lambda x: c * f(x))
        return WindowFunction(self.x, self.values * c, self.support, formula, self.name)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self.formula is not None:
            return np.asarray(self.formula(points), dtype=complex)
        inside = (points >= self.support[0]) & (points <= self.support[1])
        re = np.interp(points, self.x, self.values.real, left=0.0, right=0.0)
        im = np.interp(points, self.x, np.imag(self.values), left=0.0, right=0.0)
        return np.where(inside, re + 1j * im, 0.0)

    def translated_samples(self, shift: float) -> np.ndarray:
        """Samples of ``x -> u(x + shift)`` on the same grid."""
        lo, hi = self.support
        if lo - shift < self.x[0] or hi - shift > self.x[-1]:
            raise SupportError(
                f"shifted support [{lo - shift:.3g}, {hi - shift:.3g}] leaves the grid "
                f"[{self.x[0]:.3g}, {self.x[-1]:.3g}]; use a larger half-width"
            )
        if self.formula is not None:
            return np.asarray(self.formula(self.x + shift), dtype=complex)
        # Fourier phase shift: exact for band-limited periodic samples
        freqs = np.fft.fftfreq(len(self.x), d=self.step)
        return np.fft.ifft(np.fft.fft(self.values) * np.exp(2j * np.pi * freqs * shift))

    # -- constructors -------------------------------------------------
    @staticmethod
    def grid(lo: float, hi: float, points: int) -> np.ndarray:
        return np.linspace(lo, hi, points)

    @classmethod
    def gaussian(cls, center: float = 0.0, width: float = 1.0,
                 half_width: float = _DEFAULTS.half_width, points: int = _DEFAULTS.grid_points,
                 lo: float | None = None, hi: float | None = None) -> WindowFunction:
        """Unit-norm ``exp(-(x-c)^2 / (2 w^2))``; support is where it exceeds 1e-17."""
        x = cls.grid(-half_width if lo is None else lo, half_width if hi is None else hi, points)
        c = (math.pi * width**2) ** -0.25

        def formula(y):
            return c * np.exp(-0.5 * ((np.asarray(y) - center) / width) ** 2) + 0j

        reach = width * math.sqrt(2 * math.log(1e17))
        return cls(x, formula(x), (center - reach, center + reach), formula, "gaussian")

    @classmethod
    def bump(cls, center: float = 0.0, radius: float = 1.0,
             half_width: float = _DEFAULTS.half_width, points: int = _DEFAULTS.grid_points,
             lo: float | None = None, hi: float | None = None) -> WindowFunction:
        """Smooth compactly supported ``exp(-1 / (1 - r^2))``, r = (x - c) / radius, unit norm."""
        x = cls.grid(-half_width if lo is None else lo, half_width if hi is None else hi, points)

        def raw(y):
            r = (np.asarray(y, dtype=float) - center) / radius
            out = np.zeros_like(r)
            inside = np.abs(r) < 1
            out[inside] = np.exp(-1 / (1 - r[inside] ** 2))
            return out

        fine = np.linspace(center - radius, center + radius, 20001)
        norm = math.sqrt(np.sum(raw(fine) ** 2) * (fine[1] - fine[0]))

        def formula(y):
            return raw(y) / norm + 0j

        return cls(x, formula(x), (center - radius, center + radius), formula, "bump")

    @classmethod
    def from_samples(cls, x, values, tol: float = 0.0) -> WindowFunction:
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=complex)
        if x.ndim != 1 or len(x) < 2 or values.shape != x.shape:
            raise SchemaError("window needs matching 1-d x and value arrays")
        if not np.allclose(np.diff(x), x[1] - x[0], rtol=1e-9, atol=0):
            raise SchemaError("window grid must be uniform")
        nz = np.nonzero(np.abs(values) > tol)[0]
        support = (float(x[nz[0]]), float(x[nz[-1]])) if len(nz) else (float(x[0]), float(x[0]))
        return cls(x, values, support)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re", "im"])
            for xi, v in zip(self.x, self.values):
                w.writerow([repr(float(xi)), repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def from_csv(cls, path) -> WindowFunction:
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            for row in reader:
                if not row or row[0] == "x":
                    continue
                try:
                    rows.append([float(v) for v in row[:3]])
                except ValueError as exc:
                    raise SchemaError(f"bad window row {row}") from exc
        data = np.array(rows)
        if data.ndim != 2 or data.shape[1] != 3:
            raise SchemaError("window CSV needs columns x, re, im")
        return cls.from_samples(data[:, 0], data[:, 1] + 1j * data[:, 2])


def quadrature(f: np.ndarray, step: float) -> complex:
    """Trapezoid rule; windows vanish at the grid ends, so this is a plain sum."""
    return complex((np.sum(f) - 0.5 * (f[0] + f[-1])) * step)


# ---------------------------------------------------------------------------
# Schroedinger representations
# ---------------------------------------------------------------------------


def _schrodinger_1d(lam: float, sign: int, t: float, q: float, p: float, u: WindowFunction) -> np.ndarray:
    root = math.sqrt(lam)
    phase = np.exp(1j * sign * (lam * t + root * q * u.x + 0.5 * lam * q * p))
    return phase * u.translated_samples(root * p)


def schrodinger_apply(lambda_signed: float, g: HeisenbergElement, u: WindowFunction) -> WindowFunction:
    """``pi(g) u`` for n = 1, keeping a closed form when u has one.

    ``pi_{s lam}(t,q,p) u(x) = exp(i s (lam t + sqrt(lam) q x + lam q p / 2)) u(x + sqrt(lam) p)``
    with s = +1 or -1; the minus family is the complex conjugate of the plus one.
    """
    if lambda_signed == 0:
        raise ValueError("lambda must be nonzero")
    if g.n != 1:
        raise DimensionError("apply works one coordinate at a time; use product windows for n > 1")
    lam, sign = abs(lambda_signed), (1 if lambda_signed > 0 else -1)
    t, q, p = g.t, float(g.q[0]), float(g.p[0])
    values = _schrodinger_1d(lam, sign, t, q, p, u)
    root = math.sqrt(lam)
    formula = None
    if u.formula is not None:
        f = u.formula

        def formula(x):
            x = np.asarray(x, dtype=float)
            return np.exp(1j * sign * (lam * t + root * q * x + 0.5 * lam * q * p)) * f(x + root * p)

    support = (u.support[0] - root * p, u.support[1] - root * p)
    return WindowFunction(u.x, values, support, formula, u.name)


def schrodinger_coefficient(lambda_signed: float, g: HeisenbergElement, u, v) -> complex:
    """``<pi_{+-lam}(g) u, v>`` by trapezoid quadrature.

    For n > 1, ``u`` and ``v`` are sequences of one-dimensional windows
    (separable products) and the coefficient factorises over coordinates.
    """
    if lambda_signed == 0:
        raise ValueError("lambda must be nonzero")
    lam, sign = abs(lambda_signed), (1 if lambda_signed > 0 else -1)
    us = [u] if isinstance(u, WindowFunction) else list(u)
    vs = [v] if isinstance(v, WindowFunction) else list(v)
    if len(us) != g.n or len(vs) != g.n:
        raise DimensionError("need one window per coordinate")
    value = complex(np.exp(1j * sign * lam * g.t))
    for ui, vi, qi, pi in zip(us, vs, g.q, g.p):
        if ui.x.shape != vi.x.shape or not np.allclose(ui.x, vi.x):
            raise DimensionError("windows must share a grid")
        f = _schrodinger_1d(lam, sign, 0.0, float(qi), float(pi), ui)
        value *= quadrature(f * np.conj(vi.values), ui.step)
    return value


def quadrature_error(lambda_signed: float, g: HeisenbergElement, u: WindowFunction, v: WindowFunction) -> float:
    """Difference between full-grid and half-grid quadrature, a declared error estimate."""
    full = schrodinger_coefficient(lambda_signed, g, u, v)
    half_u = WindowFunction(u.x[::2], u.values[::2], u.support, u.formula, u.name)
    half_v = WindowFunction(v.x[::2], v.values[::2], v.support, v.formula, v.name)
    return abs(full - schrodinger_coefficient(lambda_signed, g, half_u, half_v))


def one_dim_heisenberg(y, eta, g: HeisenbergElement) -> complex:
    """One-dimensional character ``exp(i (y.q + eta.p))``; the centre coordinate t drops out."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    return complex(np.exp(1j * (y @ g.q + eta @ g.p)))


def heisenberg_projection(Q: Sequence[HeisenbergElement]) -> np.ndarray:
    """Rows ``(q, p)`` in R^{2n}; the centre coordinate is forgotten."""
    return np.array([np.concatenate([g.q, g.p]) for g in Q], dtype=float)


def lemma_g_measure(n: int, delta: float, nodes: int = 64) -> SpectralMeasure:
    """``delta_0 x uniform(B(0, delta))`` on R^n x R^n; the ball sits in the coordinates dual to p."""
    dirac = SpectralMeasure.real([np.zeros(n)], [1.0])
    ball = SpectralMeasure.real(density=uniform_ball(delta, n, nodes))
    m = product_measure(dirac, ball)
    return SpectralMeasure(m.domain, m.dim, m.atoms, m.density, (), f"delta_0 x ball({delta:g})",
                           {"n": n, "delta": delta})


def lemma_g_witness(Q: Sequence[HeisenbergElement], epsilon: float,
                    config: GroupConfig = _DEFAULTS) -> WitnessVerdict:
    """Witness that a set whose p-coordinates stay bounded by M is not Kazhdan.

    Uses ``delta = epsilon / (4 M)`` so that ``2 M delta < epsilon``; every point
    satisfies ``|s(q,p) - 1| <= 2 delta |p|`` and the measure has no atom at 0.
    """
    points = heisenberg_projection(Q)
    n = Q[0].n
    M = float(max(np.linalg.norm(points[:, n:], axis=1).max(), 1e-300))
    delta = epsilon / (4 * M)
    measure = lemma_g_measure(n, delta)
    values = fourier_transforms_real(measure, points)
    trace = []
    for row, val in zip(points, values):
        pnorm = float(np.linalg.norm(row[n:]))
        d = abs(val - 1)
        trace.append({"check": "ball_bound", "q": row[:n].tolist(), "p": row[n:].tolist(),
                      "defect": d, "bound": 2 * delta * pnorm})
        if d > 2 * delta * pnorm + config.quadrature_tol:
            raise SupportError(f"quadrature defect {d} exceeds 2 delta |p| = {2 * delta * pnorm}")
    trace.append({"check": "reduction_constants", "fraction": config.reduction_fraction,
                  "epsilon_max": config.reduction_eps_max})
    atom = abs(measure.atom_mass_at(np.zeros(2 * n)))
    return WitnessVerdict("non_kazhdan_witness", measure.label,
                          {"set": "projection to (q, p)", "points": len(points), "p_bound": M},
                          float(np.max(np.abs(values - 1))), atom, trace, epsilon)


# ---------------------------------------------------------------------------
# affine group
# ---------------------------------------------------------------------------


def _check_half_line(sign: str, f: WindowFunction) -> None:
    lo, hi = f.support
    if sign == "+" and lo <= 0:
        raise SupportError("windows for pi_+ must be supported in (0, inf)")
    if sign == "-" and hi >= 0:
        raise SupportError("windows for pi_- must be supported in (-inf, 0)")
    if sign not in "+-" or len(sign) != 1:
        raise ValueError("sign must be '+' or '-'")


def affine_apply(sign: str, g: AffineElement, f: WindowFunction) -> WindowFunction:
    """``pi_+-(a, b) f : s -> sqrt(a) exp(2 i pi b s) f(a s)``."""
    _check_half_line(sign, f)
    a, b = g.a, g.b
    values = math.sqrt(a) * np.exp(2j * np.pi * b * f.x) * f.evaluate(a * f.x)
    lo, hi = f.support[0] / a, f.support[1] / a
    if lo < f.x[0] or hi > f.x[-1]:
        raise SupportError("dilated support leaves the grid")
    formula = None
    if f.formula is not None:
        base = f.formula

        def formula(s):
            s = np.asarray(s, dtype=float)
            return math.sqrt(a) * np.exp(2j * np.pi * b * s) * base(a * s)

    return WindowFunction(f.x, values, (lo, hi), formula, f.name)


def affine_coefficient(sign: str, g: AffineElement, f1: WindowFunction, f2: WindowFunction) -> complex:
    """``<pi_+-(a, b) f1, f2>`` by trapezoid quadrature on f2's grid."""
    _check_half_line(sign, f1)
    _check_half_line(sign, f2)
    s = f2.x
    integrand = math.sqrt(g.a) * np.exp(2j * np.pi * g.b * s) * f1.evaluate(g.a * s) * np.conj(f2.values)
    return quadrature(integrand, f2.step)


def affine_projection(Q: Sequence[AffineElement]) -> np.ndarray:
    """``{ln a : (a, b) in Q}``."""
    return np.array([math.log(g.a) for g in Q])


def affine_window(center: float = 2.0, radius: float = 1.0, hi: float = 8.0,
                  points: int = _DEFAULTS.grid_points) -> WindowFunction:
    """Bump on a grid over [0, hi], fine enough for the oscillation e^{2 i pi b s} at |b| <= 100."""
    return WindowFunction.bump(center, radius, lo=0.0, hi=hi, points=points)


# ---------------------------------------------------------------------------
# decay scans
# ---------------------------------------------------------------------------


@dataclass
class DecayScan:
    parameter: str
    params: np.ndarray
    magnitudes: np.ndarray

    @property
    def envelope(self) -> np.ndarray:
        """``max_{j >= i} |c_j|``: nonincreasing by construction."""
        return np.maximum.accumulate(self.magnitudes[::-1])[::-1]

    @property
    def decay_factor(self) -> float:
        last = self.magnitudes[-1]
        return float(self.magnitudes[0] / last) if last > 0 else math.inf

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([self.parameter, "magnitude", "envelope"])
            for p, m, e in zip(self.params, self.magnitudes, self.envelope):
                w.writerow([repr(float(p)), repr(float(m)), repr(float(e))])


def heisenberg_decay_scan(lambda_signed: float, u: WindowFunction, v: WindowFunction, ps,
                          t: float = 0.0, q: float = 0.0) -> DecayScan:
    ps = np.asarray(ps, dtype=float)
    mags = np.array([abs(schrodinger_coefficient(lambda_signed, HeisenbergElement(t, [q], [p]), u, v))
                     for p in ps])
    return DecayScan("p", ps, mags)


def affine_decay_scan(sign: str, f1: WindowFunction, f2: WindowFunction, bs, a: float = 1.0) -> DecayScan:
    bs = np.asarray(bs, dtype=float)
    mags = np.array([abs(affine_coefficient(sign, AffineElement(a, b), f1, f2)) for b in bs])
    return DecayScan("b", bs, mags)
