"""Cesaro character means along integer sequences.

For a sequence ``(n_k)`` and a point ``theta`` of the circle this evaluates

    S_N(h) = (1/N) sum_{k<N} exp(2 i pi h n_k theta)

with ``n_k theta mod 1`` computed by exact wrapping arithmetic, so lacunary
sequences such as ``2^k + k`` stay meaningful far past double precision.
Finite-N values are evidence only; nothing here claims a limit.
"""

from __future__ import annotations

import csv
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import WeylConfig
from .errors import HorizonError, SchemaError
from .fixedpoint import MASK64, CirclePoint, mulmod128, split_words
from .measures import as_index_array

_DEFAULTS = WeylConfig()

_LACUNARY = re.compile(r"(\d+)\^k(?:\+(\d*)k)?(?:\+(\d+))?")


@dataclass(frozen=True)
class IntegerSequence:
    """Polynomial, lacunary (``b^k + c k + d``) or explicit integer sequence.

    Polynomial sequences are indexed from k = 1 and lacunary ones from k = 0,
    matching how these sets are usually written. ``terms(N)`` returns the
    first N values as Python integers.
    """

    kind: str
    params: tuple
    horizon: int | None = None
    text: str = ""

    @classmethod
    def polynomial(cls, coefficients, horizon: int | None = None) -> IntegerSequence:
        """Coefficients listed from the highest degree down."""
        coeffs = tuple(int(c) for c in coefficients)
        return cls("poly", coeffs, horizon, "poly:" + ",".join(map(str, coeffs)))

    @classmethod
    def lacunary(cls, base: int, linear: int = 0, constant: int = 0, horizon: int = 4096) -> IntegerSequence:
        if base < 2:
            raise SchemaError("lacunary base must be at least 2")
        text = f"lacunary:{base}^k" + (f"+{linear}k" if linear else "") + (f"+{constant}" if constant else "")
        return cls("lacunary", (int(base), int(linear), int(constant)), horizon, text)

    @classmethod
    def explicit(cls, values) -> IntegerSequence:
        vals = tuple(int(v) for v in values)
        return cls("list", vals, len(vals), "list:" + ",".join(map(str, vals)))

    @classmethod
    def parse(cls, text: str) -> IntegerSequence:
        """``"poly:1,0,0"`` (k^2), ``"lacunary:2^k+k"``, ``"list:1,2,5"``."""
        kind, _, body = str(text).partition(":")
        body = body.replace(" ", "")
        try:
            if kind == "poly":
                return cls.polynomial([int(c) for c in body.split(",")])
            if kind == "lacunary":
                m = _LACUNARY.fullmatch(body)
                if not m:
                    raise SchemaError(f"unrecognised lacunary form {body!r}")
                lin = m.group(2)
                linear = 0 if lin is None else (1 if lin == "" else int(lin))
                return cls.lacunary(int(m.group(1)), linear, int(m.group(3) or 0))
            if kind == "list":
                return cls.explicit(int(v) for v in body.split(",") if v)
        except ValueError as exc:
            raise SchemaError(f"cannot parse sequence {text!r}") from exc
        raise SchemaError(f"unknown sequence kind in {text!r}")

    @property
    def start(self) -> int:
        return 0 if self.kind == "lacunary" else 1

    def term(self, k: int) -> int:
        if self.kind == "poly":
            value = 0
            for c in self.params:
                value = value * k + c
            return value
        if self.kind == "lacunary":
            b, c, d = self.params
            return b**k + c * k + d
        return self.params[k - 1]

    def terms(self, N: int) -> list:
        if self.horizon is not None and N > self.horizon:
            raise HorizonError(f"{self.text} supports {self.horizon} terms, {N} requested")
        if self.kind == "lacunary":
            b, c, d = self.params
            out, power = [], 1
            for k in range(N):
                out.append(power + c * k + d)
                power *= b
            return out
        if self.kind == "list":
            return list(self.params[:N])
        return [self.term(k) for k in range(1, N + 1)]

    def index_array(self, N: int) -> np.ndarray:
        """First N terms as int64 when they fit, else as an object array."""
        if self.kind == "poly" and N > 0:
            bound = sum(abs(c) * float(N) ** i for i, c in enumerate(reversed(self.params)))
            if bound < 2**62:
                ki = np.arange(1, N + 1, dtype=np.int64)
                value = np.zeros(N, dtype=np.int64)
                for c in self.params:
                    value = value * ki + c
                return value
        return as_index_array(self.terms(N))


def character_phases(seq: IntegerSequence, theta: CirclePoint, N: int, h: int = 1,
                     guard_bits: int = _DEFAULTS.guard_bits) -> np.ndarray:
    """``exp(2 i pi h n_k theta)`` for the first N terms."""
    ns = seq.index_array(N)
    if not theta.exact and len(ns):
        biggest = max(abs(int(np.max(ns))), abs(int(np.min(ns))))
        theta.check_precision([biggest * abs(h)], guard_bits)
    return theta.scale(h).phases(ns)


def cesaro_character_mean(seq: IntegerSequence, theta: CirclePoint, N: int, h: int = 1) -> complex:
    """``(1/N) sum_{k<N} exp(2 i pi h n_k theta)`` over the first N terms."""
    if N < 1:
        raise ValueError("N must be positive")
    return complex(np.mean(character_phases(seq, theta, N, h)))


def schedule(N: int) -> list:
    """Geometric checkpoints 1, 2, 4, ... below N, then N itself."""
    points, n = [], 1
    while n < N:
        points.append(n)
        n *= 2
    points.append(N)
    return points


@dataclass
class WeylReport:
    theta: str
    harmonic: int
    N: int
    partial: list = field(default_factory=list)  # (N_i, S_{N_i}) on the geometric schedule

    @property
    def value(self) -> complex:
        return self.partial[-1][1]

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def as_dict(self) -> dict:
        return {
            "theta": self.theta,
            "harmonic": self.harmonic,
            "N": self.N,
            "magnitude": self.magnitude,
            "partial": [[n, s.real, s.imag] for n, s in self.partial],
        }


def _report(seq, theta, N, h) -> WeylReport:
    phases = character_phases(seq, theta, N, h)
    sums = np.cumsum(phases)
    points = schedule(N)
    partial = [(n, complex(sums[n - 1] / n)) for n in points]
    return WeylReport(theta.describe(), h, N, partial)


def weyl_criterion_scan(seq: IntegerSequence, theta: CirclePoint, harmonics: int = _DEFAULTS.harmonics,
                        N: int = 10**5) -> list:
    """One :class:`WeylReport` per harmonic ``h = 1..harmonics``."""
    if harmonics < 1:
        raise ValueError("need at least one harmonic")
    return [_report(seq, theta, N, h) for h in range(1, harmonics + 1)]


@dataclass
class FirstKindScan:
    """Heuristic split of a theta grid at finite N.

    ``decayed`` holds thetas whose means are below ``tol`` at every harmonic;
    the rest are ``undetermined``. No equidistribution claim is implied.
    """

    N: int
    tol: float
    harmonics: int
    decayed: list
    undetermined: list
    worst: dict  # theta description -> max_h |S_N(h)|
    heuristic: bool = True


def first_kind_scan(seq: IntegerSequence, thetas, N: int, tol: float = _DEFAULTS.tol,
                    harmonics: int = _DEFAULTS.harmonics, workers: int | None = None) -> FirstKindScan:
    thetas = list(thetas)

    def worst(theta):
        return max(abs(cesaro_character_mean(seq, theta, N, h)) for h in range(1, harmonics + 1))

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(worst, thetas))
    else:
        values = [worst(t) for t in thetas]
    decayed = [t for t, v in zip(thetas, values) if v < tol]
    undetermined = [t for t, v in zip(thetas, values) if v >= tol]
    return FirstKindScan(N, tol, harmonics, decayed, undetermined,
                         {t.describe(): v for t, v in zip(thetas, values)})


def wrapped_words(theta: CirclePoint, ns) -> list:
    """Exact 128-bit words of ``n * theta mod 1`` from the vectorised limb product."""
    hi, lo = split_words(as_index_array(ns))
    r_hi, r_lo = mulmod128(hi, lo, np.uint64(theta.word >> 64), np.uint64(theta.word & MASK64))
    return [(int(a) << 64) | int(b) for a, b in zip(r_hi, r_lo)]


def write_reports_csv(path, reports) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["harmonic", "N", "re", "im", "abs"])
        for r in reports:
            for n, s in r.partial:
                w.writerow([r.harmonic, n, repr(s.real), repr(s.imag), repr(abs(s))])
