"""Exact mod-1 arithmetic on the circle with 128-bit fixed-point turns.

A point of the circle is stored as an integer ``word`` in ``[0, 2**128)``
standing for ``word / 2**128`` turns. Multiplying by an integer ``n`` and
reducing mod 1 is then exact wrapping multiplication mod ``2**128``, which
keeps products such as ``(2**k + k) * theta`` meaningful long after double
precision has lost every fractional digit.

Rational points can additionally be held as an exact fraction ``p/q``; in that
case ``n * theta mod 1`` is computed as ``(n * p mod q) / q`` with no
truncation at all.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PrecisionError, SchemaError

BITS = 128
MODULUS = 1 << BITS
MASK64 = (1 << 64) - 1
_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_TWO_M64 = 2.0**-64
_TWO_M128 = 2.0**-128


def mulmod128(a_hi, a_lo, b_hi, b_lo):
    """Wrapping product of 128-bit unsigned integers given as uint64 limbs.

    All four arguments are uint64 arrays (or scalars) and broadcast together.
    Returns the ``(hi, lo)`` limbs of ``a * b mod 2**128``.
    """
    a_hi = np.asarray(a_hi, dtype=np.uint64)
    a_lo = np.asarray(a_lo, dtype=np.uint64)
    b_hi = np.asarray(b_hi, dtype=np.uint64)
    b_lo = np.asarray(b_lo, dtype=np.uint64)
    a0, a1 = a_lo & _M32, a_lo >> _S32
    b0, b1 = b_lo & _M32, b_lo >> _S32
    with np.errstate(over="ignore"):
        p00 = a0 * b0
        p01 = a0 * b1
        p10 = a1 * b0
        p11 = a1 * b1
        mid = (p00 >> _S32) + (p01 & _M32) + (p10 & _M32)
        lo = (p00 & _M32) | (mid << _S32)
        hi = p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)
        # uint64 products wrap mod 2**64, which is exactly what the high limb needs
        hi = hi + a_lo * b_hi + a_hi * b_lo
    return hi, lo


def split_words(values):
    """Reduce integers mod 2**128 and split them into (hi, lo) uint64 limbs.

    Accepts Python ints of any size, or a numpy integer array.
    """
    if isinstance(values, np.ndarray) and values.dtype.kind in "iu" and values.dtype.itemsize <= 8:
        if values.dtype.kind == "u":
            return np.zeros(values.shape, dtype=np.uint64), values.astype(np.uint64)
        v = values.astype(np.int64)
        lo = v.astype(np.uint64)  # two's complement == value mod 2**64
        hi = np.where(v < 0, np.uint64(MASK64), np.uint64(0)).astype(np.uint64)
        return hi, lo
    words = [int(v) % MODULUS for v in values]
    hi = np.fromiter((w >> 64 for w in words), dtype=np.uint64, count=len(words))
    lo = np.fromiter((w & MASK64 for w in words), dtype=np.uint64, count=len(words))
    return hi, lo


def limbs_to_turns(hi, lo):
    """Fraction of a turn in [0, 1) as float64 from 128-bit limbs."""
    return hi.astype(np.float64) * _TWO_M64 + lo.astype(np.float64) * _TWO_M128


def _max_abs_bits(values):
    if isinstance(values, np.ndarray) and values.dtype.kind in "iu":
        if values.size == 0:
            return 0
        m = int(np.max(np.abs(values.astype(np.float64))))
        return m.bit_length() + 1
    return max((abs(int(v)).bit_length() for v in values), default=0)


@dataclass(frozen=True)
class CirclePoint:
    """A point of the circle, ``word / 2**128`` turns.

    ``ratio`` is set when the point is an exact rational; ``exact`` is False
    when ``word`` truncates an irrational number (then products with large
    integers amplify the truncation and are guarded).
    """

    word: int
    ratio: Fraction | None = None
    exact: bool = True

    def __post_init__(self):
        if not 0 <= self.word < MODULUS:
            raise ValueError("word must lie in [0, 2**128)")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_word(cls, word: int) -> CirclePoint:
        return cls(int(word) % MODULUS)

    @classmethod
    def from_fraction(cls, value) -> CirclePoint:
        f = Fraction(value) % 1
        word = (f.numerator * MODULUS) // f.denominator
        return cls(word, ratio=f)

    @classmethod
    def from_float(cls, value: float) -> CirclePoint:
        # a double is a dyadic rational, so this is exact
        return cls.from_fraction(Fraction(value))

    @classmethod
    def zero(cls) -> CirclePoint:
        return cls(0, ratio=Fraction(0))

    @classmethod
    def sqrt(cls, m: int) -> CirclePoint:
        """Fractional part of sqrt(m), truncated to 128 bits."""
        r = math.isqrt(m)
        if r * r == m:
            return cls.zero()
        word = math.isqrt(m << (2 * BITS)) - (r << BITS)
        return cls(word, exact=False)

    @classmethod
    def golden(cls) -> CirclePoint:
        """Fractional part of the golden ratio (sqrt(5) - 1) / 2."""
        root = math.isqrt(5 << (2 * BITS + 2))  # sqrt(5) * 2**129
        word = ((root >> 1) - MODULUS) >> 1
        return cls(word % MODULUS, exact=False)

    @classmethod
    def parse(cls, text: str) -> CirclePoint:
        """Parse ``"p/q"``, a decimal, ``"sqrt2"``, ``"sqrtN"``, ``"golden"``,
        ``"0x..."`` or ``"word:<int>"``."""
        s = str(text).strip().lower()
        if s in ("golden", "phi"):
            return cls.golden()
        m = re.fullmatch(r"sqrt\(?(\d+)\)?", s)
        if m:
            return cls.sqrt(int(m.group(1)))
        if s.startswith("word:"):
            return cls.from_word(int(s[5:], 0))
        if s.startswith("0x"):
            return cls.from_word(int(s, 16))
        try:
            return cls.from_fraction(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"cannot parse circle point {text!r}") from exc

    # -- arithmetic ---------------------------------------------------
    @property
    def turns(self) -> float:
        if self.ratio is not None:
            return float(self.ratio)
        return self.word / MODULUS

    def __add__(self, other: CirclePoint) -> CirclePoint:
        if self.ratio is not None and other.ratio is not None:
            return CirclePoint.from_fraction(self.ratio + other.ratio)
        return CirclePoint((self.word + other.word) % MODULUS, exact=self.exact and other.exact)

    def __neg__(self) -> CirclePoint:
        if self.ratio is not None:
            return CirclePoint.from_fraction(-self.ratio)
        return CirclePoint((-self.word) % MODULUS, exact=self.exact)

    def __sub__(self, other: CirclePoint) -> CirclePoint:
        return self + (-other)

    def scale(self, n: int) -> CirclePoint:
        """The point ``n * self`` reduced mod 1."""
        if self.ratio is not None:
            return CirclePoint.from_fraction(n * self.ratio)
        return CirclePoint((int(n) * self.word) % MODULUS, exact=self.exact)

    def wrapped(self, n: int) -> Fraction:
        """Exact value of ``n * self mod 1`` as a fraction."""
        if self.ratio is not None:
            return (n * self.ratio) % 1
        return Fraction((int(n) * self.word) % MODULUS, MODULUS)

    def phase(self, n: int = 1) -> complex:
        """``exp(2 i pi n * self)``."""
        return _cis(float(self.wrapped(n)))

    def check_precision(self, values, guard_bits: int = 28) -> None:
        if self.exact:
            return
        if _max_abs_bits(values) > BITS - guard_bits:
            raise PrecisionError(
                f"integers beyond 2^{BITS - guard_bits} times a truncated irrational "
                f"lose the {BITS - guard_bits}-bit accuracy guarantee"
            )

    def wrapped_turns(self, values, guard_bits: int | None = None) -> np.ndarray:
        """Vectorised ``n * self mod 1`` (as float64 turns) for many integers ``n``."""
        if guard_bits is not None:
            self.check_precision(values, guard_bits)
        dyadic = self.ratio is not None and (self.ratio.denominator & (self.ratio.denominator - 1)) == 0
        if self.ratio is not None and not (dyadic and self.ratio.denominator > 2**31):
            p, q = self.ratio.numerator, self.ratio.denominator
            if q == 1:
                return np.zeros(len(values))
            arr = values if isinstance(values, np.ndarray) else None
            if arr is not None and arr.dtype.kind in "iu" and q < 2**31 and p < 2**31:
                r = np.mod(arr.astype(np.int64), q)
                return np.mod(r * p, q).astype(np.float64) / q
            return np.array([((int(v) % q) * p % q) / q for v in values], dtype=np.float64)
        hi, lo = split_words(values)
        w_hi = np.uint64(self.word >> 64)
        w_lo = np.uint64(self.word & MASK64)
        r_hi, r_lo = mulmod128(hi, lo, w_hi, w_lo)
        return limbs_to_turns(r_hi, r_lo)

    def phases(self, values, guard_bits: int | None = None) -> np.ndarray:
        return np.exp(2j * np.pi * self.wrapped_turns(values, guard_bits))

    def describe(self) -> str:
        if self.ratio is not None:
            return str(self.ratio)
        return f"0x{self.word:032x}"


def _cis(turns: float) -> complex:
    return complex(math.cos(2 * math.pi * turns), math.sin(2 * math.pi * turns))
