"""Exact real numbers of the form q0 + sum(q_i * c_i) with named constants.

The named constants (sqrt2, sqrt3, sqrt5, golden, pifrac) are the irrational
frequencies used by Bohr sets and torus systems.  Rationality of a
combination is decided symbolically: the value is rational exactly when
every irrational coefficient is zero (the supported constants are linearly
independent from 1 over the rationals, pairwise and jointly).

Numeric evaluation goes through integer digit engines: digits(name, p)
returns floor-ish c * 10^p with error below one unit in the last place, so
an approximation to any requested precision is a plain exact Fraction and
all downstream comparisons stay in rational arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import isqrt
from typing import Mapping

DEFAULT_PRECISION = 60

# Decisions closer to an arc boundary than this are refused, never guessed.
GUARD_BAND = Fraction(1, 10 ** 18)


def _sqrt_digits(k: int, prec: int) -> int:
    return isqrt(k * 10 ** (2 * prec))


def _golden_digits(prec: int) -> int:
    return (10 ** prec + _sqrt_digits(5, prec)) // 2


def _pi_digits(prec: int) -> int:
    # Machin: pi = 16*atan(1/5) - 4*atan(1/239), in scaled integers.
    work = prec + 12

    def atan_inv(x: int) -> int:
        total = 0
        term = 10 ** work // x
        x2 = x * x
        k = 1
        sign = 1
        while term:
            total += sign * term // k
            term //= x2
            k += 2
            sign = -sign
        return total

    pi_scaled = 16 * atan_inv(5) - 4 * atan_inv(239)
    return pi_scaled // 10 ** (work - prec)


def _pifrac_digits(prec: int) -> int:
    return _pi_digits(prec) - 3 * 10 ** prec


_ENGINES = {
    "sqrt2": lambda p: _sqrt_digits(2, p),
    "sqrt3": lambda p: _sqrt_digits(3, p),
    "sqrt5": lambda p: _sqrt_digits(5, p),
    "golden": _golden_digits,
    "pifrac": _pifrac_digits,
}

CONSTANT_NAMES = tuple(sorted(_ENGINES))

_digit_cache: dict[tuple[str, int], int] = {}


def constant_digits(name: str, prec: int) -> int:
    """Integer approximation of constant * 10^prec, error below 1 ulp."""
    if name not in _ENGINES:
        raise ValueError(f"unknown constant '{name}' (known: {CONSTANT_NAMES})")
    key = (name, prec)
    if key not in _digit_cache:
        _digit_cache[key] = _ENGINES[name](prec)
    return _digit_cache[key]


class Real:
    """Immutable exact combination: rational + sum of rational * named constant."""

    __slots__ = ("rational", "irr")

    def __init__(self, rational=0, irr: Mapping[str, Fraction] | None = None):
        object.__setattr__(self, "rational", Fraction(rational))
        clean = {}
        for name, coeff in (irr or {}).items():
            if name not in _ENGINES:
                raise ValueError(f"unknown constant '{name}'")
            coeff = Fraction(coeff)
            if coeff != 0:
                clean[name] = coeff
        object.__setattr__(self, "irr", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Real is immutable")

    @classmethod
    def named(cls, name: str, multiple=1) -> Real:
        return cls(0, {name: Fraction(multiple)})

    @classmethod
    def of(cls, value) -> Real:
        if isinstance(value, Real):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return parse_real(value)
        raise TypeError(f"cannot interpret {value!r} as an exact real")

    def is_rational(self) -> bool:
        return not self.irr

    def as_fraction(self) -> Fraction:
        if self.irr:
            raise ValueError(f"{self} is irrational")
        return self.rational

    def __add__(self, other) -> Real:
        other = Real.of(other)
        irr = dict(self.irr)
        for name, coeff in other.irr.items():
            irr[name] = irr.get(name, Fraction(0)) + coeff
        return Real(self.rational + other.rational, irr)

    __radd__ = __add__

    def __neg__(self) -> Real:
        return Real(-self.rational, {n: -c for n, c in self.irr.items()})

    def __sub__(self, other) -> Real:
        return self + (-Real.of(other))

    def __rsub__(self, other) -> Real:
        return Real.of(other) - self

    def scale(self, q) -> Real:
        q = Fraction(q)
        return Real(self.rational * q, {n: c * q for n, c in self.irr.items()})

    def __mul__(self, other) -> Real:
        # Only rational scaling is supported; products of two irrational
        # combinations never arise in the torus computations.
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = Real.of(other)
        if other.is_rational():
            return self.scale(other.rational)
        if self.is_rational():
            return other.scale(self.rational)
        raise TypeError("product of two irrational combinations is not supported")

    __rmul__ = __mul__

    def approx(self, prec: int = DEFAULT_PRECISION) -> Fraction:
        """Fraction within 10^-prec of the true value."""
        if not self.irr:
            return self.rational
        work = prec + 10 + max(
            len(str(abs(c.numerator))) for c in self.irr.values()
        )
        scale = 10 ** work
        total = self.rational * scale
        for name, coeff in self.irr.items():
            total += coeff * constant_digits(name, work)
        # floor to an integer numerator over 10^work
        return Fraction(total.numerator // total.denominator, scale)

    def frac(self, prec: int = DEFAULT_PRECISION) -> Fraction:
        """Fractional part, as a Fraction within 10^-prec of the true one
        (up to wrap-around at integer boundaries, which the guard band in
        the callers absorbs)."""
        return self.approx(prec) % 1

    def __float__(self) -> float:
        return float(self.approx(30))

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Real, int, Fraction)):
            return NotImplemented
        other = Real.of(other)
        return self.rational == other.rational and self.irr == other.irr

    def __hash__(self) -> int:
        return hash((self.rational, tuple(sorted(self.irr.items()))))

    def __repr__(self) -> str:
        parts = []
        if self.rational or not self.irr:
            parts.append(str(self.rational))
        for name in sorted(self.irr):
            coeff = self.irr[name]
            parts.append(name if coeff == 1 else f"{coeff}*{name}")
        return " + ".join(parts)


def dot_frac(thetas: list[Real], values: list[int], prec: int = DEFAULT_PRECISION) -> Fraction:
    """Fractional part of sum(theta_i * v_i) as a Fraction within 10^-prec.

    The integer weights fold into the rational coefficients, so the digit
    engines are consulted at a precision that absorbs their size and the
    result is safe for guard-band comparisons at the requested precision.
    """
    rational = Fraction(0)
    irr: dict[str, Fraction] = {}
    for theta, v in zip(thetas, values):
        rational += theta.rational * v
        for name, c in theta.irr.items():
            irr[name] = irr.get(name, Fraction(0)) + c * v
    if not irr:
        return rational % 1
    widest = max(len(str(abs(c.numerator))) for c in irr.values())
    # quantize the working precision so the digit cache stays warm while
    # orbit values grow
    work = prec + widest + 10
    work += (-work) % 32
    scale = 10 ** work
    acc = rational * scale
    for name, c in irr.items():
        acc += c * constant_digits(name, work)
    return Fraction(acc.numerator // acc.denominator, scale) % 1


def circle_distance(a: Fraction, b: Fraction = Fraction(0)) -> Fraction:
    """Distance between two points of the circle R/Z."""
    delta = (a - b) % 1
    return min(delta, 1 - delta)


class KahanSum:
    """Compensated float accumulator."""

    __slots__ = ("total", "compensation")

    def __init__(self):
        self.total = 0.0
        self.compensation = 0.0

    def add(self, value: float):
        y = value - self.compensation
        t = self.total + y
        self.compensation = (t - self.total) - y
        self.total = t


class RootOfUnityMean:
    """Exact average of q-th root-of-unity terms, stored as residue counts.

    Exactness queries (is the mean exactly 0, exactly 1, or a single root)
    come from the counts alone; the complex value is only materialized on
    demand."""

    __slots__ = ("q", "counts", "n_count")

    def __init__(self, q: int, counts: tuple[int, ...], n_count: int):
        self.q = q
        self.counts = tuple(counts)
        self.n_count = n_count

    @property
    def is_exactly_zero(self) -> bool:
        # A uniform distribution over all q-th roots sums to zero exactly.
        return self.q > 1 and len(set(self.counts)) == 1

    @property
    def is_exactly_one(self) -> bool:
        return self.counts[0] == self.n_count

    @property
    def constant_residue(self) -> int | None:
        """The single residue j hit by every term, if there is one."""
        hits = [j for j, c in enumerate(self.counts) if c]
        return hits[0] if len(hits) == 1 else None

    def value(self) -> complex:
        if self.is_exactly_zero:
            return 0j
        re, im = KahanSum(), KahanSum()
        for j, count in enumerate(self.counts):
            if count:
                angle = 2.0 * math.pi * j / self.q
                re.add(count * math.cos(angle))
                im.add(count * math.sin(angle))
        return complex(re.total / self.n_count, im.total / self.n_count)

    def __repr__(self) -> str:
        return f"RootOfUnityMean(q={self.q}, counts={self.counts}, N={self.n_count})"


def parse_real(text: str) -> Real:
    """Parse '1/3', 'sqrt2', '3/2*sqrt5', 'sqrt2+1', '-sqrt3', '0.25'."""
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty real expression")
    total = Real(0)
    for chunk in _split_signed(text):
        total = total + _parse_real_term(chunk)
    return total


def _split_signed(text: str) -> list[str]:
    out = []
    current = ""
    for i, ch in enumerate(text):
        if ch in "+-" and i > 0 and text[i - 1] not in "+-*/":
            out.append(current)
            current = ch if ch == "-" else ""
        else:
            current += ch
    out.append(current)
    return [c for c in out if c]


def _parse_real_term(text: str) -> Real:
    negative = text.startswith("-")
    if negative:
        text = text[1:]
    factors = text.split("*")
    coeff = Fraction(1)
    name = None
    for f in factors:
        f = f.strip()
        if f in _ENGINES:
            if name is not None:
                raise ValueError(f"cannot multiply two constants in '{text}'")
            name = f
        else:
            coeff *= _parse_rational(f)
    if negative:
        coeff = -coeff
    return Real(coeff) if name is None else Real.named(name, coeff)


def _parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        if "." in text:
            return Fraction(text)
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal '{text}'") from exc
