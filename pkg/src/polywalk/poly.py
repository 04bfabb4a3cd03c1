"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial is a finite map from exponent tuples to non-zero Fraction
coefficients, together with an ordered tuple of variable names.  The
representation is canonical: no zero coefficients are stored, coefficients
are Fractions (always in lowest terms with positive denominator), and two
values compare equal exactly when they denote the same polynomial, even if
their variable universes differ by unused names.

Terms print in graded lexicographic order (total degree descending, then
lexicographic by the declared variable order), which keeps printing and
serialization deterministic.

Values are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial, prod
from typing import Iterable, Mapping

_IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")

# Fresh time variables t, t1, t2, ... are reserved for walk machinery;
# walk coordinates must not use them (see walks.Walk).
_RESERVED_TIME_RE = re.compile(r"^t[0-9]*$")


def is_reserved_time_name(name: str) -> bool:
    return _RESERVED_TIME_RE.match(name) is not None


class PolySyntaxError(ValueError):
    """Expression text violates the grammar; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifierError(PolySyntaxError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier '{name}'", position)
        self.name = name


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


class MPoly:
    """Immutable sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("vars", "terms", "_canon", "_hash")

    def __init__(self, vars: Iterable[str], terms: Mapping[tuple[int, ...], Fraction]):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise ValueError(f"duplicate variable names in {vars}")
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != len(vars):
                raise ValueError(f"exponent tuple {exps} does not match variables {vars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = _as_fraction(coeff)
            if coeff != 0:
                clean[exps] = clean.get(exps, Fraction(0)) + coeff
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})
        object.__setattr__(self, "_canon", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("MPoly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, vars: Iterable[str]) -> MPoly:
        return cls(vars, {})

    @classmethod
    def const(cls, vars: Iterable[str], value) -> MPoly:
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): _as_fraction(value)})

    @classmethod
    def var(cls, vars: Iterable[str], name: str) -> MPoly:
        vars = tuple(vars)
        if name not in vars:
            raise ValueError(f"variable '{name}' not in universe {vars}")
        exps = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {exps: Fraction(1)})

    # -- canonical view (universe independent) ------------------------

    def _canonical(self) -> frozenset:
        # Monomials keyed by (name, exponent) pairs with zero exponents
        # dropped, so unused universe variables do not affect equality.
        cached = object.__getattribute__(self, "_canon")
        if cached is None:
            cached = frozenset(
                (frozenset((v, e) for v, e in zip(self.vars, exps) if e), coeff)
                for exps, coeff in self.terms.items()
            )
            object.__setattr__(self, "_canon", cached)
        return cached

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self) -> int:
        cached = object.__getattribute__(self, "_hash")
        if cached is None:
            cached = hash(self._canonical())
            object.__setattr__(self, "_hash", cached)
        return cached

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> tuple[str, ...]:
        """Variables that actually occur, in universe order."""
        used = [False] * len(self.vars)
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def coefficient(self, monomial: Mapping[str, int]) -> Fraction:
        exps = [0] * len(self.vars)
        for name, e in monomial.items():
            exps[self.vars.index(name)] = e
        return self.terms.get(tuple(exps), Fraction(0))

    def coefficients_in(self, name: str) -> dict[int, MPoly]:
        """View the polynomial as univariate in `name`: degree -> coefficient
        polynomial over the remaining universe."""
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        buckets: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for exps, coeff in self.terms.items():
            d = exps[i]
            key = exps[:i] + exps[i + 1:]
            buckets.setdefault(d, {})[key] = coeff
        return {d: MPoly(rest, t) for d, t in buckets.items()}

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> MPoly:
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise ValueError(
                    f"variable universes differ: {self.vars} vs {other.vars}"
                )
            return other
        return MPoly.const(self.vars, other)

    def __add__(self, other) -> MPoly:
        other = self._coerce(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return MPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> MPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MPoly:
        other = self._coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return MPoly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> MPoly:
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {n!r}")
        result = MPoly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- universe management ---------------------------------------------

    def extend(self, vars: Iterable[str]) -> MPoly:
        """Re-express over a universe that contains every current variable."""
        vars = tuple(vars)
        positions = []
        for v in self.vars:
            if v not in vars:
                raise ValueError(f"extension {vars} drops variable '{v}'")
            positions.append(vars.index(v))
        out = {}
        for exps, coeff in self.terms.items():
            key = [0] * len(vars)
            for pos, e in zip(positions, exps):
                key[pos] = e
            out[tuple(key)] = coeff
        return MPoly(vars, out)

    # -- substitution and evaluation --------------------------------------

    def substitute(self, bindings: Mapping[str, MPoly]) -> MPoly:
        """Exact polynomial composition.

        Bound variables are replaced by their binding polynomials; unbound
        universe variables pass through.  A binding may not introduce a
        variable with the same name as a retained variable of this
        polynomial (that would silently identify two distinct symbols).
        """
        for name in bindings:
            if name not in self.vars:
                raise ValueError(f"binding for '{name}' which is not in universe {self.vars}")
        retained = [v for v in self.vars if v not in bindings]
        target: list[str] = list(retained)
        for v in self.vars:
            if v in bindings:
                introduced = set(bindings[v].support())
                for w in bindings[v].vars:
                    if w in retained and w in introduced:
                        raise ValueError(
                            f"binding for '{v}' introduces '{w}' which collides "
                            f"with a retained variable"
                        )
                    if w not in target:
                        target.append(w)
        target_t = tuple(target)

        embedded = {v: bindings[v].extend(target_t) for v in bindings}
        power_cache: dict[tuple[str, int], MPoly] = {}

        def powered(name: str, e: int) -> MPoly:
            key = (name, e)
            if key not in power_cache:
                power_cache[key] = embedded[name] ** e
            return power_cache[key]

        total = MPoly.zero(target_t)
        for exps, coeff in self.terms.items():
            term = MPoly.const(target_t, coeff)
            passthrough = [0] * len(target_t)
            for v, e in zip(self.vars, exps):
                if e == 0:
                    continue
                if v in embedded:
                    term = term * powered(v, e)
                else:
                    passthrough[target.index(v)] = e
            if any(passthrough):
                term = term * MPoly(target_t, {tuple(passthrough): Fraction(1)})
            total = total + term
        return total if total.vars == target_t else total.extend(target_t)

    def eval(self, point: Mapping[str, Fraction | int]) -> Fraction:
        """Exact value at a rational point; every occurring variable must be bound."""
        values = []
        for i, v in enumerate(self.vars):
            if v in point:
                values.append(_as_fraction(point[v]))
            else:
                if any(e[i] for e in self.terms):
                    raise ValueError(f"unbound variable '{v}'")
                values.append(Fraction(0))
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for val, e in zip(values, exps):
                if e:
                    term *= val ** e
            total += term
        return total

    # -- integer-valuedness ------------------------------------------------

    def mahler_coefficients(self) -> dict[tuple[int, ...], Fraction]:
        """Coordinates in the product binomial basis C(v1,a1)*...*C(vk,ak).

        Computed by iterated finite differences at the origin:
        c_a = sum_{b <= a} (-1)^{|a-b|} prod C(a_i, b_i) * p(b).
        """
        degs = [self.degree_in(v) for v in self.vars]
        values = {b: self.eval(dict(zip(self.vars, b))) for b in _grid(degs)}
        coeffs: dict[tuple[int, ...], Fraction] = {}
        for a in _grid(degs):
            total = Fraction(0)
            for b in _grid(a):
                sign = -1 if sum(x - y for x, y in zip(a, b)) % 2 else 1
                weight = prod(_binom_int(x, y) for x, y in zip(a, b))
                total += sign * weight * values[b]
            if total != 0:
                coeffs[a] = total
        return coeffs

    def integer_valued(self) -> IntegralityCertificate:
        """Decide whether the polynomial is integer at every integer point.

        An integer-coefficient polynomial is trivially integral; otherwise
        the Mahler expansion certifies integrality (all coordinates integer)
        or yields a non-integral coordinate, in which case a concrete
        integer witness point exists inside the degree grid.
        """
        if self.has_integer_coefficients():
            return IntegralityCertificate(True, "integer-coefficients", {}, None)
        coeffs = self.mahler_coefficients()
        bad = {a: c for a, c in coeffs.items() if c.denominator != 1}
        if not bad:
            return IntegralityCertificate(True, "mahler", coeffs, None)
        degs = [self.degree_in(v) for v in self.vars]
        witness = None
        for point in _grid(degs):
            if self.eval(dict(zip(self.vars, point))).denominator != 1:
                witness = dict(zip(self.vars, point))
                break
        return IntegralityCertificate(False, "mahler", coeffs, witness)

    # -- printing ----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        # Graded lex: total degree descending, then exponent vector descending
        # in the declared variable order.
        return sorted(
            self.terms.items(),
            key=lambda item: (-sum(item[0]), tuple(-e for e in item[0])),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for index, (exps, coeff) in enumerate(self.sorted_terms()):
            monomial = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.vars, exps)
                if e
            )
            mag = abs(coeff)
            if monomial and mag == 1:
                body = monomial
            elif monomial:
                body = f"{_fmt_fraction(mag)}*{monomial}"
            else:
                body = _fmt_fraction(mag)
            if index == 0:
                if coeff < 0:
                    # A leading "-x^2" would re-parse as (-x)^2 under the
                    # grammar, so keep the sign fused to an explicit number.
                    pieces.append(f"-{_fmt_fraction(mag)}*{monomial}" if monomial else f"-{_fmt_fraction(mag)}")
                else:
                    pieces.append(body)
            else:
                pieces.append(f" {'-' if coeff < 0 else '+'} {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"MPoly({self})"


class IntegralityCertificate:
    """Outcome of the integer-valuedness check.

    `basis` records how integrality was certified: 'integer-coefficients'
    (trivial) or 'mahler' (binomial-basis expansion).  When the check fails,
    `witness` is an integer point with a non-integer value.
    """

    __slots__ = ("integral", "basis", "mahler", "witness")

    def __init__(self, integral: bool, basis: str, mahler, witness):
        self.integral = integral
        self.basis = basis
        self.mahler = mahler
        self.witness = witness

    def __bool__(self) -> bool:
        return self.integral

    def __repr__(self) -> str:
        status = "integral" if self.integral else f"non-integral (witness {self.witness})"
        return f"IntegralityCertificate({status}, via {self.basis})"


def _binom_int(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


def _grid(limits: Iterable[int]):
    """All integer tuples 0 <= b_i <= limits_i, in lexicographic order."""
    limits = list(limits)
    if not limits:
        yield ()
        return
    head, *tail = limits
    for h in range(head + 1):
        for rest in _grid(tail):
            yield (h, *rest)


def binomial_poly(vars: Iterable[str], name: str, k: int) -> MPoly:
    """The binomial coefficient C(name, k) as a polynomial: name*(name-1)*.../k!."""
    vars = tuple(vars)
    result = MPoly.const(vars, Fraction(1, factorial(k)))
    v = MPoly.var(vars, name)
    for s in range(k):
        result = result * (v - s)
    return result


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- parsing ---------------------------------------------------------------
#
# expr   := term (("+"|"-") term)*
# term   := factor ("*" factor)*
# factor := base ("^" nonneg-int)?
# base   := number | identifier | "(" expr ")" | "-" base
# number := nonneg-int ("/" nonneg-int)?
#
# The "/" extension over plain integers lets rational coefficients
# round-trip through printing (needed for binomial-coefficient entries).


class _Parser:
    def __init__(self, text: str, vars: tuple[str, ...]):
        self.text = text
        self.vars = vars
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, message: str):
        raise PolySyntaxError(message, self.pos)

    def parse(self) -> MPoly:
        result = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected '{self.text[self.pos]}'")
        return result

    def expr(self) -> MPoly:
        result = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> MPoly:
        result = self.factor()
        while self.peek() == "*":
            self.pos += 1
            result = result * self.factor()
        return result

    def factor(self) -> MPoly:
        base = self.base()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
                self.error("exponent must be a non-negative integer literal")
            return base ** self.integer()
        return base

    def base(self) -> MPoly:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return inner
        if ch == "-":
            self.pos += 1
            return -self.base()
        if ch.isdigit():
            num = self.integer()
            if self.peek() == "/":
                self.pos += 1
                self.skip_ws()
                if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
                    self.error("expected integer denominator")
                den = self.integer()
                if den == 0:
                    self.error("zero denominator")
                return MPoly.const(self.vars, Fraction(num, den))
            return MPoly.const(self.vars, num)
        match = _IDENT_RE.match(self.text, self.pos)
        if match is not None:
            start = self.pos
            name = match.group(0)
            self.pos = match.end()
            if name not in self.vars:
                raise UnknownIdentifierError(name, start)
            return MPoly.var(self.vars, name)
        self.error("expected a number, identifier, '(' or '-'")

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int(self.text[start:self.pos])


def poly_parse(text: str, vars: Iterable[str]) -> MPoly:
    """Parse an expression over the declared variables into canonical form."""
    return _Parser(text, tuple(vars)).parse()


def poly_parse_auto(text: str) -> MPoly:
    """Parse with the universe inferred from identifiers, in order of first use."""
    seen: list[str] = []
    for match in _IDENT_RE.finditer(text):
        if match.group(0) not in seen:
            seen.append(match.group(0))
    return poly_parse(text, seen)


class PolyVector:
    """Ordered sequence of polynomials over one shared variable universe."""

    __slots__ = ("entries", "vars")

    def __init__(self, entries: Iterable[MPoly]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("PolyVector must be non-empty")
        vars = entries[0].vars
        for p in entries[1:]:
            if p.vars != vars:
                raise ValueError(f"mixed universes: {vars} vs {p.vars}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "vars", vars)

    def __setattr__(self, name, value):
        raise AttributeError("PolyVector is immutable")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> MPoly:
        return self.entries[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def substitute(self, bindings: Mapping[str, MPoly]) -> PolyVector:
        return PolyVector([p.substitute(bindings) for p in self.entries])

    def eval(self, point: Mapping[str, Fraction | int]) -> tuple[Fraction, ...]:
        return tuple(p.eval(point) for p in self.entries)

    def eval_int(self, point: Mapping[str, int]) -> tuple[int, ...]:
        values = self.eval(point)
        for v in values:
            if v.denominator != 1:
                raise ValueError(f"non-integer value {v} at {dict(point)}")
        return tuple(v.numerator for v in values)

    def max_degree(self) -> int:
        return max(p.total_degree() for p in self.entries)

    def __repr__(self) -> str:
        return "PolyVector(" + ", ".join(str(p) for p in self.entries) + ")"
