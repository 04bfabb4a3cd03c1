"""Exact polynomial kernel: parsing, substitution, evaluation, integrality."""

import random
from fractions import Fraction

import pytest

from polywalk.poly import (
    MPoly,
    PolySyntaxError,
    PolyVector,
    UnknownIdentifierError,
    binomial_poly,
    poly_parse,
    poly_parse_auto,
)

F = Fraction


def test_parse_additive_identity():
    assert poly_parse("x + 0", ["x"]) == MPoly.var(("x",), "x")


def test_parse_square_expansion():
    # reference expansion of (z + n*x)^2 - z^2, frozen term by term
    expected = MPoly(("n", "x", "z"), {(1, 1, 1): F(2), (2, 2, 0): F(1)})
    assert poly_parse("(z + n*x)^2 - z^2", ["n", "x", "z"]) == expected


def test_parse_rejects_symbolic_exponent():
    with pytest.raises(PolySyntaxError) as err:
        poly_parse("x ^ y", ["x", "y"])
    assert err.value.position > 0


def test_parse_rejects_negative_exponent():
    with pytest.raises(PolySyntaxError):
        poly_parse("x^-2", ["x"])


def test_parse_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        poly_parse("x + w", ["x"])


def test_parse_reports_position():
    with pytest.raises(PolySyntaxError) as err:
        poly_parse("x + ", ["x"])
    assert err.value.position == 4


def test_parse_grammar_corners():
    # unary minus binds to the base, so -x^2 is (-x)^2 under this grammar
    assert poly_parse("-x^2", ["x"]) == poly_parse("x^2", ["x"])
    assert poly_parse("2^3", ["x"]) == MPoly.const(("x",), 8)
    assert poly_parse("1/2*x", ["x"]) == MPoly(("x",), {(1,): F(1, 2)})
    assert poly_parse("-(x + 1)", ["x"]) == MPoly(("x",), {(1,): F(-1), (0,): F(-1)})


def test_parse_auto_collects_variables():
    p = poly_parse_auto("a*b - c^2")
    assert p.vars == ("a", "b", "c")


def test_substitute_power_rule():
    t2 = poly_parse("t^2", ["t"])
    n3 = poly_parse("n^3", ["n"])
    assert t2.substitute({"t": n3}) == poly_parse("n^6", ["n"])


def test_substitute_preservation_identity():
    # the x*y - z^2 invariance under the first shear, expanded independently:
    # x*(y + 2*z*n + x*n^2) - (z + n*x)^2 collapses back to x*y - z^2
    vars4 = ("n", "x", "y", "z")
    p = poly_parse("x*y - z^2", ["x", "y", "z"])
    bindings = {
        "x": poly_parse("x", vars4),
        "y": poly_parse("y + 2*z*n + x*n^2", vars4),
        "z": poly_parse("z + n*x", vars4),
    }
    assert p.substitute(bindings) == p.extend(vars4)


def test_substitute_at_zero():
    t = poly_parse("t", ["t"])
    assert t.substitute({"t": MPoly.zero(())}).is_zero()


def test_substitute_rejects_retained_collision():
    p = poly_parse("x*y", ["x", "y"])
    with pytest.raises(ValueError, match="collides"):
        p.substitute({"x": poly_parse("y + 1", ["y"])})


def test_substitute_unbound_passthrough():
    p = poly_parse("x*y", ["x", "y"])
    out = p.substitute({"x": poly_parse("w^2", ["w"])})
    assert out == poly_parse("w^2*y", ["w", "y"])


def test_eval_examples():
    p = poly_parse("2*z*n + x*n^2", ["n", "x", "z"])
    assert p.eval({"n": 1, "x": 1, "z": 0}) == 1
    q = poly_parse("n^2 - n", ["n"])
    assert q.eval({"n": 7}) == 42
    assert poly_parse("x*y + 3*x", ["x", "y"]).eval({"x": 0, "y": 0}) == 0


def test_eval_rejects_unbound():
    with pytest.raises(ValueError, match="unbound"):
        poly_parse("x*y", ["x", "y"]).eval({"x": 1})


def test_integer_valued_binomial():
    c_n_2 = MPoly(("n",), {(2,): F(1, 2), (1,): F(-1, 2)})
    cert = c_n_2.integer_valued()
    assert cert.integral and cert.basis == "mahler"


def test_integer_valued_counterexample():
    cert = MPoly(("n",), {(1,): F(1, 2)}).integer_valued()
    assert not cert.integral
    assert cert.witness == {"n": 1}


def test_integer_valued_cubic():
    # (n^3 + 3n^2 + 2n)/6: Mahler oracle says coefficients (0, 1, 2, 1)
    p = MPoly(("n",), {(3,): F(1, 6), (2,): F(1, 2), (1,): F(1, 3)})
    cert = p.integer_valued()
    assert cert.integral
    assert cert.mahler == {(1,): F(1), (2,): F(2), (3,): F(1)}


def test_mahler_matches_binomial_basis():
    # C(n, 3) must have a single Mahler coordinate
    c3 = binomial_poly(("n",), "n", 3)
    assert c3.mahler_coefficients() == {(3,): F(1)}


def _random_poly(rng: random.Random, vars, degree=3, terms=4, rational=False) -> MPoly:
    out = {}
    for _ in range(terms):
        exps = tuple(rng.randint(0, degree) for _ in vars)
        num = rng.randint(-6, 6)
        den = rng.choice([1, 2, 3]) if rational else 1
        if num:
            out[exps] = F(num, den)
    return MPoly(vars, out)


def test_ring_axioms_random():
    rng = random.Random(20240811)
    vars3 = ("x", "y", "z")
    for _ in range(60):
        a = _random_poly(rng, vars3, rational=True)
        b = _random_poly(rng, vars3, rational=True)
        c = _random_poly(rng, vars3, rational=True)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_substitution_evaluation_consistency():
    rng = random.Random(77)
    vars2 = ("x", "y")
    inner_vars = ("u", "v")
    for _ in range(40):
        p = _random_poly(rng, vars2, degree=2, terms=3, rational=True)
        bindings = {
            "x": _random_poly(rng, inner_vars, degree=2, terms=2),
            "y": _random_poly(rng, inner_vars, degree=2, terms=2),
        }
        point = {"u": F(rng.randint(-4, 4)), "v": F(rng.randint(-4, 4))}
        via_subst = p.substitute(bindings).eval(point)
        via_eval = p.eval({v: bindings[v].eval(point) for v in vars2})
        assert via_subst == via_eval


def test_integer_valued_agrees_with_grid():
    rng = random.Random(4242)
    for _ in range(30):
        vars_n = ("a", "b")[: rng.randint(1, 2)]
        # mix Mahler-integral polynomials with genuinely fractional ones
        p = MPoly.zero(vars_n)
        for _ in range(3):
            ks = tuple(rng.randint(0, 3) for _ in vars_n)
            basis = MPoly.const(vars_n, 1)
            for v, k in zip(vars_n, ks):
                basis = basis * binomial_poly(vars_n, v, k)
            weight = F(rng.randint(-3, 3), rng.choice([1, 1, 1, 2]))
            p = p + basis * weight
        grid_ok = True
        points = [()]
        for _ in vars_n:
            points = [pt + (x,) for pt in points for x in range(-6, 7)]
        for pt in points:
            if p.eval(dict(zip(vars_n, pt))).denominator != 1:
                grid_ok = False
                break
        assert bool(p.integer_valued()) == grid_ok


def test_print_parse_roundtrip_random():
    rng = random.Random(99)
    for _ in range(60):
        vars_n = ("x", "y", "z")[: rng.randint(1, 3)]
        p = _random_poly(rng, vars_n, degree=4, terms=5, rational=True)
        assert poly_parse(str(p), vars_n) == p
        assert str(poly_parse(str(p), vars_n)) == str(p)


def test_zero_polynomial_conventions():
    z = MPoly.zero(("x",))
    assert z.is_zero()
    assert str(z) == "0"
    assert poly_parse("0", ["x"]) == z
    assert z.integer_valued().integral


def test_equality_ignores_unused_universe_vars():
    a = MPoly.var(("x",), "x")
    b = MPoly.var(("x", "y"), "x")
    assert a == b
    assert hash(a) == hash(b)


def test_polyvector_requires_shared_universe():
    with pytest.raises(ValueError, match="mixed universes"):
        PolyVector([MPoly.var(("x",), "x"), MPoly.var(("y",), "y")])


def test_polyvector_eval_int_rejects_fractions():
    pv = PolyVector([MPoly(("n",), {(1,): F(1, 2)})])
    with pytest.raises(ValueError, match="non-integer"):
        pv.eval_int({"n": 1})
