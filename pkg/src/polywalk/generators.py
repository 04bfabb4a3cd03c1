"""The concrete walk families: unipotent matrix powers, adjoint actions,
the xy - P(z) symmetries, the x - P(y) walk, and signature (p,q) form
generators.

Integer matrices are plain tuples of tuples; everything stays in exact
arithmetic.  Every constructor certifies its defining identity on the spot
(form preservation, unipotency, identity at time zero) so the returned
walks are trustworthy values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import MPoly, binomial_poly
from .walks import TIME, Walk, default_coords, preserves

IntMatrix = tuple[tuple[int, ...], ...]


class NotUnipotent(ValueError):
    def __init__(self, size: int):
        super().__init__(f"(g - I)^{size} != 0 for the {size}x{size} matrix")
        self.size = size


def mat(rows: Sequence[Sequence[int]]) -> IntMatrix:
    out = tuple(tuple(int(x) for x in row) for row in rows)
    n = len(out)
    if any(len(row) != n for row in out):
        raise ValueError("matrix must be square")
    return out


def mat_identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def mat_apply(a: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def mat_sub(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(
        tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def mat_is_zero(a: IntMatrix) -> bool:
    return all(all(x == 0 for x in row) for row in a)


def mat_pow(a: IntMatrix, k: int) -> IntMatrix:
    result = mat_identity(len(a))
    for _ in range(k):
        result = mat_mul(result, a)
    return result


def mat_det(a: IntMatrix) -> int:
    # Fraction-based elimination; exact for integer input.
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        inv = m[c][c]
        m[c] = [x / inv for x in m[c]]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    assert det.denominator == 1
    return det.numerator


def mat_inverse_sl(a: IntMatrix) -> IntMatrix:
    """Inverse of a determinant-one integer matrix (integral by Cramer)."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        m[c], m[pivot] = m[pivot], m[c]
        inv = m[c][c]
        m[c] = [x / inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    out = []
    for row in m:
        tail = row[n:]
        if any(x.denominator != 1 for x in tail):
            raise ValueError("inverse is not integral (determinant is not +-1)")
        out.append(tuple(x.numerator for x in tail))
    return tuple(out)


def nilpotency_index(a: IntMatrix) -> int | None:
    """Least j with a^j = 0, or None if a is not nilpotent (j <= size suffices)."""
    n = len(a)
    power = mat_identity(n)
    for j in range(n + 1):
        if mat_is_zero(power):
            return j
        power = mat_mul(power, a)
    return None


def unipotent_walk(gamma: Sequence[Sequence[int]], coords: Sequence[str] | None = None) -> Walk:
    """The walk n -> gamma^n, written through the binomial expansion
    gamma^n = sum_j C(n, j) (gamma - I)^j (finite because gamma - I is
    nilpotent).  Entries have rational coefficients but certify integral."""
    gamma = mat(gamma)
    n = len(gamma)
    nil = mat_sub(gamma, mat_identity(n))
    index = nilpotency_index(nil)
    if index is None:
        raise NotUnipotent(n)

    coords = tuple(coords) if coords is not None else default_coords(n)
    universe = (TIME,) + coords
    xs = [MPoly.var(universe, c) for c in coords]
    entries = [MPoly.zero(universe) for _ in range(n)]
    power = mat_identity(n)
    for j in range(index):
        cnj = binomial_poly(universe, TIME, j)
        for i in range(n):
            acc = MPoly.zero(universe)
            for l in range(n):
                if power[i][l]:
                    acc = acc + xs[l] * power[i][l]
            if not acc.is_zero():
                entries[i] = entries[i] + cnj * acc
        power = mat_mul(power, nil)
    return Walk(entries, coords)


# -- adjoint representation -------------------------------------------------

def sl_basis(n: int) -> list[IntMatrix]:
    """Fixed basis of the trace-zero n x n matrices.

    n=2 uses (e, h, f) = (E12, E11-E22, E21); larger n lists the
    off-diagonal elementary matrices row-major, then the consecutive
    diagonal differences.  Fixed so adjoint matrices are reproducible."""
    def unit(i, j):
        return tuple(
            tuple(1 if (r, c) == (i, j) else 0 for c in range(n)) for r in range(n)
        )

    def diag_diff(i):
        return tuple(
            tuple((1 if r == c == i else -1 if r == c == i + 1 else 0)
                  for c in range(n))
            for r in range(n)
        )

    if n == 2:
        return [unit(0, 1), diag_diff(0), unit(1, 0)]
    basis = [unit(i, j) for i in range(n) for j in range(n) if i != j]
    basis += [diag_diff(i) for i in range(n - 1)]
    return basis


def sl_coordinates(a: IntMatrix) -> tuple[int, ...]:
    """Coordinates of a trace-zero matrix in the sl_basis order."""
    n = len(a)
    if sum(a[i][i] for i in range(n)) != 0:
        raise ValueError("matrix must be trace-zero")
    if n == 2:
        return (a[0][1], a[0][0], a[1][0])
    off = [a[i][j] for i in range(n) for j in range(n) if i != j]
    partial = []
    running = 0
    for i in range(n - 1):
        running += a[i][i]
        partial.append(running)
    return tuple(off + partial)


def adjoint_action_matrix(g: Sequence[Sequence[int]]) -> IntMatrix:
    """Matrix of A -> g A g^(-1) on the trace-zero matrices, in sl_basis."""
    g = mat(g)
    if mat_det(g) != 1:
        raise ValueError(f"determinant must be 1, got {mat_det(g)}")
    g_inv = mat_inverse_sl(g)
    columns = [
        sl_coordinates(mat_mul(mat_mul(g, b), g_inv)) for b in sl_basis(len(g))
    ]
    d = len(columns)
    return tuple(tuple(columns[j][i] for j in range(d)) for i in range(d))


# -- form-preserving families ------------------------------------------------

def _require_admissible(p: MPoly, var: str):
    if p.support() not in ((), (var,)):
        raise ValueError(f"polynomial must involve only '{var}', got {p.support()}")
    if not p.has_integer_coefficients():
        raise ValueError("polynomial must have integer coefficients")
    if p.eval({var: 0}) != 0:
        raise ValueError(f"P(0) must be 0, got {p.eval({var: 0})}")
    if p.degree_in(var) < 2:
        raise ValueError(f"degree must be >= 2, got {p.degree_in(var)}")


def secant_quotient(p: MPoly, var: str, shift: MPoly, denominator: str) -> MPoly:
    """(P(var + shift) - P(var)) / denominator, exact by construction:
    the numerator vanishes when the denominator variable does, so every
    surviving monomial carries it."""
    subs = {v: MPoly.var(shift.vars, v) for v in p.vars if v != var}
    subs[var] = MPoly.var(shift.vars, var) + shift
    numerator = p.substitute(subs) - p.extend(shift.vars)
    idx = numerator.vars.index(denominator)
    out = {}
    for exps, coeff in numerator.terms.items():
        if exps[idx] == 0:
            raise ArithmeticError(
                f"monomial {exps} lacks '{denominator}'; division is not exact"
            )
        key = exps[:idx] + (exps[idx] - 1,) + exps[idx + 1:]
        out[key] = coeff
    return MPoly(numerator.vars, out)


def _to_single_var(p: MPoly, var: str) -> MPoly:
    if p.vars == (var,):
        return p
    idx = p.vars.index(var)
    return MPoly((var,), {(exps[idx],): c for exps, c in p.terms.items()})


def xy_minus_P_walks(p: MPoly) -> tuple[Walk, Walk]:
    """The two shear walks preserving x*y - P(z):

        S1(n)(x, y, z) = (x, y + H(n, x, z), z + n*x)
        S2(n)(x, y, z) = (x + H(n, y, z), y, z + n*y)

    with H(n, x, z) = (P(z + n*x) - P(z)) / x."""
    var = p.support()[0] if p.support() else "z"
    _require_admissible(p, var)
    p = _to_single_var(p, var)

    coords = ("x", "y", "z")
    universe = (TIME,) + coords
    x = MPoly.var(universe, "x")
    y = MPoly.var(universe, "y")
    z = MPoly.var(universe, "z")
    t = MPoly.var(universe, TIME)

    h_x = secant_quotient(p.substitute({var: z}), "z", t * x, "x")
    h_y = secant_quotient(p.substitute({var: z}), "z", t * y, "y")

    s1 = Walk([x, y + h_x, z + t * x], coords)
    s2 = Walk([x + h_y, y, z + t * y], coords)

    form = MPoly.var(coords, "x") * MPoly.var(coords, "y") - p.substitute(
        {var: MPoly.var(coords, "z")}
    ).extend(coords)
    for walk in (s1, s2):
        if not preserves(form, walk):
            raise AssertionError("constructed walk fails to preserve x*y - P(z)")
    return s1, s2


def bogolubov_walk(p: MPoly) -> Walk:
    """The walk (x, y) -> (x + P(y + n) - P(y), y + n), preserving x - P(y)."""
    var = p.support()[0] if p.support() else "y"
    _require_admissible(p, var)

    coords = ("x", "y")
    universe = (TIME,) + coords
    x = MPoly.var(universe, "x")
    y = MPoly.var(universe, "y")
    t = MPoly.var(universe, TIME)

    p_of_y = p.substitute({var: y})
    p_shifted = p.substitute({var: y + t})
    walk = Walk([x + p_shifted - p_of_y, y + t], coords)

    form = MPoly.var(coords, "x") - p.substitute({var: MPoly.var(coords, "y")}).extend(coords)
    if not preserves(form, walk):
        raise AssertionError("constructed walk fails to preserve x - P(y)")
    return walk


# -- signature (p, q) quadratic forms ----------------------------------------

# Block generators on coordinates (x, y1, y2) preserving x^2 - y1^2 - y2^2,
# obtained by conjugating the even-entry shear generators through the
# determinant identity x^2 - y1^2 - y2^2 = det [[y2, -(x+y1)], [x-y1, -y2]].
_LAMBDA_GENERATORS = (((1, 2), (0, 1)), ((1, 0), (2, 1)))


def _block_generator(gamma0: IntMatrix) -> IntMatrix:
    """Push A -> gamma0 A gamma0^(-1) through the (x, y1, y2) coordinates of
    the even-off-diagonal trace-zero matrices."""
    g_inv = mat_inverse_sl(gamma0)
    columns = []
    for basis_vec in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        bx, by1, by2 = basis_vec
        a = ((by2, -(bx + by1)), (bx - by1, -by2))
        conj = mat_mul(mat_mul(gamma0, a), g_inv)
        a11, a12 = conj[0]
        a21, _ = conj[1]
        if (a21 - a12) % 2 or (-a12 - a21) % 2:
            raise AssertionError("conjugation left the even-entry sublattice")
        columns.append(((a21 - a12) // 2, (-a12 - a21) // 2, a11))
    return tuple(tuple(columns[j][i] for j in range(3)) for i in range(3))


def _embed_block(block: IntMatrix, dim: int, positions: tuple[int, int, int]) -> IntMatrix:
    rows = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    for bi, gi in enumerate(positions):
        for bj, gj in enumerate(positions):
            rows[gi][gj] = block[bi][bj]
    for gi in positions:
        for j in range(dim):
            if j not in positions:
                rows[gi][j] = 0
    return tuple(tuple(row) for row in rows)


def signature_form(p: int, q: int) -> MPoly:
    coords = tuple(f"x{i + 1}" for i in range(p)) + tuple(f"y{j + 1}" for j in range(q))
    form = MPoly.zero(coords)
    for i in range(p):
        form = form + MPoly.var(coords, f"x{i + 1}") ** 2
    for j in range(q):
        form = form - MPoly.var(coords, f"y{j + 1}") ** 2
    return form


class SignatureGenerators:
    """Generator matrices and walks for x_1^2+..+x_p^2 - y_1^2-..-y_q^2."""

    __slots__ = ("p", "q", "blocks", "matrices", "walks", "form")

    def __init__(self, p, q, blocks, matrices, walks, form):
        self.p = p
        self.q = q
        self.blocks = blocks
        self.matrices = matrices
        self.walks = walks
        self.form = form


def signature_form_walks(p: int, q: int) -> SignatureGenerators:
    """Unipotent generators acting on overlapping 3-dimensional blocks
    (one plus-coordinate, two minus-coordinates), each preserving the form.

    The block chain (a, 1, 2) for every a plus (1, b, b+1) for every b makes
    consecutive blocks overlap, which is what lets the blockwise actions
    combine into one irreducibly-acting family."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    if q < 2:
        raise ValueError(f"need q >= 2 (no 3-dimensional block exists), got {q}")
    dim = p + q
    form = signature_form(p, q)
    coords = form.vars

    blocks: list[tuple[int, int, int]] = []
    for a in range(1, p + 1):
        blocks.append((a, 1, 2))
    for b in range(1, q):
        candidate = (1, b, b + 1)
        if candidate not in blocks:
            blocks.append(candidate)

    base_blocks = [_block_generator(mat(g)) for g in _LAMBDA_GENERATORS]
    matrices: list[IntMatrix] = []
    for (a, b, c) in blocks:
        positions = (a - 1, p + b - 1, p + c - 1)
        for base in base_blocks:
            matrices.append(_embed_block(base, dim, positions))

    walks = [unipotent_walk(m, coords) for m in matrices]
    for walk in walks:
        if not preserves(form, walk):
            raise AssertionError("signature generator fails to preserve the form")
    return SignatureGenerators(p, q, tuple(blocks), tuple(matrices), tuple(walks), form)
