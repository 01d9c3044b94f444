"""Exact integer lattice arithmetic: normal forms, basis extension, quotients.

Everything runs over Z with Python ints, so results are exact at any size.
Matrices are tuples of row tuples and vectors are plain int tuples; both are
treated as immutable. Row vectors live in the character lattice M, columns
in the cocharacter lattice N, and ``pairing`` is the evaluation between them.

All transformation matrices returned here are unimodular (det = +-1), and
every function is deterministic: identical input gives identical output,
including the choice of pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

LatticeVector = tuple[int, ...]
LatticeMatrix = tuple[tuple[int, ...], ...]


def pairing(m: LatticeVector, v: LatticeVector) -> int:
    """Evaluation <m, v> of a character on a one-parameter subgroup."""
    if len(m) != len(v):
        raise ValueError(f"pairing needs equal lengths, got {len(m)} and {len(v)}")
    return sum(a * b for a, b in zip(m, v))


def vec_add(a: LatticeVector, b: LatticeVector) -> LatticeVector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: LatticeVector, b: LatticeVector) -> LatticeVector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c: int, a: LatticeVector) -> LatticeVector:
    return tuple(c * x for x in a)


def is_zero_vector(a: LatticeVector) -> bool:
    return all(x == 0 for x in a)


def content(v: LatticeVector) -> int:
    """gcd of the entries, 0 for the zero vector."""
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def is_primitive(v: LatticeVector) -> bool:
    """True when v is part of some Z-basis of its own line, i.e. content 1."""
    return content(v) == 1


def primitive_part(v: LatticeVector) -> LatticeVector:
    """v divided by its content, keeping direction. Zero vector is refused."""
    g = content(v)
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return tuple(x // g for x in v)


def identity_matrix(n: int) -> LatticeMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: LatticeMatrix) -> LatticeMatrix:
    return tuple(zip(*a)) if a else ()


def mat_mul(a: LatticeMatrix, b: LatticeMatrix) -> LatticeMatrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: LatticeMatrix, x: LatticeVector) -> LatticeVector:
    """a applied to the column vector x."""
    return tuple(sum(r * c for r, c in zip(row, x)) for row in a)


def vec_mat(x: LatticeVector, a: LatticeMatrix) -> LatticeVector:
    """Row vector x times a."""
    if not a:
        return ()
    return tuple(sum(x[i] * a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def determinant(a: LatticeMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # Bareiss: division is exact by construction
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def matrix_rank(a) -> int:
    """Rank over Q by fraction elimination."""
    rows = [list(map(Fraction, r)) for r in a]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for c in range(cols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def rational_inverse(a: LatticeMatrix):
    """Inverse of a over Q as Fraction rows, or None when singular."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("rational_inverse needs a square matrix")
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            return None
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return tuple(tuple(row[n:]) for row in m)


def integer_inverse(a: LatticeMatrix) -> LatticeMatrix:
    """Inverse of a unimodular matrix, as an integer matrix."""
    inv = rational_inverse(a)
    if inv is None:
        raise ValueError("matrix is singular")
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


@dataclass(frozen=True)
class SmithDecomposition:
    """U A V = D with U, V unimodular and D diagonal, d1 | d2 | ... | dr."""

    u: LatticeMatrix
    d: LatticeMatrix
    v: LatticeMatrix
    invariant_factors: tuple[int, ...]


def _min_abs_pivot(d, rows, cols, t):
    # smallest nonzero |entry| in the trailing block; ties resolved row-major
    best = None
    for i in range(t, rows):
        for j in range(t, cols):
            if d[i][j] != 0 and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(a: LatticeMatrix) -> SmithDecomposition:
    """Smith normal form with both transforms.

    Pivot choice is the globally smallest nonzero absolute value in the
    remaining block, row-major on ties, which keeps intermediate entries
    small without ever leaving Z.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(r) != cols for r in a):
        raise ValueError("ragged matrix")
    d = [list(r) for r in a]
    u = [list(r) for r in identity_matrix(rows)]
    v = [list(r) for r in identity_matrix(cols)]

    def row_sub(i, k, q):
        # row i -= q * row k
        for j in range(cols):
            d[i][j] -= q * d[k][j]
        for j in range(rows):
            u[i][j] -= q * u[k][j]

    def col_sub(j, k, q):
        # col j -= q * col k
        for i in range(rows):
            d[i][j] -= q * d[i][k]
        for i in range(cols):
            v[i][j] -= q * v[i][k]

    def col_add(j, k):
        for i in range(rows):
            d[i][j] += d[i][k]
        for i in range(cols):
            v[i][j] += v[i][k]

    def clear_stage(t):
        while True:
            piv = _min_abs_pivot(d, rows, cols, t)
            if piv is None:
                return False
            pi, pj = piv
            if pi != t:
                d[pi], d[t] = d[t], d[pi]
                u[pi], u[t] = u[t], u[pi]
            if pj != t:
                for row in d:
                    row[pj], row[t] = row[t], row[pj]
                for row in v:
                    row[pj], row[t] = row[t], row[pj]
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t] != 0:
                    row_sub(i, t, d[i][t] // d[t][t])
                    if d[i][t] != 0:
                        dirty = True
            for j in range(t + 1, cols):
                if d[t][j] != 0:
                    col_sub(j, t, d[t][j] // d[t][t])
                    if d[t][j] != 0:
                        dirty = True
            if not dirty:
                return True

    limit = min(rows, cols)
    t = 0
    while t < limit:
        if not clear_stage(t):
            break
        t += 1
    r = t

    # enforce the divisibility chain; a failed pair pulls the next column in
    # and the stage is cleared again
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            if d[i + 1][i + 1] % d[i][i] != 0:
                col_add(i, i + 1)
                t = i
                while t < r:
                    clear_stage(t)
                    t += 1
                changed = True
                break

    for i in range(r):
        if d[i][i] < 0:
            for j in range(cols):
                d[i][j] = -d[i][j]
            for j in range(rows):
                u[i][j] = -u[i][j]

    dd = tuple(tuple(row) for row in d)
    return SmithDecomposition(
        u=tuple(tuple(row) for row in u),
        d=dd,
        v=tuple(tuple(row) for row in v),
        invariant_factors=tuple(dd[i][i] for i in range(r)),
    )


def hermite_normal_form(a: LatticeMatrix) -> tuple[LatticeMatrix, LatticeMatrix]:
    """Row-style Hermite normal form. Returns (h, u) with u a = h.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    and zero rows sink to the bottom. u is unimodular.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    h = [list(r) for r in a]
    u = [list(r) for r in identity_matrix(rows)]

    def row_sub(i, k, q):
        for j in range(cols):
            h[i][j] -= q * h[k][j]
        for j in range(rows):
            u[i][j] -= q * u[k][j]

    pr = 0
    for c in range(cols):
        if pr == rows:
            break
        while True:
            nz = [i for i in range(pr, rows) if h[i][c] != 0]
            if not nz:
                break
            imin = min(nz, key=lambda i: (abs(h[i][c]), i))
            if imin != pr:
                h[imin], h[pr] = h[pr], h[imin]
                u[imin], u[pr] = u[pr], u[imin]
            done = True
            for i in range(pr + 1, rows):
                if h[i][c] != 0:
                    row_sub(i, pr, h[i][c] // h[pr][c])
                    if h[i][c] != 0:
                        done = False
            if done:
                break
        if h[pr][c] == 0:
            continue
        if h[pr][c] < 0:
            h[pr] = [-x for x in h[pr]]
            u[pr] = [-x for x in u[pr]]
        for i in range(pr):
            if h[i][c] != 0:
                row_sub(i, pr, h[i][c] // h[pr][c])
        pr += 1
    return tuple(tuple(r) for r in h), tuple(tuple(r) for r in u)


def in_row_span(a: LatticeMatrix, x: LatticeVector) -> bool:
    """Membership of x in the Z-span of the rows of a, via Hermite reduction."""
    if not a:
        return is_zero_vector(x)
    h, _ = hermite_normal_form(a)
    pivots = {}
    for i, row in enumerate(h):
        for j, val in enumerate(row):
            if val != 0:
                pivots[j] = i
                break
    y = list(x)
    for j in range(len(y)):
        if y[j] == 0:
            continue
        if j not in pivots:
            return False
        row = h[pivots[j]]
        if y[j] % row[j] != 0:
            return False
        q = y[j] // row[j]
        for k in range(j, len(y)):
            y[k] -= q * row[k]
    return True


def extends_to_basis(vectors) -> bool:
    """Whether the given rows are part of some Z-basis of the ambient lattice.

    Equivalent to the gcd of all maximal minors being 1, which is exactly
    the invariant factors of the stacked matrix being all 1.
    """
    vs = tuple(tuple(v) for v in vectors)
    if not vs:
        return True
    k = len(vs)
    n = len(vs[0])
    if k > n:
        return False
    invf = smith_normal_form(vs).invariant_factors
    return len(invf) == k and all(f == 1 for f in invf)


def complete_to_basis(vectors) -> LatticeMatrix | None:
    """Extend the given rows to a full Z-basis, or None when impossible.

    The output stacks the inputs on top of complementary rows drawn from the
    Smith transform, so it is deterministic.
    """
    vs = tuple(tuple(v) for v in vectors)
    if not vs:
        raise ValueError("nothing to complete")
    n = len(vs[0])
    if not extends_to_basis(vs):
        return None
    k = len(vs)
    dec = smith_normal_form(vs)
    vinv = integer_inverse(dec.v)
    full = vs + vinv[k:]
    assert abs(determinant(full)) == 1
    return full


def solve_dual_pair(v: LatticeVector, vp: LatticeVector):
    """Characters (e, ep) with <e,v> = -1, <e,vp> = 0, <ep,v> = 0, <ep,vp> = -1.

    Exists iff the pair {v, vp} extends to a basis of N; returns None otherwise.
    """
    n = len(v)
    if len(vp) != n:
        raise ValueError("mismatched lengths")
    stacked = (tuple(v), tuple(vp))
    dec = smith_normal_form(stacked)
    if dec.invariant_factors != (1, 1):
        return None

    def solve(b):
        ub = mat_vec(dec.u, b)
        y = (ub[0], ub[1]) + (0,) * (n - 2)
        return mat_vec(dec.v, y)

    e = solve((-1, 0))
    ep = solve((0, -1))
    assert pairing(e, v) == -1 and pairing(e, vp) == 0
    assert pairing(ep, v) == 0 and pairing(ep, vp) == -1
    return e, ep


@dataclass(frozen=True)
class QuasitorusPresentation:
    """Diagonalizable group presented as (K*)^free_rank x prod mu_d.

    ``characters`` keeps the defining relation rows for reproducibility.
    """

    free_rank: int
    torsion: tuple[int, ...]
    characters: LatticeMatrix

    def order(self):
        """Group order when finite, else None."""
        if self.free_rank > 0:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def is_connected(self) -> bool:
        return not self.torsion


class LatticeQuotient:
    """Finitely generated abelian group Z^rank / <rows of relations>.

    Element classes are labelled canonically through the Smith transform:
    the label lists the coordinates in the torsion summands with modulus
    above 1 first, then the free coordinates.
    """

    def __init__(self, rank: int, relations=()):
        rels = tuple(tuple(r) for r in relations)
        for r in rels:
            if len(r) != rank:
                raise ValueError("relation length does not match rank")
        self.rank = rank
        self.relations = rels
        if rels:
            dec = smith_normal_form(rels)
            self._v = dec.v
            invf = dec.invariant_factors
        else:
            self._v = identity_matrix(rank)
            invf = ()
        self.invariant_factors = invf
        self.free_rank = rank - len(invf)
        self.torsion = tuple(f for f in invf if f != 1)

    def degree(self, x: LatticeVector) -> tuple[int, ...]:
        """Canonical label of the class of x."""
        if len(x) != self.rank:
            raise ValueError("vector length does not match rank")
        y = vec_mat(x, self._v)
        label = []
        for i, f in enumerate(self.invariant_factors):
            if f != 1:
                label.append(y[i] % f)
        label.extend(y[len(self.invariant_factors):])
        return tuple(label)

    def is_zero(self, x: LatticeVector) -> bool:
        return all(c == 0 for c in self.degree(x))

    def same_class(self, x: LatticeVector, y: LatticeVector) -> bool:
        # membership in the relation span decides equality of classes
        return in_row_span(self.relations, vec_sub(x, y)) if self.relations \
            else x == tuple(y)

    def presentation(self) -> QuasitorusPresentation:
        """Character group of Hom(K, K*) presented as a quasitorus."""
        return QuasitorusPresentation(
            free_rank=self.free_rank,
            torsion=self.torsion,
            characters=self.relations,
        )


def quasitorus_kernel(quotient: LatticeQuotient, d: LatticeVector) -> QuasitorusPresentation:
    """Kernel of the character d inside the quasitorus dual to the quotient.

    Characters of K that kill the class of d form the character group of
    K / <class(d)>, so the kernel is presented by the augmented relations.
    """
    if len(d) != quotient.rank:
        raise ValueError("vector length does not match rank")
    augmented = quotient.relations + (tuple(d),)
    finer = LatticeQuotient(quotient.rank, augmented)
    return QuasitorusPresentation(
        free_rank=finer.free_rank,
        torsion=finer.torsion,
        characters=augmented,
    )
