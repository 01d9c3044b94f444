import random
from fractions import Fraction
from itertools import combinations, permutations
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from lndkit import lattice


# ---------------------------------------------------------------------------
# oracles, written before the functions they check


def leibniz_det(a):
    """Determinant straight from the permutation-sum definition."""
    n = len(a)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n)
                         if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= a[i][perm[i]]
        total += (-1) ** inversions * prod
    return total


def minor_gcd_invariant_factors(a):
    """Invariant factors through determinantal divisors: d_k = D_k / D_{k-1},
    D_k the gcd of all k x k minors. Completely independent of the
    elimination code under test."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rset in combinations(range(rows), k):
            for cset in combinations(range(cols), k):
                sub = tuple(tuple(a[i][j] for j in cset) for i in rset)
                g = gcd(g, abs(leibniz_det(sub)))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


def minor_gcd_extends(vectors):
    """Basis extension oracle: gcd of all maximal minors equals 1."""
    k = len(vectors)
    n = len(vectors[0])
    if k > n:
        return False
    g = 0
    for cset in combinations(range(n), k):
        sub = tuple(tuple(v[j] for j in cset) for v in vectors)
        g = gcd(g, abs(leibniz_det(sub)))
    return g == 1


def random_matrix(rng, rows, cols, lo=-9, hi=9):
    return tuple(tuple(rng.randint(lo, hi) for _ in range(cols))
                 for _ in range(rows))


# ---------------------------------------------------------------------------
# vectors and determinants


def test_pairing_basics():
    assert lattice.pairing((1, 2, -1), (0, 0, 1)) == -1
    assert lattice.pairing((1, 2, -1), (2, 0, 1)) == 1
    with pytest.raises(ValueError):
        lattice.pairing((1, 2), (1, 2, 3))


def test_primitivity():
    assert lattice.is_primitive((2, 3))
    assert not lattice.is_primitive((2, 4))
    assert not lattice.is_primitive((0, 0))
    assert lattice.primitive_part((4, -6)) == (2, -3)
    with pytest.raises(ValueError):
        lattice.primitive_part((0, 0, 0))


def test_determinant_against_leibniz():
    rng = random.Random(20240401)
    for _ in range(300):
        n = rng.randint(0, 4)
        a = random_matrix(rng, n, n)
        assert lattice.determinant(a) == leibniz_det(a)


def test_rational_inverse_round_trip():
    rng = random.Random(7)
    seen_invertible = 0
    for _ in range(100):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, n, -5, 5)
        inv = lattice.rational_inverse(a)
        if lattice.determinant(a) == 0:
            assert inv is None
            continue
        seen_invertible += 1
        prod = [[sum(Fraction(a[i][k]) * inv[k][j] for k in range(n))
                 for j in range(n)] for i in range(n)]
        assert prod == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    assert seen_invertible > 50


# ---------------------------------------------------------------------------
# Smith normal form


def assert_smith_contract(a, dec):
    rows, cols = len(a), len(a[0]) if a else 0
    assert lattice.mat_mul(lattice.mat_mul(dec.u, a), dec.v) == dec.d
    assert abs(lattice.determinant(dec.u)) == 1
    assert abs(lattice.determinant(dec.v)) == 1
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert dec.d[i][j] == 0
    invf = dec.invariant_factors
    assert all(f > 0 for f in invf)
    for x, y in zip(invf, invf[1:]):
        assert y % x == 0
    # the diagonal past the rank is zero
    for i in range(len(invf), min(rows, cols)):
        assert dec.d[i][i] == 0


def test_smith_random_sweep():
    rng = random.Random(1234)
    for _ in range(200):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 5)
        a = random_matrix(rng, rows, cols)
        dec = lattice.smith_normal_form(a)
        assert_smith_contract(a, dec)
        assert dec.invariant_factors == minor_gcd_invariant_factors(a)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=1, max_size=4),
                min_size=1, max_size=4).filter(
                    lambda rows: len({len(r) for r in rows}) == 1))
def test_smith_hypothesis(rows):
    a = tuple(tuple(r) for r in rows)
    dec = lattice.smith_normal_form(a)
    assert_smith_contract(a, dec)
    assert dec.invariant_factors == minor_gcd_invariant_factors(a)


def test_smith_deterministic():
    a = ((6, 4, 2), (2, 8, 10), (0, 2, 4))
    assert lattice.smith_normal_form(a) == lattice.smith_normal_form(a)


# ---------------------------------------------------------------------------
# Hermite normal form and membership


def test_hermite_contract():
    rng = random.Random(99)
    for _ in range(200):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 5)
        a = random_matrix(rng, rows, cols)
        h, u = lattice.hermite_normal_form(a)
        assert lattice.mat_mul(u, a) == h
        assert abs(lattice.determinant(u)) == 1
        pivots = []
        for row in h:
            nz = [j for j, x in enumerate(row) if x != 0]
            if not nz:
                pivots.append(None)
                continue
            pivots.append(nz[0])
            assert row[nz[0]] > 0
        # zero rows at the bottom, pivot columns strictly increasing
        real = [p for p in pivots if p is not None]
        assert pivots[:len(real)] == real
        assert real == sorted(real) and len(set(real)) == len(real)
        for r, c in enumerate(real):
            for i in range(r):
                assert 0 <= h[i][c] < h[r][c]


def test_row_span_membership():
    rng = random.Random(555)
    for _ in range(200):
        rows = rng.randint(1, 3)
        cols = rng.randint(1, 4)
        a = random_matrix(rng, rows, cols, -4, 4)
        coeffs = [rng.randint(-3, 3) for _ in range(rows)]
        x = tuple(sum(coeffs[i] * a[i][j] for i in range(rows))
                  for j in range(cols))
        assert lattice.in_row_span(a, x)
    # pinned negatives
    assert not lattice.in_row_span(((2, 0), (0, 2)), (1, 0))
    assert lattice.in_row_span(((2, 0), (0, 2)), (2, 4))
    assert not lattice.in_row_span(((1, 2),), (1, 1))
    assert lattice.in_row_span((), (0, 0))
    assert not lattice.in_row_span((), (1, 0))


def test_row_span_agrees_with_quotient_labels():
    rng = random.Random(777)
    for _ in range(200):
        rows = rng.randint(1, 3)
        cols = rng.randint(1, 4)
        a = random_matrix(rng, rows, cols, -4, 4)
        q = lattice.LatticeQuotient(cols, a)
        x = tuple(rng.randint(-6, 6) for _ in range(cols))
        assert lattice.in_row_span(a, x) == q.is_zero(x)


# ---------------------------------------------------------------------------
# basis extension and dual pairs


def test_extends_to_basis_pinned():
    assert lattice.extends_to_basis([(1, 0, 0), (0, 1, 0)])
    assert lattice.extends_to_basis([(2, 3)])
    assert not lattice.extends_to_basis([(2, 4)])
    # both rays are primitive yet the pair spans an index-2 sublattice:
    # the full minor set is {0, -2, 0}
    pair = [(0, 0, 1), (2, 0, 1)]
    assert not minor_gcd_extends(pair)
    assert not lattice.extends_to_basis(pair)
    assert lattice.extends_to_basis([(0, 0, 1), (1, 0, 0)])
    assert lattice.extends_to_basis([])
    assert not lattice.extends_to_basis([(1, 0), (0, 1), (1, 1)])


def test_extends_to_basis_matches_minor_oracle():
    rng = random.Random(2024)
    checked = 0
    for _ in range(400):
        n = rng.randint(2, 5)
        v = tuple(rng.randint(-5, 5) for _ in range(n))
        vp = tuple(rng.randint(-5, 5) for _ in range(n))
        if all(x == 0 for x in v) or all(x == 0 for x in vp):
            continue
        assert lattice.extends_to_basis([v, vp]) == minor_gcd_extends([v, vp])
        checked += 1
    assert checked >= 300


def test_solve_dual_pair_contract():
    rng = random.Random(31337)
    successes = 0
    for _ in range(400):
        n = rng.randint(2, 5)
        v = tuple(rng.randint(-5, 5) for _ in range(n))
        vp = tuple(rng.randint(-5, 5) for _ in range(n))
        result = lattice.solve_dual_pair(v, vp)
        if minor_gcd_extends([v, vp]):
            e, ep = result
            assert lattice.pairing(e, v) == -1
            assert lattice.pairing(e, vp) == 0
            assert lattice.pairing(ep, v) == 0
            assert lattice.pairing(ep, vp) == -1
            successes += 1
        else:
            assert result is None
    assert successes > 100


def test_solve_dual_pair_standard_basis():
    e, ep = lattice.solve_dual_pair((1, 0), (0, 1))
    assert e == (-1, 0) and ep == (0, -1)


def test_complete_to_basis():
    rng = random.Random(404)
    for _ in range(100):
        n = rng.randint(2, 5)
        k = rng.randint(1, n)
        vs = [tuple(rng.randint(-4, 4) for _ in range(n)) for _ in range(k)]
        full = lattice.complete_to_basis(vs)
        if minor_gcd_extends(vs):
            assert full is not None
            assert full[:k] == tuple(tuple(v) for v in vs)
            assert abs(lattice.determinant(full)) == 1
        else:
            assert full is None


# ---------------------------------------------------------------------------
# quotients and quasitori


def test_quotient_trinomial_grading_golden():
    # exponent rows of x1 x2 y1^2 y2^2 y3^7 on one side, z^3 on the other
    rels = ((1, 1, 2, 2, 7, 0), (0, 0, 0, 0, 0, 3))
    q = lattice.LatticeQuotient(6, rels)
    assert q.invariant_factors == (1, 3)
    assert q.free_rank == 4
    assert q.torsion == (3,)


def test_quotient_trivial_when_relations_span():
    # two unit monomials on either side force a trivial class group
    q = lattice.LatticeQuotient(2, ((1, 0), (0, 1)))
    assert q.free_rank == 0
    assert q.torsion == ()
    assert q.is_zero((5, -3))


def test_quotient_no_relations():
    q = lattice.LatticeQuotient(3)
    assert q.free_rank == 3
    assert q.degree((1, 2, 3)) == (1, 2, 3)
    assert q.same_class((1, 2, 3), (1, 2, 3))
    assert not q.same_class((1, 2, 3), (1, 2, 4))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.data())
def test_quotient_labels_decide_equality(n, data):
    nrels = data.draw(st.integers(0, 3))
    rels = tuple(tuple(data.draw(st.integers(-4, 4)) for _ in range(n))
                 for _ in range(nrels))
    q = lattice.LatticeQuotient(n, rels)
    x = tuple(data.draw(st.integers(-8, 8)) for _ in range(n))
    y = tuple(data.draw(st.integers(-8, 8)) for _ in range(n))
    assert (q.degree(x) == q.degree(y)) == q.same_class(x, y)


def test_quasitorus_kernel_golden():
    rels = ((1, 1, 2, 2, 7, 0), (0, 0, 0, 0, 0, 3))
    q = lattice.LatticeQuotient(6, rels)
    # the derivation degree has two natural exponent lifts; both must give
    # the same kernel since they differ by a relation
    lift_a = (0, 1, 2, 2, 7, -1)
    lift_b = (-1, 0, 0, 0, 0, 2)
    assert q.same_class(lift_a, lift_b)
    for lift in (lift_a, lift_b):
        pres = lattice.quasitorus_kernel(q, lift)
        assert pres.free_rank == 3
        assert pres.torsion == (3,)
        assert not pres.is_connected()
        assert pres.order() is None


def test_quasitorus_order():
    # Z/2 + Z/3 collapses to the single invariant factor 6
    q = lattice.LatticeQuotient(2, ((2, 0), (0, 3)))
    pres = q.presentation()
    assert pres.free_rank == 0
    assert pres.torsion == (6,)
    assert pres.order() == 6
    assert lattice.LatticeQuotient(1, ()).presentation().order() is None
