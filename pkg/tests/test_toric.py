"""Toric layer: every combinatorial verdict is replayed symbolically.

The oracles here avoid the library's root predicate on purpose: a
character is accepted as a root only when the induced monomial derivation
provably maps the semigroup algebra to itself and the closed-form factor
product witnesses nilpotency.
"""

import random

import pytest

from lndkit.algebra import Polynomial, apply_derivation, commutator
from lndkit.cone import Cone, adjacency_set, dual_cone, hilbert_basis, is_pointed, make_cone
from lndkit.errors import RefusalError, SearchBoundExceeded
from lndkit.lattice import matrix_rank, pairing, vec_add, vec_scale
from lndkit.toric import (
    AdmissibilityVerdict,
    DemazureRoot,
    commuting_pair_exists,
    construct_commuting_pair,
    enumerate_roots,
    express_in_slice,
    find_local_slice,
    is_demazure_root,
    is_maximal,
    isotropy_torus,
    kernel_of_root,
    lnds_commute,
    require_root,
    root_admissible_nonnormal,
    roots_equivalent,
    s_delta,
    symbolic_commute_check,
    toric_isotropy_report,
)

# rays in canonical (lex) order: index 0 is the distinguished ray of the
# worked example root below
SQUARE = make_cone(3, [(0, 0, 1), (2, 0, 1), (0, 1, 1), (1, 1, 1)])
SQUARE_ROOT = (1, 2, -1)

ORTHANT2 = make_cone(2, [(1, 0), (0, 1)])
ORTHANT3 = make_cone(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])


# ---------------------------------------------------------------------------
# oracles


def semigroup_member(cone, m):
    return all(pairing(m, r) >= 0 for r in cone.rays)


def oracle_is_root(cone, e):
    """Accept e iff some ray weight makes chi^m -> <m,w> chi^(m+e) a
    well-defined locally nilpotent self-map of the semigroup algebra.

    Well-defined: every Hilbert basis element at nonzero level lands back
    in the semigroup. Nilpotent: the k-fold coefficient is the factor
    product prod_j <h + j e, w>, which vanishes for some k iff <e,w> is
    negative and divides every level.
    """
    hb = hilbert_basis(make_cone(cone.rank, dual_cone(cone).generators))
    assert hb.complete
    for w in cone.rays:
        c = pairing(e, w)
        if c >= 0:
            continue
        ok = True
        for h in hb.elements:
            lvl = pairing(h, w)
            if lvl == 0:
                continue
            if not semigroup_member(cone, vec_add(h, e)):
                ok = False
                break
            if lvl % c != 0:
                ok = False
                break
        if ok:
            return w
    return None


def brute_commuting_partner(cone, root, bound):
    """Bounded exhaustive search for an inequivalent commuting root."""
    for other in enumerate_roots(cone, bound):
        if other.ray == root.ray:
            continue
        if lnds_commute(root, other):
            return other
    return None


def brute_symmetries(cone, root):
    """All-permutations route to the finite symmetry factor, with no
    level-class pruning: solve a linear map from every permutation of the
    full dual Hilbert basis and keep the ones passing every check."""
    from fractions import Fraction
    from itertools import permutations

    from lndkit.lattice import determinant, rational_inverse

    hb = hilbert_basis(make_cone(cone.rank, dual_cone(cone).generators))
    elems = hb.elements
    n = cone.rank
    span = []
    for i, h in enumerate(elems):
        if matrix_rank([elems[j] for j in span] + [h]) > len(span):
            span.append(i)
    inv = rational_inverse(tuple(elems[i] for i in span))
    out = set()
    for perm in permutations(range(len(elems))):
        target = tuple(elems[perm[i]] for i in span)
        rows = []
        good = True
        for r in inv:
            row = []
            for j in range(n):
                val = sum(r[k] * Fraction(target[k][j]) for k in range(n))
                if val.denominator != 1:
                    good = False
                    break
                row.append(int(val))
            if not good:
                break
            rows.append(tuple(row))
        if not good:
            continue
        g = tuple(rows)
        if abs(determinant(g)) != 1:
            continue
        if any(tuple(sum(h[i] * g[i][j] for i in range(n)) for j in range(n))
               != elems[perm[k]] for k, h in enumerate(elems)):
            continue
        if tuple(sum(root.vector[i] * g[i][j] for i in range(n))
                 for j in range(n)) != root.vector:
            continue
        if tuple(sum(g[i][j] * root.ray[j] for j in range(n))
                 for i in range(n)) != root.ray:
            continue
        out.add(g)
    return out


def random_cone(rng, rank, tries=200):
    """Full-dimensional pointed cone with small ray entries."""
    for _ in range(tries):
        k = rng.randrange(rank, rank + 3)
        rays = [tuple(rng.randrange(-2, 3) for _ in range(rank)) for _ in range(k)]
        rays = [r for r in rays if any(r)]
        if len(rays) < rank:
            continue
        cone = make_cone(rank, rays)
        if len(cone.rays) >= rank and matrix_rank(cone.rays) == rank and is_pointed(cone):
            return cone
    raise AssertionError("random cone generation failed")


# ---------------------------------------------------------------------------
# root recognition


def test_worked_example_root_recognised():
    root = is_demazure_root(SQUARE, SQUARE_ROOT)
    assert root is not None
    assert root.ray == (0, 0, 1) and root.ray_index == 0
    assert [pairing(SQUARE_ROOT, v) for v in SQUARE.rays] == [-1, 1, 2, 1]


def test_non_roots_rejected():
    assert is_demazure_root(SQUARE, (0, 0, 0)) is None
    assert is_demazure_root(SQUARE, (0, 0, -1)) is None  # two rays at -1
    assert is_demazure_root(SQUARE, (0, 0, 1)) is None   # no ray at -1
    with pytest.raises(RefusalError):
        require_root(SQUARE, (0, 0, 0))


def test_require_root_refusal_carries_pairings():
    try:
        require_root(SQUARE, (5, 5, 5))
    except RefusalError as err:
        assert err.witness["pairings"] == [pairing((5, 5, 5), v) for v in SQUARE.rays]
    else:
        raise AssertionError("expected a refusal")


def test_root_vector_length_checked():
    with pytest.raises(ValueError):
        is_demazure_root(SQUARE, (1, 2))


def test_non_pointed_cone_refused():
    line = make_cone(2, [(1, 0), (-1, 0)])
    with pytest.raises(RefusalError) as info:
        enumerate_roots(line, 1)
    assert "lineality" in info.value.witness


def test_enumerate_roots_matches_symbolic_oracle():
    rng = random.Random(20260822)
    for _ in range(12):
        cone = random_cone(rng, rng.choice([2, 2, 3]))
        got = {r.vector for r in enumerate_roots(cone, 2)}
        want = set()
        from itertools import product as iproduct
        for e in iproduct(range(-2, 3), repeat=cone.rank):
            if oracle_is_root(cone, e) is not None:
                want.add(e)
        assert got == want


def test_enumerate_roots_sorted_and_rays_agree_with_oracle():
    roots = enumerate_roots(SQUARE, 2)
    assert list(roots) == sorted(roots, key=lambda r: (r.ray_index, r.vector))
    for r in roots:
        assert oracle_is_root(SQUARE, r.vector) == r.ray


# ---------------------------------------------------------------------------
# commuting


def test_commute_criterion_against_symbolic_commutator():
    rng = random.Random(7)
    seen_both = [0, 0]
    for _ in range(10):
        cone = random_cone(rng, 2 if rng.random() < 0.7 else 3)
        roots = enumerate_roots(cone, 2)[:6]
        for i in range(len(roots)):
            for j in range(i, len(roots)):
                verdict = lnds_commute(roots[i], roots[j])
                assert verdict == symbolic_commute_check(cone, roots[i], roots[j])
                seen_both[verdict] += 1
    assert seen_both[0] > 0 and seen_both[1] > 0


def test_same_ray_roots_always_commute():
    roots = [r for r in enumerate_roots(ORTHANT2, 3) if r.ray == (1, 0)]
    assert len(roots) >= 3
    for a in roots:
        for b in roots:
            assert lnds_commute(a, b)
            assert roots_equivalent(a, b)


def test_plane_translations_commute():
    dx = require_root(ORTHANT2, (-1, 0))
    dy = require_root(ORTHANT2, (0, -1))
    assert not roots_equivalent(dx, dy)
    assert lnds_commute(dx, dy)
    assert symbolic_commute_check(ORTHANT2, dx, dy)


def test_commuting_pair_exists_goldens():
    assert commuting_pair_exists(SQUARE)
    assert commuting_pair_exists(ORTHANT2)
    assert not commuting_pair_exists(make_cone(2, [(1, 0), (1, 2)]))
    assert not commuting_pair_exists(make_cone(2, [(1, 0)]))


def test_construct_commuting_pair_postconditions():
    first, second = construct_commuting_pair(SQUARE)
    assert is_demazure_root(SQUARE, first.vector) == first
    assert is_demazure_root(SQUARE, second.vector) == second
    assert not roots_equivalent(first, second)
    assert lnds_commute(first, second)
    assert symbolic_commute_check(SQUARE, first, second)
    # first qualifying ray pair in canonical order
    assert first.ray == (0, 0, 1) and second.ray == (0, 1, 1)


def test_construct_commuting_pair_refusal():
    with pytest.raises(RefusalError) as info:
        construct_commuting_pair(make_cone(2, [(1, 0), (1, 2)]))
    pairs = info.value.witness["pairs"]
    assert pairs and not any(p["two_face_adjacent"] and p["extends_to_basis"]
                             for p in pairs)


def test_construct_commuting_pair_random_sweep():
    rng = random.Random(99)
    built = 0
    for _ in range(15):
        cone = random_cone(rng, rng.choice([2, 3]))
        if not commuting_pair_exists(cone):
            with pytest.raises(RefusalError):
                construct_commuting_pair(cone)
            continue
        a, b = construct_commuting_pair(cone)
        assert lnds_commute(a, b) and not roots_equivalent(a, b)
        assert symbolic_commute_check(cone, a, b)
        built += 1
    assert built >= 5


# ---------------------------------------------------------------------------
# maximality


def test_worked_example_root_is_maximal():
    root = require_root(SQUARE, SQUARE_ROOT)
    verdict = is_maximal(SQUARE, root)
    assert verdict.maximal and verdict.witness is None
    assert verdict.neighbours == ((0, 1, 1),)


def test_plane_translation_not_maximal():
    root = require_root(ORTHANT2, (-1, 0))
    verdict = is_maximal(ORTHANT2, root)
    assert not verdict.maximal
    partner = verdict.witness
    assert partner.ray != root.ray
    assert lnds_commute(root, partner)
    assert symbolic_commute_check(ORTHANT2, root, partner)


def test_shifted_plane_root_is_maximal():
    root = require_root(ORTHANT2, (-1, 3))
    assert is_maximal(ORTHANT2, root).maximal


def test_orthant3_coordinate_root_not_maximal():
    root = require_root(ORTHANT3, (-1, 0, 0))
    verdict = is_maximal(ORTHANT3, root)
    assert not verdict.maximal
    assert verdict.witness.vector == (0, 0, -1)


def test_maximality_against_bounded_search():
    rng = random.Random(41)
    checked = 0
    for _ in range(10):
        cone = random_cone(rng, 2 if rng.random() < 0.7 else 3)
        for root in enumerate_roots(cone, 2)[:4]:
            verdict = is_maximal(cone, root)
            partner = brute_commuting_partner(cone, root, 2)
            if verdict.maximal:
                assert partner is None
            else:
                w = verdict.witness
                assert not roots_equivalent(root, w) and lnds_commute(root, w)
            checked += 1
    assert checked >= 10


# ---------------------------------------------------------------------------
# kernel, slice, torus


def test_worked_example_kernel_generators():
    root = require_root(SQUARE, SQUARE_ROOT)
    ker = kernel_of_root(SQUARE, root)
    assert ker.complete
    assert ker.generators == ((0, 1, 0), (1, 0, 0))
    delta = root.derivation()
    for m in ker.generators:
        assert apply_derivation(delta, Polynomial.monomial(m)).is_zero()


def test_kernel_equals_level_zero_hilbert_elements():
    rng = random.Random(5)
    for _ in range(8):
        cone = random_cone(rng, rng.choice([2, 3]))
        roots = enumerate_roots(cone, 2)
        if not roots:
            continue
        root = roots[0]
        hb = hilbert_basis(make_cone(cone.rank, dual_cone(cone).generators))
        expected = tuple(h for h in hb.elements if pairing(h, root.ray) == 0)
        assert kernel_of_root(cone, root).generators == tuple(sorted(expected))


def test_worked_example_slice_and_expression():
    root = require_root(SQUARE, SQUARE_ROOT)
    s = find_local_slice(SQUARE, root)
    assert s == (0, 0, 1)
    assert pairing(s, root.ray) == 1
    expr = express_in_slice(SQUARE, root, (-1, -1, 2))
    assert expr.level == 2 and expr.twist == 1
    assert expr.kernel_weight == (0, 1, 0)
    # exponent identity, recomputed by hand
    lhs = vec_add(expr.weight, vec_scale(expr.twist, vec_add(s, root.vector)))
    rhs = vec_add(expr.kernel_weight, vec_scale(expr.level, s))
    assert lhs == rhs


def test_slice_minimality_against_box_scan():
    from itertools import product as iproduct
    rng = random.Random(13)
    for _ in range(8):
        cone = random_cone(rng, 2)
        roots = enumerate_roots(cone, 2)
        if not roots:
            continue
        root = roots[-1]
        s = find_local_slice(cone, root)
        key = (sum(abs(x) for x in s), s)
        b = key[0]
        for cand in iproduct(range(-b, b + 1), repeat=cone.rank):
            if pairing(cand, root.ray) != 1:
                continue
            if not semigroup_member(cone, cand):
                continue
            assert (sum(abs(x) for x in cand), cand) >= key


def test_express_in_slice_rejects_outside_characters():
    root = require_root(ORTHANT2, (-1, 0))
    with pytest.raises(RefusalError):
        express_in_slice(ORTHANT2, root, (-1, 0))


def test_express_in_slice_sweep():
    from itertools import product as iproduct
    rng = random.Random(17)
    for _ in range(6):
        cone = random_cone(rng, 2)
        roots = enumerate_roots(cone, 2)
        if not roots:
            continue
        root = roots[0]
        s = find_local_slice(cone, root)
        for m in iproduct(range(0, 3), repeat=cone.rank):
            if not semigroup_member(cone, m):
                continue
            try:
                expr = express_in_slice(cone, root, m, slice_weight=s)
            except SearchBoundExceeded:
                continue
            assert semigroup_member(cone, expr.kernel_weight)
            assert pairing(expr.kernel_weight, root.ray) == 0


def test_isotropy_torus_presentation():
    root = require_root(SQUARE, SQUARE_ROOT)
    pres = isotropy_torus(SQUARE, root)
    assert pres.free_rank == 2 and pres.torsion == ()
    assert pres.is_connected()


# ---------------------------------------------------------------------------
# finite symmetries


def test_worked_example_symmetries_trivial():
    root = require_root(SQUARE, SQUARE_ROOT)
    sym = s_delta(SQUARE, root)
    assert sym.order == 1
    n = SQUARE.rank
    assert sym.matrices == (tuple(tuple(1 if i == j else 0 for j in range(n))
                                  for i in range(n)),)


def test_orthant3_symmetries_swap():
    root = require_root(ORTHANT3, (-1, 0, 0))
    sym = s_delta(ORTHANT3, root)
    assert sym.order == 2


def test_symmetries_match_brute_permutation_route():
    cases = [
        (SQUARE, SQUARE_ROOT),
        (ORTHANT3, (-1, 0, 0)),
        (ORTHANT2, (-1, 0)),
        (ORTHANT2, (-1, 1)),
    ]
    for cone, e in cases:
        root = require_root(cone, e)
        sym = s_delta(cone, root)
        assert set(sym.matrices) == brute_symmetries(cone, root)


def test_symmetries_form_a_group():
    root = require_root(ORTHANT3, (-1, 0, 0))
    sym = s_delta(ORTHANT3, root)
    mats = set(sym.matrices)
    n = ORTHANT3.rank
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    assert ident in mats
    for a in mats:
        for b in mats:
            prod = tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n))
                               for j in range(n)) for i in range(n))
            assert prod in mats


# ---------------------------------------------------------------------------
# reports and non-saturated semigroups


def test_worked_example_report():
    report = toric_isotropy_report(SQUARE, SQUARE_ROOT)
    assert report.root.ray_index == 0
    assert report.maximality.maximal
    assert report.torus.free_rank == 2
    assert report.symmetries.order == 1
    assert report.kernel.generators == ((0, 1, 0), (1, 0, 0))
    assert report.slice_weight == (0, 0, 1)


def test_numerical_semigroup_shift_down_one_refused():
    verdict = root_admissible_nonnormal([(2,), (3,)], (1,), (-1,))
    assert verdict.admissible is False
    assert verdict.failures == ((2,),)


def test_numerical_semigroup_shift_down_two_refused():
    verdict = root_admissible_nonnormal([(2,), (3,)], (1,), (-2,))
    assert verdict.admissible is False
    assert verdict.failures == ((3,),)


def test_numerical_semigroup_positive_shift_admissible():
    verdict = root_admissible_nonnormal([(2,), (3,)], (1,), (5,))
    assert verdict.admissible is True


def test_saturated_semigroup_matches_root_verdict():
    gens = [(1, 0), (0, 1)]
    ok = root_admissible_nonnormal(gens, (1, 0), (-1, 2))
    assert ok.admissible is True
    bad = root_admissible_nonnormal(gens, (1, 0), (-1, -1))
    assert bad.admissible is False


def test_non_saturated_plane_semigroup():
    gens = [(1, 0), (1, 2)]
    verdict = root_admissible_nonnormal(gens, (0, 1), (0, 2))
    assert verdict.admissible is False
    assert verdict.failures == ((1, 2),)


def test_admissibility_inconclusive_on_tiny_cap():
    verdict = root_admissible_nonnormal([(2,), (3,)], (1,), (17,), node_cap=2)
    assert verdict.status == "inconclusive"
    assert verdict.admissible is None


def test_admissibility_refuses_ungraded_semigroup():
    with pytest.raises(RefusalError):
        root_admissible_nonnormal([(1,), (-1,)], (1,), (0,))
