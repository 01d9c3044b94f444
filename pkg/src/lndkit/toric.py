"""Homogeneous locally nilpotent derivations on affine toric varieties.

Everything is decided combinatorially from the ray data of a pointed cone
and cross-checkable symbolically: a root character e with pairing -1
against one ray and nonnegative pairings against the rest gives the
derivation chi^m -> <m, ray> chi^(m + e), and questions about commuting,
equivalence and maximality reduce to exact pairing conditions between
roots and the two-face adjacency structure of the cone.

Refusals are always explicit: a non-pointed cone, a character that is not
a root, or a search that would need to run past its cap raise typed
errors carrying a witness instead of returning a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from .algebra import (
    MonomialShiftDerivation,
    Polynomial,
    commutator_vanishes_on,
)
from .cone import (
    Cone,
    adjacency_set,
    dual_cone,
    hilbert_basis,
    is_pointed,
    lineality_witness,
    make_cone,
    positive_functional,
    two_face_functional,
)
from .errors import RefusalError, SearchBoundExceeded
from .lattice import (
    LatticeVector,
    QuasitorusPresentation,
    LatticeQuotient,
    determinant,
    extends_to_basis,
    matrix_rank,
    pairing,
    quasitorus_kernel,
    rational_inverse,
    solve_dual_pair,
    vec_add,
    vec_scale,
    vec_sub,
)


def _require_pointed(cone: Cone) -> None:
    if not is_pointed(cone):
        raise RefusalError(
            "cone is not pointed, so the toric theory here does not apply",
            witness={"lineality": list(lineality_witness(cone))})


@dataclass(frozen=True)
class DemazureRoot:
    """A root character together with its distinguished ray."""

    vector: LatticeVector
    ray: LatticeVector
    ray_index: int

    def derivation(self) -> MonomialShiftDerivation:
        return MonomialShiftDerivation(self.ray, self.vector)


def is_demazure_root(cone: Cone, e) -> DemazureRoot | None:
    """The root structure of e, or None when e is not a root.

    A root pairs to -1 with exactly one ray and nonnegatively with all
    others; the -1 ray is the one whose one-parameter subgroup the
    derivation destroys.
    """
    _require_pointed(cone)
    e = tuple(e)
    if len(e) != cone.rank:
        raise ValueError("character length does not match the cone rank")
    distinguished = None
    for i, v in enumerate(cone.rays):
        p = pairing(e, v)
        if p == -1:
            if distinguished is not None:
                return None
            distinguished = i
        elif p < 0:
            return None
    if distinguished is None:
        return None
    return DemazureRoot(vector=e, ray=cone.rays[distinguished],
                        ray_index=distinguished)


def require_root(cone: Cone, e) -> DemazureRoot:
    root = is_demazure_root(cone, e)
    if root is None:
        raise RefusalError(
            "character is not a root of the cone",
            witness={"character": list(e),
                     "pairings": [pairing(tuple(e), v) for v in cone.rays]})
    return root


def enumerate_roots(cone: Cone, bound: int = 10, _pairing=pairing):
    """All roots with coordinates in [-bound, bound], sorted by ray then
    lexicographically. The set of roots need not be finite, hence the box."""
    _require_pointed(cone)
    found = []
    for e in product(range(-bound, bound + 1), repeat=cone.rank):
        distinguished = None
        ok = True
        for i, v in enumerate(cone.rays):
            p = _pairing(e, v)
            if p == -1:
                if distinguished is not None:
                    ok = False
                    break
                distinguished = i
            elif p < 0:
                ok = False
                break
        if ok and distinguished is not None:
            found.append(DemazureRoot(vector=e, ray=cone.rays[distinguished],
                                      ray_index=distinguished))
    found.sort(key=lambda r: (r.ray_index, r.vector))
    return tuple(found)


def lnds_commute(a: DemazureRoot, b: DemazureRoot, _pairing=pairing) -> bool:
    """Exact commuting criterion for two root derivations.

    Same ray always commutes (the commutator coefficient collapses), and
    across rays the bracket vanishes iff each root annihilates the other's
    ray.
    """
    if a.ray == b.ray:
        return True
    return _pairing(a.vector, b.ray) == 0 and _pairing(b.vector, a.ray) == 0


def roots_equivalent(a: DemazureRoot, b: DemazureRoot) -> bool:
    """Equivalence means equal kernels, and the kernel only sees the ray."""
    return a.ray == b.ray


def commuting_pair_exists(cone: Cone) -> bool:
    """Existence of two commuting, inequivalent homogeneous LNDs.

    Holds iff some pair of rays spans a two-face and extends to a basis.
    """
    _require_pointed(cone)
    return any(adjacency_set(cone, v) for v in cone.rays)


def _partner_root(cone: Cone, vp: LatticeVector, v: LatticeVector,
                  cap: int = 1000) -> DemazureRoot:
    """A root on the ray vp that annihilates v.

    Starts from the dual pair and walks along the two-face functional until
    every other ray pairs nonnegatively; k grows from 0, so the first hit
    is the minimal one.
    """
    pair = solve_dual_pair(vp, v)
    if pair is None:
        raise RefusalError(
            "ray pair does not extend to a basis",
            witness={"rays": [list(vp), list(v)]})
    base = pair[0]  # pairs -1 with vp, 0 with v
    omega = two_face_functional(cone, vp, v)
    if omega is None:
        raise RefusalError(
            "rays do not span a common two-face",
            witness={"rays": [list(vp), list(v)]})
    for k in range(cap + 1):
        e = vec_add(base, vec_scale(k, omega))
        root = is_demazure_root(cone, e)
        if root is not None:
            assert root.ray == vp and pairing(e, v) == 0
            return root
    raise SearchBoundExceeded("no admissible shift found along the two-face",
                              cap=cap)


def construct_commuting_pair(cone: Cone):
    """A commuting inequivalent pair of root derivations, or a refusal.

    The first ray pair (in canonical order) that is two-face adjacent and
    extends to a basis carries the construction.
    """
    _require_pointed(cone)
    failures = []
    for i, v in enumerate(cone.rays):
        for vp in cone.rays[i + 1:]:
            adjacent = two_face_functional(cone, v, vp) is not None
            extends = extends_to_basis([v, vp])
            if adjacent and extends:
                first = _partner_root(cone, v, vp)
                second = _partner_root(cone, vp, v)
                assert lnds_commute(first, second)
                assert not roots_equivalent(first, second)
                return first, second
            failures.append({"rays": [list(v), list(vp)],
                             "two_face_adjacent": adjacent,
                             "extends_to_basis": extends})
    raise RefusalError(
        "no ray pair is both two-face adjacent and basis extending, "
        "so commuting inequivalent derivations do not exist",
        witness={"pairs": failures})


@dataclass(frozen=True)
class MaximalityVerdict:
    maximal: bool
    witness: DemazureRoot | None
    neighbours: tuple  # the rays the verdict quantified over


def is_maximal(cone: Cone, root: DemazureRoot) -> MaximalityVerdict:
    """Whether every LND commuting with the given one is equivalent to it.

    The only candidate partners live on neighbour rays (two-face adjacent,
    basis extending); the root is maximal iff it pairs nonzero with every
    one of them.
    """
    _require_pointed(cone)
    neighbours = adjacency_set(cone, root.ray)
    for vp in neighbours:
        if pairing(root.vector, vp) == 0:
            partner = _partner_root(cone, vp, root.ray)
            assert lnds_commute(root, partner)
            return MaximalityVerdict(maximal=False, witness=partner,
                                     neighbours=neighbours)
    return MaximalityVerdict(maximal=True, witness=None, neighbours=neighbours)


# ---------------------------------------------------------------------------
# kernels and slices


@dataclass(frozen=True)
class KernelDescription:
    ray: LatticeVector
    generators: tuple
    complete: bool


def kernel_of_root(cone: Cone, root: DemazureRoot,
                   bound: int | None = None) -> KernelDescription:
    """Monomial generators of the kernel subalgebra.

    The kernel is spanned by the characters at level zero against the
    distinguished ray, so its generators are the Hilbert basis of the dual
    cone's facet orthogonal to that ray.
    """
    _require_pointed(cone)
    face = make_cone(cone.rank, dual_cone(
        make_cone(cone.rank, cone.rays + (vec_scale(-1, root.ray),))).generators)
    hb = hilbert_basis(face, bound)
    assert all(pairing(m, root.ray) == 0 for m in hb.elements)
    return KernelDescription(ray=root.ray, generators=hb.elements,
                             complete=hb.complete)


def find_local_slice(cone: Cone, root: DemazureRoot, cap: int = 64) -> LatticeVector:
    """The minimal semigroup character at level one against the root's ray.

    Minimal means smallest coordinate absolute sum, ties broken
    lexicographically; the growing box stops once the best candidate is
    provably global.
    """
    _require_pointed(cone)
    v = root.ray
    b = 1
    while b <= cap:
        best = None
        for s in product(range(-b, b + 1), repeat=cone.rank):
            if pairing(s, v) != 1:
                continue
            if any(pairing(s, r) < 0 for r in cone.rays):
                continue
            key = (sum(abs(x) for x in s), s)
            if best is None or key < best:
                best = key
        if best is not None and best[0] <= b:
            s = best[1]
            assert all(pairing(vec_add(s, root.vector), r) >= 0 for r in cone.rays)
            return s
        b *= 2
    raise SearchBoundExceeded("no level-one slice found inside the search box",
                              cap=cap)


@dataclass(frozen=True)
class SliceExpression:
    """chi^m * (chi^(slice+root))^twist == chi^kernel_weight * (chi^slice)^level."""

    weight: LatticeVector
    slice: LatticeVector
    level: int
    twist: int
    kernel_weight: LatticeVector


def express_in_slice(cone: Cone, root: DemazureRoot, m,
                     slice_weight: LatticeVector | None = None,
                     cap: int = 64) -> SliceExpression:
    """Rewrite a character over the kernel after inverting the slice image.

    Searches the minimal twist by the kernel character slice+root that
    lands the level-zero part back in the semigroup, then re-verifies the
    monomial identity by actual polynomial multiplication.
    """
    m = tuple(m)
    if any(pairing(m, r) < 0 for r in cone.rays):
        raise RefusalError("character lies outside the semigroup",
                           witness={"character": list(m)})
    s = find_local_slice(cone, root, cap=cap) if slice_weight is None else tuple(slice_weight)
    level = pairing(m, root.ray)
    ker_dir = vec_add(s, root.vector)
    for twist in range(cap + 1):
        k = vec_sub(vec_add(m, vec_scale(twist, ker_dir)), vec_scale(level, s))
        if all(pairing(k, r) >= 0 for r in cone.rays):
            assert pairing(k, root.ray) == 0
            lhs = Polynomial.monomial(m)
            rhs = Polynomial.monomial(k)
            for _ in range(twist):
                lhs = lhs * Polynomial.monomial(ker_dir)
            for _ in range(level):
                rhs = rhs * Polynomial.monomial(s)
            assert lhs == rhs
            return SliceExpression(weight=m, slice=s, level=level,
                                   twist=twist, kernel_weight=k)
    raise SearchBoundExceeded("no kernel twist rewrites the character "
                              "inside the cap", cap=cap)


# ---------------------------------------------------------------------------
# isotropy pieces


def isotropy_torus(cone: Cone, root: DemazureRoot) -> QuasitorusPresentation:
    """The subtorus acting trivially on the derivation: the kernel of the
    root character inside the big torus. Always connected of corank one,
    since a root is primitive."""
    free = LatticeQuotient(cone.rank, ())
    pres = quasitorus_kernel(free, root.vector)
    assert pres.free_rank == cone.rank - 1 and not pres.torsion
    return pres


@dataclass(frozen=True)
class SemigroupSymmetries:
    """Lattice automorphisms preserving the semigroup, the root, and the
    level function. ``matrices`` act on row vectors: m -> m G."""

    order: int
    matrices: tuple
    basis: tuple


def s_delta(cone: Cone, root: DemazureRoot, perm_cap: int = 40320) -> SemigroupSymmetries:
    """Finite symmetry factor of the isotropy group.

    Candidates are permutations of the dual Hilbert basis respecting the
    level classes; each is solved to a linear map and kept when it is
    integral, unimodular, fixes the root, fixes the ray, and maps the
    basis onto itself.
    """
    _require_pointed(cone)
    dual = dual_cone(cone)
    hb = hilbert_basis(make_cone(cone.rank, dual.generators))
    assert hb.complete
    elems = hb.elements
    n = cone.rank
    levels = {}
    for idx, h in enumerate(elems):
        levels.setdefault(pairing(h, root.ray), []).append(idx)
    classes = [tuple(ix) for _, ix in sorted(levels.items())]
    total = 1
    for c in classes:
        f = 1
        for k in range(2, len(c) + 1):
            f *= k
        total *= f
    if total > perm_cap:
        raise SearchBoundExceeded(
            "too many level-preserving permutation candidates", cap=perm_cap)

    # spanning subset of the basis, greedily by rank
    span = []
    for idx, h in enumerate(elems):
        if matrix_rank([elems[i] for i in span] + [h]) > len(span):
            span.append(idx)
        if len(span) == n:
            break
    assert len(span) == n, "dual Hilbert basis must span"
    span_matrix = tuple(elems[i] for i in span)
    inv = rational_inverse(span_matrix)

    found = []
    for parts in product(*(permutations(c) for c in classes)):
        mapping = {}
        for orig, permuted in zip(classes, parts):
            for a, b in zip(orig, permuted):
                mapping[a] = b
        target = tuple(elems[mapping[i]] for i in span)
        g_rows = []
        integral = True
        for row in inv:
            out = []
            for j in range(n):
                val = sum(row[k] * Fraction(target[k][j]) for k in range(n))
                if val.denominator != 1:
                    integral = False
                    break
                out.append(int(val))
            if not integral:
                break
            g_rows.append(tuple(out))
        if not integral:
            continue
        g = tuple(g_rows)
        if abs(determinant(g)) != 1:
            continue
        if tuple(sum(root.vector[i] * g[i][j] for i in range(n))
                 for j in range(n)) != root.vector:
            continue
        if tuple(sum(g[i][j] * root.ray[j] for j in range(n))
                 for i in range(n)) != root.ray:
            continue
        if any(tuple(sum(elems[a][i] * g[i][j] for i in range(n))
                     for j in range(n)) != elems[mapping[a]]
               for a in range(len(elems))):
            continue
        found.append(g)
    found.sort()
    return SemigroupSymmetries(order=len(found), matrices=tuple(found),
                               basis=elems)


@dataclass(frozen=True)
class ToricIsotropyReport:
    root: DemazureRoot
    maximality: MaximalityVerdict
    torus: QuasitorusPresentation
    symmetries: SemigroupSymmetries
    kernel: KernelDescription
    slice_weight: LatticeVector


def toric_isotropy_report(cone: Cone, e, hilbert_bound: int | None = None,
                          cap: int = 64) -> ToricIsotropyReport:
    """Everything the isotropy decomposition needs, in one pass.

    The unipotent part is the one-parameter group of the derivation itself
    and needs no further data beyond the root.
    """
    root = require_root(cone, e)
    return ToricIsotropyReport(
        root=root,
        maximality=is_maximal(cone, root),
        torus=isotropy_torus(cone, root),
        symmetries=s_delta(cone, root),
        kernel=kernel_of_root(cone, root, hilbert_bound),
        slice_weight=find_local_slice(cone, root, cap=cap),
    )


# ---------------------------------------------------------------------------
# non-saturated semigroups


@dataclass(frozen=True)
class AdmissibilityVerdict:
    status: str  # "admissible" | "inadmissible" | "inconclusive"
    failures: tuple

    @property
    def admissible(self):
        if self.status == "admissible":
            return True
        if self.status == "inadmissible":
            return False
        return None


def root_admissible_nonnormal(generators, weight, shift,
                              node_cap: int = 20000) -> AdmissibilityVerdict:
    """Does the shifted derivation preserve a non-saturated semigroup algebra.

    The rule chi^s -> <s, weight> chi^(s + shift) preserves the span of the
    semigroup iff every generator with nonzero pairing lands back inside
    the semigroup after the shift. Membership is decided by memoized
    descent; a strictly positive functional bounds the depth, so the search
    is complete unless the node cap interrupts it.
    """
    gens = tuple(tuple(g) for g in generators)
    if not gens:
        return AdmissibilityVerdict(status="admissible", failures=())
    n = len(gens[0])
    weight = tuple(weight)
    shift = tuple(shift)
    phi = positive_functional(make_cone(n, gens))
    if phi is None:
        raise RefusalError(
            "semigroup is not positively graded, membership search "
            "would not terminate",
            witness={"generators": [list(g) for g in gens]})

    seen = {}
    budget = [node_cap]

    def member(t):
        if all(x == 0 for x in t):
            return True
        if pairing(t, phi) <= 0:
            return False
        if t in seen:
            return seen[t]
        if budget[0] <= 0:
            raise SearchBoundExceeded("membership search cap", cap=node_cap)
        budget[0] -= 1
        seen[t] = False
        for g in gens:
            if member(vec_sub(t, g)):
                seen[t] = True
                break
        return seen[t]

    failures = []
    try:
        for g in gens:
            if pairing(g, weight) == 0:
                continue
            if not member(vec_add(g, shift)):
                failures.append(g)
    except SearchBoundExceeded:
        return AdmissibilityVerdict(status="inconclusive", failures=tuple(failures))
    if failures:
        return AdmissibilityVerdict(status="inadmissible", failures=tuple(failures))
    return AdmissibilityVerdict(status="admissible", failures=())


def kernel_monomials(cone: Cone, root: DemazureRoot) -> tuple:
    """Kernel generators as polynomials, convenient for symbolic checks."""
    return tuple(Polynomial.monomial(m)
                 for m in kernel_of_root(cone, root).generators)


def symbolic_commute_check(cone: Cone, a: DemazureRoot, b: DemazureRoot) -> bool:
    """Cross-validation path: evaluate the commutator on the dual Hilbert
    basis monomials, which span the coordinate algebra."""
    hb = hilbert_basis(make_cone(cone.rank, dual_cone(cone).generators))
    gens = [Polynomial.monomial(m) for m in hb.elements]
    return commutator_vanishes_on(a.derivation(), b.derivation(), gens)
