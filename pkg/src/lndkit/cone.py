"""Rational polyhedral cones, exactly.

A cone is stored by its canonical ray list: primitive, irredundant, sorted
lexicographically. Duality runs through a double description pass, and all
feasibility questions go through an exact Fourier-Motzkin core over
Fractions, so there is no floating point anywhere and no tolerance to tune.

Intended scale is the desk scale of the surrounding theory (ambient rank up
to about 6); the algorithms are chosen for exactness and auditability, not
for large instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .errors import RefusalError
from .lattice import (
    LatticeMatrix,
    LatticeVector,
    is_zero_vector,
    matrix_rank,
    pairing,
    primitive_part,
    vec_sub,
)

Row = tuple[tuple[Fraction, ...], Fraction]  # coeffs . x  (cmp)  rhs


# ---------------------------------------------------------------------------
# exact linear feasibility


def _normalize_ineq(coeffs, rhs):
    # scale rows by the positive content so duplicates collapse
    g = 0
    for c in coeffs:
        g = gcd(g, c.numerator)
    g = gcd(g, rhs.numerator)
    denom = lcm(*(c.denominator for c in coeffs), rhs.denominator) if coeffs else rhs.denominator
    if g == 0 and rhs == 0:
        return None
    scale = Fraction(denom, g) if g else Fraction(denom)
    return tuple(c * scale for c in coeffs), rhs * scale


def feasible_point(nvars: int, eqs, ineqs):
    """A rational point satisfying all constraints, or None.

    ``eqs`` rows mean coeffs . x == rhs, ``ineqs`` rows mean coeffs . x >= rhs.
    Equalities are removed by Gaussian elimination, the rest by
    Fourier-Motzkin with back substitution, so the returned point is exact.
    """
    # reduced row echelon form of the equality system
    work = [[Fraction(c) for c in co] + [Fraction(r)] for co, r in eqs]
    pivots = []  # (row, col), pivot entry scaled to 1, column cleared
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append((r, c))
        r += 1
    for i in range(r, len(work)):
        if work[i][nvars] != 0:
            return None
    pivot_cols = {c for _, c in pivots}
    free = [c for c in range(nvars) if c not in pivot_cols]

    # substitute x_c = rhs_r - sum_{j free} work[r][j] x_j into the inequalities
    ineqs2 = []
    for co, rhs in ineqs:
        co = [Fraction(c) for c in co]
        rhs = Fraction(rhs)
        for pr, pc in pivots:
            f = co[pc]
            if f:
                co[pc] = Fraction(0)
                rhs -= f * work[pr][nvars]
                for j in free:
                    co[j] -= f * work[pr][j]
        ineqs2.append((co, rhs))
    ineqs = ineqs2

    # Fourier-Motzkin over the free variables, last one first
    stages = []
    rows = []
    seen = set()
    for co, rhs in ineqs:
        key = _normalize_ineq([co[j] for j in free], rhs)
        if key is None:
            continue
        if any(c != 0 for c in key[0]):
            if key not in seen:
                seen.add(key)
                rows.append((list(co), rhs))
        else:
            if rhs > 0:
                return None
    for idx in range(len(free) - 1, -1, -1):
        var = free[idx]
        lowers, uppers, rest = [], [], []
        for co, rhs in rows:
            a = co[var]
            if a > 0:
                lowers.append((co, rhs))
            elif a < 0:
                uppers.append((co, rhs))
            else:
                rest.append((co, rhs))
        stages.append((var, lowers, uppers))
        new_rows = rest
        seen = set()
        for lco, lrhs in lowers:
            for uco, urhs in uppers:
                a, b = lco[var], -uco[var]
                co = [b * x + a * y for x, y in zip(lco, uco)]
                rhs = b * lrhs + a * urhs
                co[var] = Fraction(0)
                key = _normalize_ineq([co[j] for j in free[:idx]], rhs)
                if key is None:
                    continue
                if all(c == 0 for c in key[0]):
                    if rhs > 0:
                        return None
                    continue
                if key not in seen:
                    seen.add(key)
                    new_rows.append((co, rhs))
        rows = new_rows

    point = [Fraction(0)] * nvars
    for var, lowers, uppers in reversed(stages):
        lo = None
        for co, rhs in lowers:
            val = (rhs - sum(co[j] * point[j] for j in range(nvars) if j != var)) / co[var]
            lo = val if lo is None else max(lo, val)
        hi = None
        for co, rhs in uppers:
            val = (rhs - sum(co[j] * point[j] for j in range(nvars) if j != var)) / co[var]
            hi = val if hi is None else min(hi, val)
        if lo is not None:
            point[var] = lo
        elif hi is not None:
            point[var] = hi
        if lo is not None and hi is not None and lo > hi:
            raise AssertionError("back substitution left an empty interval")
    for pr, pc in pivots:
        point[pc] = work[pr][nvars] - sum(work[pr][j] * point[j] for j in free)
    return tuple(point)


def _integer_point(point):
    if point is None:
        return None
    scale = lcm(*(p.denominator for p in point)) if point else 1
    return tuple(int(p * scale) for p in point)


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class Cone:
    """Pointed or not; rays are primitive, irredundant, lex-sorted."""

    rank: int
    rays: LatticeMatrix


@dataclass(frozen=True)
class DualCone:
    rank: int
    generators: LatticeMatrix


@dataclass(frozen=True)
class HilbertBasis:
    elements: LatticeMatrix
    complete: bool
    bound: int


def member_of_generators(generators, x: LatticeVector) -> bool:
    """Is x a nonnegative rational combination of the generators."""
    gens = [tuple(g) for g in generators]
    n = len(x)
    if not gens:
        return is_zero_vector(x)
    k = len(gens)
    eqs = [([gens[i][j] for i in range(k)], x[j]) for j in range(n)]
    ineqs = [([int(i == t) for i in range(k)], 0) for t in range(k)]
    return feasible_point(k, eqs, ineqs) is not None


def extremal_rays(generators) -> LatticeMatrix:
    """Irredundant subset of the generators, canonically ordered.

    For a pointed cone this is exactly the set of extremal rays. For a cone
    with lines it is still a generating set, just without a canonicity claim
    beyond determinism.
    """
    gens = sorted({primitive_part(tuple(g)) for g in generators
                   if not is_zero_vector(tuple(g))})
    kept = list(gens)
    for g in list(gens):
        others = [h for h in kept if h != g]
        if member_of_generators(others, g):
            kept = others
    return tuple(kept)


def make_cone(rank: int, generators) -> Cone:
    for g in generators:
        if len(g) != rank:
            raise ValueError("generator length does not match rank")
    return Cone(rank=rank, rays=extremal_rays(generators))


def positive_functional(cone: Cone):
    """Integer m with <m, ray> >= 1 for every ray, or None if not pointed."""
    if not cone.rays:
        return (0,) * cone.rank
    ineqs = [(list(r), 1) for r in cone.rays]
    return _integer_point(feasible_point(cone.rank, [], ineqs))


def is_pointed(cone: Cone) -> bool:
    return positive_functional(cone) is not None


def lineality_witness(cone: Cone):
    """A nonzero integer vector w with both w and -w in the cone, or None."""
    if is_pointed(cone):
        return None
    # the lineality space is cut out by the dual generators
    dual = dual_cone(cone).generators
    rows = [list(map(Fraction, d)) for d in dual]
    n = cone.rank
    # kernel vector via elimination
    pivots = {}
    r = 0
    work = [row[:] for row in rows]
    for c in range(n):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots[c] = r
        r += 1
    for c in range(n):
        if c not in pivots:
            vec = [Fraction(0)] * n
            vec[c] = Fraction(1)
            for pc, pr in pivots.items():
                vec[pc] = -work[pr][c]
            scale = lcm(*(f.denominator for f in vec))
            w = tuple(int(f * scale) for f in vec)
            return primitive_part(w)
    raise AssertionError("non-pointed cone must have a lineality direction")


@lru_cache(maxsize=None)
def dual_cone(cone: Cone) -> DualCone:
    """Generators of the dual cone by double description.

    Runs one halfspace at a time, combining each positive and negative pair
    on the separating hyperplane and pruning by the standard rank test. For
    a full-dimensional input the output is the exact extremal ray set of the
    (then pointed) dual.
    """
    n = cone.rank
    gens = set()
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        gens.add(e)
        gens.add(tuple(-x for x in e))
    processed: list[LatticeVector] = []
    for r in sorted(cone.rays):
        pos = [g for g in gens if pairing(g, r) > 0]
        neg = [g for g in gens if pairing(g, r) < 0]
        zero = [g for g in gens if pairing(g, r) == 0]
        new = set(pos) | set(zero)
        for p in pos:
            a = pairing(p, r)
            for m in neg:
                b = pairing(m, r)
                comb = tuple(a * mi - b * pi for pi, mi in zip(p, m))
                if not is_zero_vector(comb):
                    new.add(primitive_part(comb))
        processed.append(r)
        full_rank = matrix_rank(processed)
        kept = set()
        for g in new:
            active = [q for q in processed if pairing(g, q) == 0]
            if matrix_rank(active) >= full_rank - 1:
                kept.add(g)
        gens = kept
    return DualCone(rank=n, generators=tuple(sorted(gens)))


def cone_member(cone: Cone, x: LatticeVector) -> bool:
    """Lattice point membership through the dual description."""
    if len(x) != cone.rank:
        raise ValueError("vector length does not match rank")
    return all(pairing(x, d) >= 0 for d in dual_cone(cone).generators)


def two_face_functional(cone: Cone, v: LatticeVector, vp: LatticeVector):
    """Integer functional vanishing exactly on the face spanned by v and vp.

    Exists iff the two rays span a common two-dimensional face; the
    functional is zero on both and at least 1 on every other ray. Returns
    None when the rays are not adjacent.
    """
    v, vp = tuple(v), tuple(vp)
    if v not in cone.rays or vp not in cone.rays:
        raise ValueError("both arguments must be rays of the cone")
    if v == vp:
        raise ValueError("need two distinct rays")
    eqs = [(list(v), 0), (list(vp), 0)]
    ineqs = [(list(r), 1) for r in cone.rays if r not in (v, vp)]
    return _integer_point(feasible_point(cone.rank, eqs, ineqs))


def two_face_adjacent(cone: Cone, v: LatticeVector, vp: LatticeVector) -> bool:
    return two_face_functional(cone, v, vp) is not None


def adjacency_set(cone: Cone, v: LatticeVector) -> LatticeMatrix:
    """Rays spanning a two-face with v whose pair {v, ray} extends to a basis.

    Both conditions together are what the commuting-pair construction needs,
    so this is the neighbour set every maximality question ranges over.
    """
    from .lattice import extends_to_basis

    v = tuple(v)
    if v not in cone.rays:
        raise ValueError("argument must be a ray of the cone")
    out = []
    for r in cone.rays:
        if r == v:
            continue
        if two_face_adjacent(cone, v, r) and extends_to_basis([v, r]):
            out.append(r)
    return tuple(out)


# ---------------------------------------------------------------------------
# Hilbert bases


def completeness_bound(cone: Cone) -> int:
    """Box radius guaranteed to contain the whole Hilbert basis.

    Every irreducible element lies in the zonotope spanned by the primitive
    rays, so the sum of their infinity norms bounds each coordinate.
    """
    return sum(max(abs(x) for x in r) for r in cone.rays) if cone.rays else 0


@lru_cache(maxsize=None)
def hilbert_basis(cone: Cone, bound: int | None = None) -> HilbertBasis:
    """Irreducible lattice points of the cone inside a box.

    With no explicit bound the box is taken large enough to be provably
    complete and the irreducibility filter is then exact. With a smaller
    caller-supplied bound the result is marked complete=False: it lists the
    irreducible elements found inside the box only.
    """
    witness = lineality_witness(cone)
    if witness is not None:
        raise RefusalError(
            "cone contains a line, so its semigroup has no Hilbert basis",
            witness={"lineality": list(witness)},
        )
    needed = completeness_bound(cone)
    b = needed if bound is None else bound
    complete = b >= needed
    dual = dual_cone(cone).generators
    n = cone.rank
    if not cone.rays or b == 0:
        return HilbertBasis(elements=(), complete=True, bound=b)

    # depth-first box scan with interval pruning against each dual generator
    suffix = []
    for d in dual:
        acc = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            acc[i] = acc[i + 1] + abs(d[i]) * b
        suffix.append(acc)
    points = []
    coords = [0] * n

    def walk(depth, sums):
        if depth == n:
            if any(s < 0 for s in sums):
                return
            pt = tuple(coords)
            if not is_zero_vector(pt):
                points.append(pt)
            return
        for val in range(-b, b + 1):
            coords[depth] = val
            nxt = [s + val * d[depth] for s, d in zip(sums, dual)]
            if all(s + suffix[k][depth + 1] >= 0 for k, s in enumerate(nxt)):
                walk(depth + 1, nxt)

    walk(0, [0] * len(dual))
    points.sort()

    pairings = {p: tuple(pairing(p, d) for d in dual) for p in points}

    def reducible(x):
        px = pairings[x]
        for y in points:
            if y == x:
                continue
            py = pairings[y]
            if all(a - c >= 0 for a, c in zip(px, py)):
                return True
        return False

    elems = tuple(p for p in points if not reducible(p))
    return HilbertBasis(elements=elems, complete=complete, bound=b)
