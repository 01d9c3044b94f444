"""Sparse exact polynomial algebra and symbolic derivations.

Monomials are exponent tuples (negative entries allowed, so localized
monomials work too) and coefficients are Fractions or ParamPoly values,
whichever the computation needs. ParamPoly covers the formal parameters of
exponentials, so one-parameter subgroups are manipulated exactly in Q[t]
or Q[s, t] instead of being sampled at numeric times.

Derivations are small composable objects with an ``apply`` method; the
commutator is kept lazy so cross-checks evaluate it on whatever generating
set the caller trusts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SearchBoundExceeded
from .lattice import pairing, vec_add, vec_sub


# ---------------------------------------------------------------------------
# coefficients carrying formal parameters


class ParamPoly:
    """Polynomial in named formal parameters with Fraction coefficients.

    Example: the coefficient of a second order exponential term is
    ParamPoly.variable("t") ** 2 / 2, printed as "1/2*t^2".
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms):
        self.vars = tuple(vars)
        clean = {}
        for pw, c in terms.items():
            c = Fraction(c)
            if c != 0:
                clean[tuple(pw)] = c
        self.terms = clean

    @classmethod
    def constant(cls, value) -> "ParamPoly":
        v = Fraction(value)
        return cls((), {(): v} if v != 0 else {})

    @classmethod
    def variable(cls, name: str) -> "ParamPoly":
        return cls((name,), {(1,): Fraction(1)})

    @classmethod
    def coerce(cls, value) -> "ParamPoly":
        if isinstance(value, ParamPoly):
            return value
        return cls.constant(value)

    def is_zero(self) -> bool:
        return not self.terms

    def _aligned(self, other):
        other = ParamPoly.coerce(other)
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        merged = tuple(sorted(set(self.vars) | set(other.vars)))

        def remap(p):
            idx = [p.vars.index(v) if v in p.vars else None for v in merged]
            out = {}
            for pw, c in p.terms.items():
                key = tuple(0 if i is None else pw[i] for i in idx)
                out[key] = c
            return out

        return merged, remap(self), remap(other)

    def __add__(self, other):
        vs, a, b = self._aligned(other)
        out = dict(a)
        for pw, c in b.items():
            out[pw] = out.get(pw, Fraction(0)) + c
        return ParamPoly(vs, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.vars, {pw: -c for pw, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-ParamPoly.coerce(other))

    def __rsub__(self, other):
        return ParamPoly.coerce(other) + (-self)

    def __mul__(self, other):
        vs, a, b = self._aligned(other)
        out = {}
        for pa, ca in a.items():
            for pb, cb in b.items():
                key = tuple(x + y for x, y in zip(pa, pb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return ParamPoly(vs, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        inv = 1 / Fraction(other)
        return ParamPoly(self.vars, {pw: c * inv for pw, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined here")
        out = ParamPoly.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            _, a, b = self._aligned(other)
            return a == b
        if isinstance(other, (int, Fraction)):
            cv = self.constant_value()
            return cv is not None and cv == Fraction(other)
        return NotImplemented

    def __hash__(self):
        # hash through a canonical form with unused vars dropped
        used = [i for i in range(len(self.vars))
                if any(pw[i] for pw in self.terms)]
        vs = tuple(self.vars[i] for i in used)
        items = frozenset((tuple(pw[i] for i in used), c)
                          for pw, c in self.terms.items())
        return hash((vs, items))

    def substitute(self, assignment: dict) -> "ParamPoly":
        """Replace parameters by Fractions or other ParamPoly values."""
        out = ParamPoly.constant(0)
        for pw, c in self.terms.items():
            term = ParamPoly.constant(c)
            for var, power in zip(self.vars, pw):
                if power == 0:
                    continue
                val = assignment.get(var)
                if val is None:
                    val = ParamPoly.variable(var)
                term = term * ParamPoly.coerce(val) ** power
            out = out + term
        return out

    def constant_value(self):
        """The Fraction value when the polynomial is constant, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            pw, c = next(iter(self.terms.items()))
            if all(x == 0 for x in pw):
                return c
        return None

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for pw in sorted(self.terms, key=lambda p: (sum(p), p)):
            c = self.terms[pw]
            factors = []
            for var, power in zip(self.vars, pw):
                if power == 1:
                    factors.append(var)
                elif power > 1:
                    factors.append(f"{var}^{power}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(str(c) + "*" + "*".join(factors))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"ParamPoly({self})"


def _coeff_zero(c) -> bool:
    if isinstance(c, ParamPoly):
        return c.is_zero()
    return c == 0


def coeff_to_string(c) -> str:
    """Render a coefficient the way reports expect: "p/q" or a Q[t] string."""
    if isinstance(c, ParamPoly):
        return str(c)
    return str(Fraction(c))


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Sparse polynomial keyed by exponent tuple.

    The exponent lattice is whatever the caller says it is; nothing here
    assumes nonnegativity, so localized monomials pass through unharmed.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                if isinstance(c, int):
                    c = Fraction(c)
                if not _coeff_zero(c):
                    clean[tuple(exp)] = c
        self.terms = clean

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def monomial(cls, exp, coeff=1) -> "Polynomial":
        return cls({tuple(exp): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def support(self):
        return tuple(sorted(self.terms))

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), Fraction(0))

    def __add__(self, other):
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return Polynomial(out)

    def __sub__(self, other):
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) - c
        return Polynomial(out)

    def __neg__(self):
        return Polynomial({exp: -c for exp, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = vec_add(ea, eb)
                cur = out.get(key)
                out[key] = ca * cb if cur is None else cur + ca * cb
        return Polynomial(out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        return Polynomial({exp: co * c for exp, co in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(
            (exp, c if isinstance(c, ParamPoly) else Fraction(c))
            for exp, c in self.terms.items()))

    def map_coefficients(self, fn):
        return Polynomial({exp: fn(c) for exp, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(
            f"({coeff_to_string(c)})*X^{list(exp)}"
            for exp, c in sorted(self.terms.items()))

    def __repr__(self):
        return f"Polynomial({self})"


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


# ---------------------------------------------------------------------------
# derivations


class Derivation:
    def apply(self, poly: Polynomial) -> Polynomial:
        raise NotImplementedError

    def __call__(self, poly: Polynomial) -> Polynomial:
        return self.apply(poly)


class MonomialShiftDerivation(Derivation):
    """chi^m maps to <m, weight> chi^(m + shift), extended linearly.

    This is the shape every homogeneous derivation of a semigroup algebra
    attached to a ray and its root takes.
    """

    def __init__(self, weight, shift):
        self.weight = tuple(weight)
        self.shift = tuple(shift)

    def apply(self, poly: Polynomial) -> Polynomial:
        out = {}
        for exp, c in poly.terms.items():
            k = pairing(exp, self.weight)
            if k == 0:
                continue
            key = vec_add(exp, self.shift)
            cur = out.get(key)
            add = c * k
            out[key] = add if cur is None else cur + add
        return Polynomial(out)


class VariableImagesDerivation(Derivation):
    """Derivation of a polynomial ring given by its values on variables.

    ``images`` maps variable index to a Polynomial. An optional reducer is
    applied after every Leibniz expansion, which is how quotient rings stay
    in normal form.
    """

    def __init__(self, nvars: int, images: dict, reducer=None):
        self.nvars = nvars
        self.images = {i: p for i, p in images.items() if not p.is_zero()}
        self.reducer = reducer

    def apply(self, poly: Polynomial) -> Polynomial:
        total = Polynomial.zero()
        for exp, c in poly.terms.items():
            for i, image in self.images.items():
                a = exp[i]
                if a == 0:
                    continue
                lowered = list(exp)
                lowered[i] -= 1
                partial = Polynomial.monomial(tuple(lowered), c * a) * image
                total = total + partial
        if self.reducer is not None:
            total = self.reducer(total)
        return total


class ScaledDerivation(Derivation):
    """multiplier * base. The caller is responsible for the multiplier
    lying in the kernel when the result is supposed to stay locally
    nilpotent."""

    def __init__(self, multiplier: Polynomial, base: Derivation, reducer=None):
        self.multiplier = multiplier
        self.base = base
        self.reducer = reducer

    def apply(self, poly: Polynomial) -> Polynomial:
        out = self.multiplier * self.base.apply(poly)
        if self.reducer is not None:
            out = self.reducer(out)
        return out


class CommutatorDerivation(Derivation):
    """[a, b], evaluated lazily."""

    def __init__(self, a: Derivation, b: Derivation, reducer=None):
        self.a = a
        self.b = b
        self.reducer = reducer

    def apply(self, poly: Polynomial) -> Polynomial:
        out = self.a.apply(self.b.apply(poly)) - self.b.apply(self.a.apply(poly))
        if self.reducer is not None:
            out = self.reducer(out)
        return out


def commutator(a: Derivation, b: Derivation, reducer=None) -> CommutatorDerivation:
    return CommutatorDerivation(a, b, reducer=reducer)


def apply_derivation(derivation: Derivation, poly: Polynomial) -> Polynomial:
    return derivation.apply(poly)


def commutator_vanishes_on(a: Derivation, b: Derivation, generators,
                           reducer=None) -> bool:
    """Whether [a, b] kills every given generator.

    A derivation vanishing on algebra generators vanishes everywhere, so
    this is an exact zero test as long as the generators generate.
    """
    bracket = commutator(a, b, reducer=reducer)
    return all(bracket.apply(g).is_zero() for g in generators)


@dataclass(frozen=True)
class NilpotencyVerdict:
    status: str  # "nilpotent" | "not_nilpotent" | "inconclusive"
    orders: tuple[int, ...]
    witness: object = None

    @property
    def nilpotent(self):
        if self.status == "nilpotent":
            return True
        if self.status == "not_nilpotent":
            return False
        return None


def is_locally_nilpotent(derivation: Derivation, generators,
                         cap: int = 64) -> NilpotencyVerdict:
    """Iterate the derivation on each generator until it dies or the cap hits.

    An eigenvector along the way (image = scalar * current, nonzero scalar)
    proves the derivation is not locally nilpotent; running past the cap is
    reported as inconclusive, never as a verdict.
    """
    orders = []
    for g in generators:
        current = g
        k = 0
        while not current.is_zero():
            if k >= cap:
                return NilpotencyVerdict(
                    status="inconclusive", orders=tuple(orders),
                    witness={"cap": cap, "generator": current.support()})
            nxt = derivation.apply(current)
            if not nxt.is_zero() and nxt.support() == current.support():
                ratios = {exp: nxt.terms[exp] for exp in nxt.terms}
                base = {exp: current.terms[exp] for exp in current.terms}
                scalars = set()
                ok = True
                for exp in ratios:
                    c0 = base[exp]
                    if isinstance(c0, ParamPoly) or isinstance(ratios[exp], ParamPoly):
                        ok = False
                        break
                    scalars.add(Fraction(ratios[exp]) / Fraction(c0))
                if ok and len(scalars) == 1:
                    return NilpotencyVerdict(
                        status="not_nilpotent", orders=tuple(orders),
                        witness={"eigenvector": current.support(),
                                 "eigenvalue": str(next(iter(scalars)))})
            current = nxt
            k += 1
        orders.append(k)
    return NilpotencyVerdict(status="nilpotent", orders=tuple(orders))


def exponential(derivation: Derivation, poly: Polynomial, param: str = "t",
                cap: int = 64) -> Polynomial:
    """exp(param * derivation) applied to poly, exactly.

    Requires the iteration to terminate within the cap; the sum
    sum_k param^k/k! delta^k(poly) is returned with ParamPoly coefficients.
    """
    t = ParamPoly.variable(param)
    out = Polynomial.zero()
    current = poly
    k = 0
    factorial = 1
    while not current.is_zero():
        if k > cap:
            raise SearchBoundExceeded(
                f"exponential did not terminate within {cap} steps", cap=cap)
        coeff = t ** k / factorial
        out = out + current.map_coefficients(lambda c: coeff * c)
        current = derivation.apply(current)
        k += 1
        factorial *= k
    return out


def homogeneous_components(poly: Polynomial, degree_fn):
    """Split a polynomial along a grading.

    ``degree_fn`` maps an exponent tuple to any hashable label; the result
    maps labels to the homogeneous parts, and the parts sum back to the
    input.
    """
    buckets = {}
    for exp, c in poly.terms.items():
        label = degree_fn(exp)
        buckets.setdefault(label, {})[exp] = c
    return {label: Polynomial(terms) for label, terms in sorted(
        buckets.items(), key=lambda kv: repr(kv[0]))}


def is_homogeneous(poly: Polynomial, degree_fn):
    """(True, label) for homogeneous input (zero included), else (False, None)."""
    comps = homogeneous_components(poly, degree_fn)
    if len(comps) > 1:
        return False, None
    if not comps:
        return True, None
    return True, next(iter(comps))


# ---------------------------------------------------------------------------
# trinomial quotient rings


class TrinomialRing:
    """K[T0, T1, T2] / (T1^l1 - T2^l2 - T0^l0).

    Variables are indexed T0-block first, then T1, then T2. The rewrite
    sends the T1 leading monomial to T2^l2 + T0^l0; substitutes contain no
    T1 variables, so reduction terminates and normal forms are unique.
    An empty T0 block contributes the constant 1.
    """

    def __init__(self, l0, l1, l2):
        self.l0 = tuple(int(x) for x in l0)
        self.l1 = tuple(int(x) for x in l1)
        self.l2 = tuple(int(x) for x in l2)
        if not self.l1 or not self.l2:
            raise ValueError("both the product block and the power block must be nonempty")
        if any(x <= 0 for x in self.l0 + self.l1 + self.l2):
            raise ValueError("exponents must be positive")
        self.n0 = len(self.l0)
        self.n1 = len(self.l1)
        self.n2 = len(self.l2)
        self.nvars = self.n0 + self.n1 + self.n2

    def block_slices(self):
        a = self.n0
        b = a + self.n1
        return slice(0, a), slice(a, b), slice(b, self.nvars)

    def _monomial(self, block_exps) -> tuple[int, ...]:
        t0, t1, t2 = block_exps
        return tuple(t0) + tuple(t1) + tuple(t2)

    def leading_monomial(self) -> tuple[int, ...]:
        return self._monomial(((0,) * self.n0, self.l1, (0,) * self.n2))

    def substitute_polynomial(self) -> Polynomial:
        """T2^l2 + T0^l0 (the image of the leading monomial)."""
        t2 = self._monomial(((0,) * self.n0, (0,) * self.n1, self.l2))
        t0 = self._monomial((self.l0, (0,) * self.n1, (0,) * self.n2))
        return Polynomial.monomial(t2) + Polynomial.monomial(t0)

    def relation_polynomial(self) -> Polynomial:
        return Polynomial.monomial(self.leading_monomial()) - self.substitute_polynomial()

    def _reducible(self, exp) -> bool:
        _, s1, _ = self.block_slices()
        return all(a >= b for a, b in zip(exp[s1], self.l1))

    def reduce(self, poly: Polynomial) -> Polynomial:
        """Normal form: no term divisible by the T1 leading monomial.

        Every rewrite strictly lowers the T1 degree of the term it touches,
        so the loop terminates; the single-relation system is confluent, and
        the rewrite target is chosen canonically anyway.
        """
        sub = self.substitute_polynomial()
        work = dict(poly.terms)
        while True:
            targets = [exp for exp in work if self._reducible(exp)]
            if not targets:
                break
            exp = max(targets)
            c = work.pop(exp)
            rest = list(exp)
            for i, b in enumerate(self.l1):
                rest[self.n0 + i] -= b
            replaced = Polynomial.monomial(tuple(rest), c) * sub
            for e2, c2 in replaced.terms.items():
                tot = work.get(e2, Fraction(0)) + c2
                if _coeff_zero(tot):
                    work.pop(e2, None)
                else:
                    work[e2] = tot
        return Polynomial(work)

    def variable(self, index: int) -> Polynomial:
        exp = [0] * self.nvars
        exp[index] = 1
        return Polynomial.monomial(tuple(exp))

    def variables(self):
        return tuple(self.variable(i) for i in range(self.nvars))


def reduce(poly: Polynomial, ring: TrinomialRing) -> Polynomial:
    return ring.reduce(poly)
