"""Exact symbolic core.

Multivariate Laurent polynomials over the rationals, ideals with a Buchberger
engine, finite-dimensional quotient rings and their multiplication matrices,
and division-free characteristic polynomials.

Laurent variables are handled by adjoining a companion variable ``z_inv`` and
the relation ``z*z_inv - 1`` before running Buchberger, so one engine serves
both polynomial and Laurent rings.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Exp = Tuple[int, ...]

DEFAULT_BUDGET = 10**7
BUDGET_ENV = "MIRRORFLAG_STEP_BUDGET"


class SymAlgError(Exception):
    pass


class BudgetExceeded(SymAlgError):
    pass


class NotZeroDimensional(SymAlgError):
    pass


class NotAUnit(SymAlgError):
    pass


def step_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise SymAlgError(f"bad {BUDGET_ENV}={raw!r}") from exc
    if value <= 0:
        raise SymAlgError(f"bad {BUDGET_ENV}={raw!r}")
    return value


def to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


def frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# --------------------------------------------------------------------------
# rings and Laurent polynomials


class Ring:
    """Registry of named indeterminates, each flagged invertible or not."""

    __slots__ = ("names", "invertible", "_index")

    def __init__(self, names: Sequence[str], invertible: Iterable[str] = ()):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise SymAlgError(f"duplicate variable names in {names}")
        inv = set(invertible)
        unknown = inv - set(names)
        if unknown:
            raise SymAlgError(f"unknown invertible variables {sorted(unknown)}")
        self.names = names
        self.invertible = tuple(n in inv for n in names)
        self._index = {n: i for i, n in enumerate(names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SymAlgError(f"no variable {name!r} in ring {self.names}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.names == other.names and self.invertible == other.invertible

    def __hash__(self) -> int:
        return hash((self.names, self.invertible))

    def __repr__(self) -> str:
        inv = [n for n, f in zip(self.names, self.invertible) if f]
        return f"Ring({list(self.names)}, invertible={inv})"

    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return self.const(1)

    def const(self, c) -> "LaurentPoly":
        c = to_fraction(c)
        return LaurentPoly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "LaurentPoly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return LaurentPoly(self, {tuple(e): Fraction(1)})

    def vars(self, *names: str) -> List["LaurentPoly"]:
        return [self.var(n) for n in names]

    def monomial(self, exps: Mapping[str, int], coeff=1) -> "LaurentPoly":
        e = [0] * self.nvars
        for n, a in exps.items():
            e[self.index(n)] = a
        return LaurentPoly(self, {tuple(e): to_fraction(coeff)})

    def coerce(self, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            if x.ring == self:
                return x
            return x.to_ring(self)
        return self.const(x)

    def without(self, names: Iterable[str]) -> "Ring":
        drop = set(names)
        keep = [n for n in self.names if n not in drop]
        inv = [n for n, f in zip(self.names, self.invertible) if f and n not in drop]
        return Ring(keep, inv)


class LaurentPoly:
    """Sparse Laurent polynomial: exponent tuple -> nonzero Fraction."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Exp, Fraction], check: bool = True):
        self.ring = ring
        if check:
            clean = {}
            for e, c in terms.items():
                c = to_fraction(c)
                if not c:
                    continue
                e = tuple(e)
                if len(e) != ring.nvars:
                    raise SymAlgError("exponent length does not match ring")
                for a, inv in zip(e, ring.invertible):
                    if a < 0 and not inv:
                        raise SymAlgError("negative exponent on a non-invertible variable")
                clean[e] = c
            self.terms = clean
        else:
            self.terms = dict(terms)

    # basic predicates
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise SymAlgError(f"{self} is not constant")
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        e = next(iter(self.terms))
        return all(a == 0 or inv for a, inv in zip(e, self.ring.invertible))

    def variables(self) -> List[str]:
        used = set()
        for e in self.terms:
            for i, a in enumerate(e):
                if a:
                    used.add(i)
        return [self.ring.names[i] for i in sorted(used)]

    # arithmetic
    def _other(self, other) -> Optional["LaurentPoly"]:
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                raise SymAlgError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        for e, c in o.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return LaurentPoly(self.ring, t, check=False)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {e: -c for e, c in self.terms.items()}, check=False)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            return LaurentPoly(self.ring, {e: c * other for e, c in self.terms.items()}, check=False)
        o = self._other(other)
        if o is None:
            return NotImplemented
        t: Dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        return LaurentPoly(self.ring, t, check=False)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit")
        (e, c), = self.terms.items()
        return LaurentPoly(self.ring, {tuple(-a for a in e): 1 / c}, check=False)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # calculus
    def diff(self, name: str) -> "LaurentPoly":
        i = self.ring.index(name)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return LaurentPoly(self.ring, t, check=False)

    def euler(self, name: str) -> "LaurentPoly":
        """z * d/dz."""
        i = self.ring.index(name)
        return LaurentPoly(self.ring, {e: c * e[i] for e, c in self.terms.items() if e[i]}, check=False)

    def degree_in(self, name: str) -> Tuple[int, int]:
        i = self.ring.index(name)
        if not self.terms:
            raise SymAlgError("degree of zero")
        ds = [e[i] for e in self.terms]
        return min(ds), max(ds)

    def monomial_exponent(self, name: str) -> int:
        if not self.is_monomial():
            raise SymAlgError(f"{self} is not a monomial")
        return next(iter(self.terms))[self.ring.index(name)]

    # substitution
    def subs(self, values: Mapping[str, object], ring: Optional[Ring] = None) -> "LaurentPoly":
        """Substitute variables by rationals or by polynomials of ``ring``.

        Substituted variables disappear; the target ring defaults to this ring
        with those variables removed.
        """
        target = ring if ring is not None else self.ring.without(values)
        idx = {n: self.ring.index(n) for n in values}
        keep = [(i, target.index(n)) for i, n in enumerate(self.ring.names) if n not in values]
        vals = {}
        for n, v in values.items():
            vals[n] = v if isinstance(v, LaurentPoly) else to_fraction(v)
        out = target.zero()
        cache: Dict[Tuple[str, int], object] = {}
        for e, c in self.terms.items():
            base = [0] * target.nvars
            for i, j in keep:
                base[j] += e[i]
            term = LaurentPoly(target, {tuple(base): c}, check=False) if all(
                a >= 0 or target.invertible[j] for j, a in enumerate(base)) else None
            if term is None:
                raise SymAlgError("substitution leaves a negative exponent on a non-invertible variable")
            for n, i in idx.items():
                a = e[i]
                if not a:
                    continue
                key = (n, a)
                if key not in cache:
                    v = vals[n]
                    if isinstance(v, LaurentPoly):
                        cache[key] = v.to_ring(target) ** a
                    else:
                        if a < 0 and not v:
                            raise ZeroDivisionError(f"{n} -> 0 with negative exponent")
                        cache[key] = v ** a
                term = term * cache[key]
            out = out + term
        return out

    def to_ring(self, ring: Ring) -> "LaurentPoly":
        """Embed into a ring whose variables include all used ones."""
        if ring == self.ring:
            return self
        mapping = []
        for i, n in enumerate(self.ring.names):
            mapping.append(ring.index(n) if n in ring else None)
        t = {}
        for e, c in self.terms.items():
            f = [0] * ring.nvars
            for i, a in enumerate(e):
                if a:
                    j = mapping[i]
                    if j is None:
                        raise SymAlgError(f"variable {self.ring.names[i]} absent from target ring")
                    f[j] = a
            t[tuple(f)] = c
        return LaurentPoly(ring, t)

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        r = self.subs(values)
        return r.constant_value()

    # display
    def sorted_terms(self) -> List[Tuple[Exp, Fraction]]:
        return sorted(self.terms.items(), key=lambda ec: grevlex_key(ec[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = []
            for n, a in zip(self.ring.names, e):
                if a == 1:
                    mon.append(n)
                elif a:
                    mon.append(f"{n}^{a}")
            if not mon:
                s = frac_str(abs(c))
            elif abs(c) == 1:
                s = "*".join(mon)
            else:
                s = frac_str(abs(c)) + "*" + "*".join(mon)
            parts.append(("-" if c < 0 else "+", s))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.ring.names),
            "terms": [[list(e), frac_str(c)] for e, c in self.sorted_terms()],
        }


def poly_from_terms(ring: Ring, terms: Iterable) -> LaurentPoly:
    """Build from ``[[exponents], "p/q"]`` pairs."""
    return LaurentPoly(ring, {tuple(e): Fraction(c) for e, c in terms})


# --------------------------------------------------------------------------
# monomial orders


def grevlex_key(e: Exp):
    return (sum(e), tuple(-a for a in reversed(e)))


def lex_key(e: Exp):
    return e


ORDERS: Dict[str, Callable[[Exp], object]] = {"grevlex": grevlex_key, "lex": lex_key}


def order_key(order: str):
    try:
        return ORDERS[order]
    except KeyError:
        raise SymAlgError(f"unknown monomial order {order!r}") from None


# --------------------------------------------------------------------------
# Buchberger on plain polynomials (dict exponent -> Fraction)

Poly = Dict[Exp, Fraction]


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


class _Counter:
    __slots__ = ("steps", "limit")

    def __init__(self, limit: int):
        self.steps = 0
        self.limit = limit

    def tick(self, n: int = 1):
        self.steps += n
        if self.steps > self.limit:
            raise BudgetExceeded(f"budget exceeded after {self.steps} reduction steps")


def _lead(p: Poly, key) -> Exp:
    return max(p, key=key)


def _normal_form(p: Poly, basis: List[Tuple[Exp, Poly]], key, counter: Optional[_Counter]) -> Poly:
    """Full reduction of p by a list of (leading exponent, monic poly)."""
    p = dict(p)
    rem: Poly = {}
    while p:
        m = _lead(p, key)
        c = p[m]
        for lm, g in basis:
            if _divides(lm, m):
                shift = tuple(x - y for x, y in zip(m, lm))
                for e, gc in g.items():
                    t = tuple(x + y for x, y in zip(e, shift))
                    v = p.get(t, 0) - c * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                if counter is not None:
                    counter.tick()
                break
        else:
            rem[m] = c
            del p[m]
    return rem


def _monic(p: Poly, key) -> Tuple[Exp, Poly]:
    lm = _lead(p, key)
    c = p[lm]
    return lm, {e: v / c for e, v in p.items()}


def _spoly(f: Tuple[Exp, Poly], g: Tuple[Exp, Poly]) -> Poly:
    lf, pf = f
    lg, pg = g
    l = _lcm(lf, lg)
    sf = tuple(a - b for a, b in zip(l, lf))
    sg = tuple(a - b for a, b in zip(l, lg))
    out: Poly = {}
    for e, c in pf.items():
        out[tuple(a + b for a, b in zip(e, sf))] = c
    for e, c in pg.items():
        t = tuple(a + b for a, b in zip(e, sg))
        v = out.get(t, 0) - c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def buchberger(polys: Sequence[Poly], key, budget: Optional[int] = None) -> List[Tuple[Exp, Poly]]:
    """Reduced Groebner basis as a sorted list of (leading exponent, monic poly)."""
    counter = _Counter(budget if budget is not None else step_budget())
    G: List[Tuple[Exp, Poly]] = []
    pairs: List[Tuple[int, int]] = []
    for p in polys:
        r = _normal_form(p, G, key, counter)
        if r:
            g = _monic(r, key)
            for i in range(len(G)):
                pairs.append((i, len(G)))
            G.append(g)
    done = set()
    while pairs:
        pairs.sort(key=lambda ij: key(_lcm(G[ij[0]][0], G[ij[1]][0])))
        i, j = pairs.pop(0)
        done.add((i, j))
        li, lj = G[i][0], G[j][0]
        l = _lcm(li, lj)
        # product criterion
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        # chain criterion
        skip = False
        for m in range(len(G)):
            if m in (i, j) or not _divides(G[m][0], l):
                continue
            a, b = (min(i, m), max(i, m)), (min(j, m), max(j, m))
            if a in done and b in done:
                skip = True
                break
        if skip:
            continue
        active = [g for g in G if g is not None]
        r = _normal_form(_spoly(G[i], G[j]), active, key, counter)
        if r:
            g = _monic(r, key)
            n = len(G)
            G.append(g)
            for m in range(n):
                pairs.append((m, n))
    # minimalize
    lms = [g[0] for g in G]
    minimal = []
    for a, g in enumerate(G):
        if any(b != a and _divides(lms[b], g[0]) and (lms[b] != g[0] or b < a) for b in range(len(G))):
            continue
        minimal.append(g)
    # interreduce
    reduced = []
    for a, (lm, g) in enumerate(minimal):
        others = [h for b, h in enumerate(minimal) if b != a]
        tail = {e: c for e, c in g.items() if e != lm}
        r = _normal_form(tail, others, key, counter)
        r[lm] = Fraction(1)
        reduced.append((lm, r))
    reduced.sort(key=lambda g: key(g[0]))
    return reduced


# --------------------------------------------------------------------------
# ideals


def _extended_ring(ring: Ring) -> Tuple[Ring, List[Tuple[int, int]]]:
    names = list(ring.names)
    pairs = []
    for i, (n, inv) in enumerate(zip(ring.names, ring.invertible)):
        if inv:
            pairs.append((i, len(names)))
            names.append(n + "_inv")
    return Ring(names), pairs


def _to_ext(p: LaurentPoly, ext: Ring, pairs) -> Poly:
    n = p.ring.nvars
    out: Poly = {}
    for e, c in p.terms.items():
        f = list(e) + [0] * (ext.nvars - n)
        for i, j in pairs:
            if f[i] < 0:
                f[j] = -f[i]
                f[i] = 0
        out[tuple(f)] = c
    return out


def _from_ext_exp(e: Exp, nbase: int, pairs) -> Exp:
    f = list(e[:nbase])
    for i, j in pairs:
        f[i] -= e[j]
    return tuple(f)


@dataclass
class Ideal:
    """Ideal of a Laurent polynomial ring, with an optional Groebner cache."""

    ring: Ring
    generators: List[LaurentPoly]
    order: Optional[str] = None
    gb: Optional[List[Tuple[Exp, Poly]]] = None
    ext_ring: Optional[Ring] = None
    companions: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.generators = [self.ring.coerce(g) for g in self.generators]

    @property
    def has_gb(self) -> bool:
        return self.gb is not None

    def specialize(self, values: Mapping[str, object]) -> "Ideal":
        return Ideal(self.ring.without(values), [g.subs(values) for g in self.generators])

    def normal_form(self, f: LaurentPoly) -> Poly:
        if self.gb is None:
            raise SymAlgError("ideal has no Groebner basis")
        return _normal_form(_to_ext(self.ring.coerce(f), self.ext_ring, self.companions),
                            self.gb, order_key(self.order), None)

    def contains(self, f: LaurentPoly) -> bool:
        return not self.normal_form(f)

    def basis_polys(self) -> List[LaurentPoly]:
        """Groebner basis elements pulled back to the Laurent ring."""
        if self.gb is None:
            raise SymAlgError("ideal has no Groebner basis")
        n = self.ring.nvars
        out = []
        for _, g in self.gb:
            out.append(LaurentPoly(self.ring, {_from_ext_exp(e, n, self.companions): c for e, c in g.items()}))
        return out

    def leading_exponents(self) -> List[Exp]:
        if self.gb is None:
            raise SymAlgError("ideal has no Groebner basis")
        return [lm for lm, _ in self.gb]


def groebner_basis(ideal: Ideal, order: str = "grevlex", budget: Optional[int] = None) -> Ideal:
    key = order_key(order)
    ext, pairs = _extended_ring(ideal.ring)
    polys = [_to_ext(g, ext, pairs) for g in ideal.generators]
    for i, j in pairs:
        e = [0] * ext.nvars
        e[i] = 1
        e[j] = 1
        polys.append({tuple(e): Fraction(1), (0,) * ext.nvars: Fraction(-1)})
    polys = [p for p in polys if p]
    gb = buchberger(polys, key, budget)
    return Ideal(ideal.ring, list(ideal.generators), order, gb, ext, pairs)


# --------------------------------------------------------------------------
# quotient rings


@dataclass
class QuotientRing:
    ideal: Ideal
    basis: List[Exp]  # standard monomials in the extended ring
    index: Dict[Exp, int]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def ring(self) -> Ring:
        return self.ideal.ring

    def basis_monomials(self) -> List[LaurentPoly]:
        n = self.ring.nvars
        return [LaurentPoly(self.ring, {_from_ext_exp(e, n, self.ideal.companions): Fraction(1)})
                for e in self.basis]

    def coords(self, f: LaurentPoly) -> List[Fraction]:
        r = self.ideal.normal_form(f)
        v = [Fraction(0)] * len(self.basis)
        for e, c in r.items():
            v[self.index[e]] = c
        return v

    def _coords_ext(self, p: Poly) -> List[Fraction]:
        r = _normal_form(p, self.ideal.gb, order_key(self.ideal.order), None)
        v = [Fraction(0)] * len(self.basis)
        for e, c in r.items():
            v[self.index[e]] = c
        return v


def quotient_basis(ideal: Ideal) -> QuotientRing:
    if ideal.gb is None:
        raise SymAlgError("quotient_basis needs a Groebner basis")
    lms = ideal.leading_exponents()
    nv = ideal.ext_ring.nvars
    if any(not any(lm) for lm in lms):
        return QuotientRing(ideal, [], {})
    for v in range(nv):
        if not any(lm[v] > 0 and all(a == 0 for k, a in enumerate(lm) if k != v) for lm in lms):
            raise NotZeroDimensional("not zero-dimensional: no pure power of "
                                     f"{ideal.ext_ring.names[v]} among leading monomials")
    zero = (0,) * nv
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for e in frontier:
            for v in range(nv):
                f = list(e)
                f[v] += 1
                f = tuple(f)
                if f in seen or any(_divides(lm, f) for lm in lms):
                    continue
                seen.add(f)
                nxt.append(f)
        frontier = nxt
    key = order_key(ideal.order)
    basis = sorted(seen, key=key)
    return QuotientRing(ideal, basis, {e: i for i, e in enumerate(basis)})


def mult_matrix(qr: QuotientRing, f: LaurentPoly) -> List[List[Fraction]]:
    """Column b holds the coordinates of f * basis[b]."""
    ideal = qr.ideal
    fe = _to_ext(qr.ring.coerce(f), ideal.ext_ring, ideal.companions)
    n = len(qr.basis)
    M = [[Fraction(0)] * n for _ in range(n)]
    for b, m in enumerate(qr.basis):
        prod = {tuple(x + y for x, y in zip(e, m)): c for e, c in fe.items()}
        col = qr._coords_ext(prod)
        for a in range(n):
            M[a][b] = col[a]
    return M


# --------------------------------------------------------------------------
# matrices over any commutative ring with +, -, *


Matrix = List[List[object]]


def mat_identity(n: int, one=Fraction(1), zero=None) -> Matrix:
    zero = one - one if zero is None else zero
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, m, p = len(A), len(B), len(B[0])
    if len(A[0]) != m:
        raise SymAlgError("shape mismatch")
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for k in range(m):
                a = A[i][k]
                b = B[k][j]
                if _is_zero(a) or _is_zero(b):
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            if acc is None:
                acc = A[i][0] * 0 if not isinstance(A[i][0], int) else B[0][j] * 0
            row.append(acc)
        out.append(row)
    return out


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, LaurentPoly):
        return not x.terms
    return False


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A: Matrix) -> Matrix:
    return [[c * a for a in row] for row in A]


def mat_apply(f: Callable, A: Matrix) -> Matrix:
    return [[f(a) for a in row] for row in A]


def mat_vec(A: Matrix, v: Sequence) -> List:
    return [sum((a * x for a, x in zip(row, v)), v[0] * 0) for row in A]


def mat_transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)]


def mat_equal(A: Matrix, B: Matrix) -> bool:
    return len(A) == len(B) and all(len(ra) == len(rb) and all(a == b for a, b in zip(ra, rb))
                                    for ra, rb in zip(A, B))


def mat_inverse(A: Matrix) -> List[List[Fraction]]:
    """Gauss-Jordan inverse over Q."""
    n = len(A)
    M = [[to_fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def char_poly(M: Matrix, one=None) -> List:
    """Coefficients [c_0, ..., c_n] of det(x*I - M), low to high (Berkowitz)."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise SymAlgError("char_poly needs a square matrix")
    if one is None:
        sample = M[0][0] if n else Fraction(1)
        one = sample.ring.one() if isinstance(sample, LaurentPoly) else Fraction(1)
    if n == 0:
        return [one]
    zero = one - one
    C = [one, -M[0][0]]  # high to low
    for r in range(1, n):
        A = [row[:r] for row in M[:r]]
        R = M[r][:r]
        S = [M[i][r] for i in range(r)]
        a = M[r][r]
        vec = [one, -a]
        cur = S
        for _ in range(r):
            vec.append(-sum((x * y for x, y in zip(R, cur)), zero))
            cur = [sum((A[i][j] * cur[j] for j in range(r)), zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(r + 1):
                if 0 <= i - j < len(vec):
                    acc = acc + vec[i - j] * C[j]
            new.append(acc)
        C = new
    return list(reversed(C))


def det(M: Matrix, one=None):
    n = len(M)
    cp = char_poly(M, one)
    return cp[0] if n % 2 == 0 else -cp[0]


def upoly_str(coeffs: Sequence, var: str = "x") -> str:
    """Render [c_0..c_n] (low to high) as a polynomial in ``var``."""
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if _is_zero(c):
            continue
        mon = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if isinstance(c, (int, Fraction)):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            s = frac_str(Fraction(mag)) if (mag != 1 or not mon) else ""
            body = s + ("*" if s and mon else "") + mon
        else:
            text = str(c)
            if isinstance(c, LaurentPoly) and len(c.terms) == 1 and next(iter(c.terms.values())) < 0:
                sign, text = "-", str(-c)
            else:
                sign = "+"
            if mon:
                if text == "1":
                    body = mon
                else:
                    body = (f"({text})" if isinstance(c, LaurentPoly) and len(c.terms) > 1 else text) + "*" + mon
            else:
                body = text
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# --------------------------------------------------------------------------
# sparse exact linear algebra


def sparse_echelon(rows: Iterable[Dict[object, Fraction]], key) -> Dict[object, Dict[object, Fraction]]:
    """Row-reduce sparse vectors; returns pivot -> reduced row (pivot = max by key)."""
    pivots: Dict[object, Dict[object, Fraction]] = {}
    for row in rows:
        r = {k: v for k, v in row.items() if v}
        while r:
            p = max(r, key=key)
            if p in pivots:
                c = r[p]
                for k, v in pivots[p].items():
                    nv = r.get(k, 0) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
            else:
                c = r[p]
                pivots[p] = {k: v / c for k, v in r.items()}
                break
    return pivots


def sparse_rank(rows: Iterable[Dict[object, Fraction]], key=None) -> int:
    return len(sparse_echelon(rows, key or (lambda k: k)))


def random_rational(rng: random.Random, lo: int = -20, hi: int = 20, nonzero: bool = False) -> Fraction:
    while True:
        v = rng.randint(lo, hi)
        if v or not nonzero:
            return Fraction(v)


class QElem:
    """Element of a finite-dimensional commutative algebra, as its multiplication matrix."""

    __slots__ = ("m",)

    def __init__(self, m: List[List[Fraction]]):
        self.m = m

    @classmethod
    def scalar(cls, c, n: int) -> "QElem":
        c = to_fraction(c)
        return cls([[c if i == j else Fraction(0) for j in range(n)] for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.m)

    def _lift(self, other):
        if isinstance(other, QElem):
            return other
        if isinstance(other, (int, Fraction)):
            return QElem.scalar(other, self.size)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QElem(mat_add(self.m, o.m))

    __radd__ = __add__

    def __neg__(self):
        return QElem([[-x for x in row] for row in self.m])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QElem(mat_sub(self.m, o.m))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QElem(mat_sub(o.m, self.m))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QElem([[x * other for x in row] for row in self.m])
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QElem(mat_mul(self.m, o.m))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(not x for row in self.m for x in row)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return mat_equal(self.m, o.m)

    def inverse(self) -> "QElem":
        try:
            return QElem(mat_inverse(self.m))
        except ZeroDivisionError:
            raise NotAUnit("algebra element is not invertible") from None

    def char_poly(self) -> List[Fraction]:
        return char_poly(self.m)


def is_zero_element(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def invert_element(x):
    if isinstance(x, (int, Fraction)):
        if x == 0:
            raise NotAUnit("zero is not a unit")
        return 1 / Fraction(x)
    return x.inverse()
