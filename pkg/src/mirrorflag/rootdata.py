"""Root systems, Weyl groups and parabolic combinatorics in type A_r (r <= 4).

Weights are stored in the basis of fundamental weights, so a weight is the
vector of its pairings with the simple coroots; coweights are stored in the
basis of simple coroots.  Weyl group elements carry a permutation of
{1..r+1} (one-line notation) and their lex-least reduced word.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from typing import FrozenSet, Iterable, Sequence, Tuple

MAX_RANK = 4


class Unsupported(ValueError):
    """Raised for root systems outside type A_1..A_4."""


def _check_supported(cartan_type: str, rank: int) -> None:
    if cartan_type != "A" or not isinstance(rank, int) or not 1 <= rank <= MAX_RANK:
        raise Unsupported(f"unsupported root system {cartan_type}{rank}: only A1..A{MAX_RANK}")


@dataclass(frozen=True)
class WeylElement:
    perm: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.perm)

    @cached_property
    def word(self) -> Tuple[int, ...]:
        """Lex-least reduced word (greedy on left descents)."""
        w = list(self.perm)
        out = []
        while True:
            inv = [0] * len(w)
            for pos, val in enumerate(w):
                inv[val - 1] = pos
            for i in range(1, len(w)):
                if inv[i - 1] > inv[i]:  # left descent s_i
                    out.append(i)
                    a, b = inv[i - 1], inv[i]
                    w[a], w[b] = w[b], w[a]
                    break
            else:
                return tuple(out)

    @property
    def length(self) -> int:
        p = self.perm
        return sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(tuple(self.perm[j - 1] for j in other.perm))

    def inverse(self) -> "WeylElement":
        inv = [0] * self.n
        for pos, val in enumerate(self.perm):
            inv[val - 1] = pos + 1
        return WeylElement(tuple(inv))

    def is_identity(self) -> bool:
        return all(v == i + 1 for i, v in enumerate(self.perm))

    def right_descent(self, i: int) -> bool:
        return self.perm[i - 1] > self.perm[i]

    def act_eps(self, mu: Sequence) -> list:
        """Action on a vector written in the epsilon basis: w(eps_j) = eps_{w(j)}."""
        out = [None] * self.n
        for j, v in enumerate(self.perm):
            out[v - 1] = mu[j]
        return out

    def act_weight(self, lam: Sequence[int]) -> Tuple:
        """Action on a weight in fundamental-weight coordinates."""
        return eps_to_weight(self.act_eps(weight_to_eps(lam)))

    def __str__(self) -> str:
        return "e" if not self.word else "s" + ".s".join(map(str, self.word))

    def __lt__(self, other: "WeylElement") -> bool:
        return (self.length, self.word) < (other.length, other.word)


def simple_reflection(n: int, i: int) -> WeylElement:
    p = list(range(1, n + 1))
    p[i - 1], p[i] = p[i], p[i - 1]
    return WeylElement(tuple(p))


def from_word(n: int, word: Iterable[int]) -> WeylElement:
    w = WeylElement(tuple(range(1, n + 1)))
    for i in word:
        w = w * simple_reflection(n, i)
    return w


def weight_to_eps(lam: Sequence) -> list:
    """sum lam_i omega_i with omega_i = eps_1 + ... + eps_i."""
    r = len(lam)
    return [sum(lam[j:]) for j in range(r + 1)]


def eps_to_weight(mu: Sequence) -> Tuple:
    return tuple(mu[i] - mu[i + 1] for i in range(len(mu) - 1))


@dataclass(frozen=True)
class Root:
    """Positive root eps_a - eps_b (1-based, a < b) of type A."""

    a: int
    b: int
    rank: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        """Coordinates in simple roots; equal to the coroot in simple coroots."""
        return tuple(1 if self.a <= j < self.b else 0 for j in range(1, self.rank + 1))

    @property
    def weight(self) -> Tuple[int, ...]:
        """Coordinates in fundamental weights (pairings with simple coroots)."""
        mu = [0] * (self.rank + 1)
        mu[self.a - 1] = 1
        mu[self.b - 1] = -1
        return eps_to_weight(mu)

    @property
    def support(self) -> range:
        return range(self.a, self.b)

    def __str__(self) -> str:
        terms = [f"a{j}" for j in self.support]
        return "+".join(terms)


@dataclass(frozen=True)
class RootSystemData:
    cartan_type: str
    rank: int

    @property
    def n(self) -> int:
        return self.rank + 1

    @cached_property
    def cartan_matrix(self) -> Tuple[Tuple[int, ...], ...]:
        r = self.rank
        return tuple(tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r)) for i in range(r))

    @cached_property
    def simple_roots(self) -> Tuple[Tuple[int, ...], ...]:
        return self.cartan_matrix  # row i = pairings <alpha_i, alpha_j^vee>

    @cached_property
    def simple_coroots(self) -> Tuple[Tuple[int, ...], ...]:
        r = self.rank
        return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))

    @cached_property
    def fundamental_weights(self) -> Tuple[Tuple[Fraction, ...], ...]:
        r = self.rank
        return tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r))

    @cached_property
    def positive_roots(self) -> Tuple[Root, ...]:
        n = self.n
        roots = [Root(a, b, self.rank) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
        return tuple(sorted(roots, key=lambda R: (R.b - R.a, R.a)))

    @cached_property
    def coroot_length_squared(self) -> Tuple[int, ...]:
        return (1,) * self.rank

    @staticmethod
    def pairing(weight: Sequence, coweight: Sequence):
        return sum(w * c for w, c in zip(weight, coweight))

    @cached_property
    def rho(self) -> Tuple[Fraction, ...]:
        tot = [Fraction(0)] * self.rank
        for R in self.positive_roots:
            tot = [t + x for t, x in zip(tot, R.weight)]
        return tuple(t / 2 for t in tot)

    @cached_property
    def rho_vee(self) -> Tuple[Fraction, ...]:
        tot = [Fraction(0)] * self.rank
        for R in self.positive_roots:
            tot = [t + x for t, x in zip(tot, R.coeffs)]
        return tuple(t / 2 for t in tot)

    # Weyl group
    @cached_property
    def weyl_elements(self) -> Tuple[WeylElement, ...]:
        els = [WeylElement(p) for p in permutations(range(1, self.n + 1))]
        return tuple(sorted(els))

    @cached_property
    def identity(self) -> WeylElement:
        return WeylElement(tuple(range(1, self.n + 1)))

    @cached_property
    def longest_element(self) -> WeylElement:
        return WeylElement(tuple(range(self.n, 0, -1)))

    def s(self, i: int) -> WeylElement:
        if not 1 <= i <= self.rank:
            raise IndexError(f"simple reflection index {i} out of range")
        return simple_reflection(self.n, i)

    def from_word(self, word: Iterable[int]) -> WeylElement:
        return from_word(self.n, word)

    def inversion_count(self, w: WeylElement) -> int:
        """Number of positive roots sent negative by w."""
        count = 0
        for R in self.positive_roots:
            if w.perm[R.a - 1] > w.perm[R.b - 1]:
                count += 1
        return count


def build_root_system(cartan_type: str, rank: int) -> RootSystemData:
    _check_supported(cartan_type, rank)
    return RootSystemData(cartan_type, rank)


@dataclass(frozen=True)
class ParabolicData:
    rs: RootSystemData
    levi_subset: FrozenSet[int]

    @property
    def rank(self) -> int:
        return self.rs.rank

    @property
    def n(self) -> int:
        return self.rs.n

    @cached_property
    def q_simple_indices(self) -> Tuple[int, ...]:
        """Simple-root indices outside the Levi subset, in increasing order."""
        return tuple(j for j in range(1, self.rank + 1) if j not in self.levi_subset)

    @property
    def k(self) -> int:
        return len(self.q_simple_indices)

    def simple_index(self, i: int) -> int:
        if not 1 <= i <= self.k:
            raise IndexError(f"q-index {i} out of range 1..{self.k}")
        return self.q_simple_indices[i - 1]

    @cached_property
    def blocks(self) -> Tuple[Tuple[int, ...], ...]:
        """Position blocks permuted by W_P (1-based)."""
        out, cur = [], [1]
        for j in range(1, self.n):
            if j in self.levi_subset:
                cur.append(j + 1)
            else:
                out.append(tuple(cur))
                cur = [j + 1]
        out.append(tuple(cur))
        return tuple(out)

    @cached_property
    def levi_roots(self) -> Tuple[Root, ...]:
        return tuple(R for R in self.rs.positive_roots if all(j in self.levi_subset for j in R.support))

    @cached_property
    def nonlevi_roots(self) -> Tuple[Root, ...]:
        return tuple(R for R in self.rs.positive_roots if R not in self.levi_roots)

    @cached_property
    def W_P(self) -> Tuple[WeylElement, ...]:
        return tuple(w for w in self.rs.weyl_elements if all(
            sorted(w.perm[p - 1] for p in blk) == list(blk) for blk in self.blocks))

    @cached_property
    def w_P(self) -> WeylElement:
        return max(self.W_P, key=lambda w: w.length)

    @cached_property
    def minimal_reps(self) -> Tuple[WeylElement, ...]:
        return tuple(w for w in self.rs.weyl_elements if not any(w.right_descent(j) for j in self.levi_subset))

    def project(self, w: WeylElement) -> WeylElement:
        """Minimal-length representative of w W_P."""
        p = list(w.perm)
        for blk in self.blocks:
            vals = sorted(p[i - 1] for i in blk)
            for i, v in zip(blk, vals):
                p[i - 1] = v
        return WeylElement(tuple(p))

    @cached_property
    def w_P_w_0(self) -> WeylElement:
        return self.w_P * self.rs.longest_element

    @cached_property
    def coroot_lattice_generators(self) -> Tuple[Tuple[int, ...], ...]:
        """Generators of Q^vee_P (simple coroots of the Levi)."""
        return tuple(self.rs.simple_coroots[j - 1] for j in sorted(self.levi_subset))

    def in_levi_coroot_lattice(self, coweight: Sequence[int]) -> bool:
        return all(c == 0 for j, c in enumerate(coweight, start=1) if j not in self.levi_subset)

    def rho_gp_pairing(self, coweight: Sequence) -> int:
        """sum over beta in R^+ minus R_P^+ of beta(coweight)."""
        return sum(self.rs.pairing(R.weight, coweight) for R in self.nonlevi_roots)

    def q_exponents(self, coweight: Sequence[int]) -> Tuple[int, ...]:
        """Class of a coroot in Q^vee / Q^vee_P, as exponents of q_1..q_k."""
        return tuple(coweight[j - 1] for j in self.q_simple_indices)


def parabolic_data(rs: RootSystemData, levi_subset: Iterable[int]) -> ParabolicData:
    levi = frozenset(levi_subset)
    bad = [j for j in levi if not (isinstance(j, int) and 1 <= j <= rs.rank)]
    if bad:
        raise IndexError(f"Levi indices {sorted(bad)} outside 1..{rs.rank}")
    return ParabolicData(rs, levi)


def quantum_degree(pd: ParabolicData, i: int) -> int:
    """deg q_i = 2 * sum_{beta in R^+ - R_P^+} beta(alpha_{j}^vee), j the i-th non-Levi index."""
    j = pd.simple_index(i)
    return 2 * pd.rho_gp_pairing(pd.rs.simple_coroots[j - 1])


def first_chern_coefficients(pd: ParabolicData) -> Tuple[int, ...]:
    """c_1(G/P) = sum_i d_i sigma_{s_i}; d_i = deg q_i / 2."""
    return tuple(quantum_degree(pd, i) // 2 for i in range(1, pd.k + 1))


def parse_levi(text: str) -> FrozenSet[int]:
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise ValueError(f"bad Levi subset {text!r}") from exc


def case_label(pd: ParabolicData) -> str:
    levi = ",".join(map(str, sorted(pd.levi_subset)))
    return f"A{pd.rank}[{levi}]"
