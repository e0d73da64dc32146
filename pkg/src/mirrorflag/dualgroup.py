"""B-side group theory for G^vee = PGL_n, n = r + 1.

PGL is realized through GL lifts; every exposed function is invariant under
scaling by the center.  The invariant bilinear form is the trace form, the
principal nilpotent ``e`` is the superdiagonal of ones, and

    chi(y) = tr(e y),   so   e^chi(u) = sum_i u[i+1][i]

for lower unitriangular u.  A point of the LG model is an upper triangular
x = u_1 wdot^{-1} t u_2 with u_1, u_2 lower unitriangular, t in Z(L^vee) and
wdot a representative of w_P w_0.  The superpotential is
W(x) = e^chi(u_1) + e^chi(u_2).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple

from .rootdata import ParabolicData, WeylElement, case_label
from .symalg import NotAUnit, invert_element, is_zero_element, mat_mul, to_fraction

CONVENTIONS = {
    +1: "s_i = exp(e_i) exp(-f_i) exp(e_i)",
    -1: "s_i = exp(-e_i) exp(f_i) exp(-e_i)",
}


class NotInStratum(ValueError):
    """The matrix does not lie in the open stratum X_P."""


class SelfTestFailure(RuntimeError):
    pass


# --------------------------------------------------------------------------
# small matrix helpers


def identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def simple_rep(n: int, i: int, sign: int) -> List[List[int]]:
    """Representative of s_i: block [[0, s], [-s, 0]] in rows/cols i, i+1."""
    M = identity(n)
    M[i - 1][i - 1] = 0
    M[i][i] = 0
    M[i - 1][i] = sign
    M[i][i - 1] = -sign
    return M


def tits_lift(n: int, word: Sequence[int], sign: int) -> List[List[int]]:
    M = identity(n)
    for i in word:
        M = mat_mul(M, simple_rep(n, i, sign))
    return M


def signed_perm_inverse(M: List[List[int]]) -> List[List[int]]:
    return [list(r) for r in zip(*M)]  # orthogonal


def principal_nilpotent(n: int) -> List[List[int]]:
    return [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)]


def chi(y) -> object:
    """chi(y) = tr(e y) = sum_i y[i+1][i]."""
    n = len(y)
    acc = y[1][0] if n > 1 else 0
    for i in range(1, n - 1):
        acc = acc + y[i + 1][i]
    return acc


def y_elem(n: int, i: int, a, one=1, zero=0):
    """y_i(a) = I + a E_{i+1,i}."""
    M = [[one if r == c else zero for c in range(n)] for r in range(n)]
    M[i][i - 1] = a
    return M


def minor(x, rows: Sequence[int], cols: Sequence[int]):
    """Determinant of a square submatrix (0-based indices), Laplace expansion."""
    if not rows:
        return 1
    if len(rows) == 1:
        return x[rows[0]][cols[0]]
    r0, rest = rows[0], rows[1:]
    acc = None
    for k, c in enumerate(cols):
        a = x[r0][c]
        if is_zero_element(a):
            continue
        sub = minor(x, rest, cols[:k] + cols[k + 1:])
        term = a * sub if k % 2 == 0 else -(a * sub)
        acc = term if acc is None else acc + term
    if acc is None:
        return x[r0][cols[0]] * 0
    return acc


def is_upper_triangular(x) -> bool:
    return all(is_zero_element(x[i][j]) for i in range(len(x)) for j in range(i))


def is_lower_unitriangular(u) -> bool:
    n = len(u)
    for i in range(n):
        for j in range(i, n):
            v = u[i][j]
            if i == j:
                if not (v == 1):
                    return False
            elif not is_zero_element(v):
                return False
    return True


def udl(M, inv: Callable = invert_element):
    """Factor M = N * D * L with N upper unitriangular, D diagonal, L lower unitriangular.

    Eliminates from the bottom-right corner; the pivots are ratios of trailing
    principal minors and must be invertible.
    """
    n = len(M)
    A = [list(row) for row in M]
    sample = A[0][0]
    one = sample * 0 + 1
    zero = sample * 0
    N = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n - 1, -1, -1):
        p = A[c][c]
        try:
            pinv = inv(p)
        except (NotAUnit, ZeroDivisionError) as exc:
            raise NotInStratum(f"trailing pivot {c + 1} is not invertible") from exc
        for r in range(c):
            if is_zero_element(A[r][c]):
                continue
            f = A[r][c] * pinv
            N[r][c] = f
            A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    D = [A[i][i] for i in range(n)]
    L = [[zero] * n for _ in range(n)]
    for i in range(n):
        dinv = inv(D[i])
        for j in range(i + 1):
            L[i][j] = one if i == j else A[i][j] * dinv
    return N, D, L


def lu_lower_upper(g, inv: Callable = invert_element):
    """Factor g = L * U with L lower unitriangular and U upper triangular."""
    n = len(g)
    A = [list(row) for row in g]
    sample = A[0][0]
    one = sample * 0 + 1
    zero = sample * 0
    L = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for c in range(n):
        try:
            pinv = inv(A[c][c])
        except (NotAUnit, ZeroDivisionError) as exc:
            raise NotInStratum(f"leading pivot {c + 1} is not invertible") from exc
        for r in range(c + 1, n):
            if is_zero_element(A[r][c]):
                continue
            f = A[r][c] * pinv
            L[r][c] = f
            A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return L, A


def lower_uni_inverse(L):
    n = len(L)
    sample = L[0][0]
    one = sample * 0 + 1
    zero = sample * 0
    X = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            acc = zero
            for k in range(j, i):
                if not is_zero_element(L[i][k]):
                    acc = acc + L[i][k] * X[k][j]
            X[i][j] = -acc
    return X


def diag_matrix(d, zero=0):
    n = len(d)
    return [[d[i] if i == j else d[i] * 0 for j in range(n)] for i in range(n)]


# --------------------------------------------------------------------------
# the model


@dataclass
class Factorization:
    u1: list
    t: list
    u2: list


@dataclass
class DualGroupModel:
    pd: ParabolicData
    sign: int
    wdot: List[List[int]]        # lift of w_P w_0
    wdot_inv: List[List[int]]
    w0dot: List[List[int]]
    wPdot: List[List[int]]
    e: List[List[int]]
    self_test: List[dict] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.pd.n

    @property
    def w(self) -> WeylElement:
        return self.pd.w_P_w_0

    @property
    def convention(self) -> str:
        return CONVENTIONS[self.sign]

    def I_w(self, j: int) -> Tuple[int, ...]:
        """Columns (0-based) of the extremal weight vector of weight w(omega_j)."""
        return tuple(sorted(self.w.perm[r] - 1 for r in range(j)))

    def gauge_positions(self) -> List[Tuple[int, int]]:
        """Pattern of U_- cap wdot^{-1} U_- wdot (0-based (row, col))."""
        p = self.w.perm
        return [(r, c) for r in range(self.n) for c in range(r) if p[r] > p[c]]

    def canonical_positions(self) -> List[Tuple[int, int]]:
        """Pattern of U_- cap wdot^{-1} U wdot, where the canonical u_1 lives."""
        p = self.w.perm
        return [(r, c) for r in range(self.n) for c in range(r) if p[r] < p[c]]


def _model(pd: ParabolicData, sign: int) -> DualGroupModel:
    n = pd.n
    w = pd.w_P_w_0
    wd = tits_lift(n, w.word, sign)
    return DualGroupModel(
        pd=pd, sign=sign, wdot=wd, wdot_inv=signed_perm_inverse(wd),
        w0dot=tits_lift(n, pd.rs.longest_element.word, sign),
        wPdot=tits_lift(n, pd.w_P.word, sign),
        e=principal_nilpotent(n))


def build_dual_group(pd: ParabolicData, conventions: Sequence[int] = (+1, -1), samples: int = 8,
                     seed: int = 0) -> DualGroupModel:
    """Build the matrix model, choosing the first representative convention that
    passes the minor identity and gauge invariance self-tests."""
    diagnostics = []
    for sign in conventions:
        model = _model(pd, sign)
        records = run_self_test(model, samples, seed)
        diagnostics.append((CONVENTIONS[sign], records))
        if all(r["pass"] for r in records):
            model.self_test = records
            return model
    raise SelfTestFailure(f"no representative convention passed on {case_label(pd)}: {diagnostics}")


# --------------------------------------------------------------------------
# Z(L^vee) and the mirror map


@dataclass
class MirrorMap:
    """q_i = alpha_{c_i}^vee(t) in the block coordinates tau_1..tau_k of Z(L^vee).

    The GL lift is normalized so the last block of t is 1; then
    q_i = tau_i / tau_{i+1} (tau_{k+1} = 1), a unimodular exponent matrix.
    """

    pd: ParabolicData
    exponent_matrix: List[List[int]]
    inverse_matrix: List[List[int]]

    def q_from_tau(self, tau: Sequence) -> List:
        out = []
        for row in self.exponent_matrix:
            acc = 1
            for a, x in zip(row, tau):
                if a:
                    acc = acc * (x ** a if a > 0 else invert_element(x) ** (-a))
            out.append(acc)
        return out

    def tau_from_q(self, q: Sequence) -> List:
        out = []
        for row in self.inverse_matrix:
            acc = 1
            for a, x in zip(row, q):
                if a:
                    acc = acc * (x ** a if a > 0 else invert_element(x) ** (-a))
            out.append(acc)
        return out

    def determinant(self) -> int:
        from .symalg import det
        return int(det([[Fraction(a) for a in row] for row in self.exponent_matrix]))

    def coweight_view(self) -> List[List[int]]:
        """alpha_{c_i}^vee restricted to Z(L^vee), in fundamental-coweight coordinates.

        For P = B this is the Cartan matrix; it is not unimodular, which is why
        the block coordinates above are the ones used for the isomorphism.
        """
        C = self.pd.rs.cartan_matrix
        idx = self.pd.q_simple_indices
        return [[C[a - 1][b - 1] for b in idx] for a in idx]


def mirror_map(pd: ParabolicData) -> MirrorMap:
    k = pd.k
    E = [[1 if i == j else (-1 if j == i + 1 else 0) for j in range(k)] for i in range(k)]
    Einv = [[1 if j >= i else 0 for j in range(k)] for i in range(k)]
    return MirrorMap(pd, E, Einv)


def t_from_q(pd: ParabolicData, q: Sequence, one=1) -> List:
    """GL lift of the point of Z(L^vee) with coordinates q (last block = 1)."""
    tau = mirror_map(pd).tau_from_q(q) + [one]
    out = []
    for b, blk in enumerate(pd.blocks):
        for _ in blk:
            out.append(tau[b] * one if not isinstance(tau[b], int) else one * tau[b])
    return out


def q_from_t(pd: ParabolicData, t: Sequence) -> List:
    return [t[c - 1] * invert_element(t[c]) for c in pd.q_simple_indices]


def in_center_of_levi(pd: ParabolicData, t: Sequence) -> bool:
    return all(t[j - 1] == t[j] for j in pd.levi_subset)


# --------------------------------------------------------------------------
# factorization and superpotential


def bruhat_factorize(model: DualGroupModel, x, inv: Callable = invert_element) -> Factorization:
    """Canonical x = u_1 wdot^{-1} t u_2 with u_1 in U_- cap wdot^{-1} U wdot."""
    if not is_upper_triangular(x):
        raise NotInStratum("x is not upper triangular")
    M = mat_mul(model.wdot, x)
    N, D, L = udl(M, inv)
    u1 = mat_mul(mat_mul(model.wdot_inv, N), model.wdot)
    if not is_lower_unitriangular(u1):
        raise NotInStratum("u_1 is not lower unitriangular")
    if not in_center_of_levi(model.pd, D):
        raise NotInStratum("t is not in Z(L^vee)")
    return Factorization(u1, D, L)


def recompose(model: DualGroupModel, f: Factorization):
    return mat_mul(mat_mul(mat_mul(f.u1, model.wdot_inv), diag_matrix(f.t)), f.u2)


def superpotential_from(f: Factorization):
    return chi(f.u1) + chi(f.u2)


def superpotential(model: DualGroupModel, x, inv: Callable = invert_element):
    return superpotential_from(bruhat_factorize(model, x, inv))


def lg_q(model: DualGroupModel, x, inv: Callable = invert_element) -> List:
    """pi(x) in q-coordinates (center invariant)."""
    f = bruhat_factorize(model, x, inv)
    return q_from_t(model.pd, f.t)


def p_map(x) -> List:
    """p(x): the torus part of x = u_0 t_0, i.e. the diagonal."""
    return [x[i][i] for i in range(len(x))]


def gauge_move(model: DualGroupModel, f: Factorization, m) -> Factorization:
    """(u_1, t, u_2) -> (u_1 m, t, (wdot^{-1} t)^{-1} m^{-1} (wdot^{-1} t) u_2)."""
    g = mat_mul(model.wdot_inv, diag_matrix(f.t))
    ginv = mat_mul(diag_matrix([invert_element(a) for a in f.t]), model.wdot)
    minv = lower_uni_inverse(m)
    u2 = mat_mul(mat_mul(mat_mul(ginv, minv), g), f.u2)
    return Factorization(mat_mul(f.u1, m), f.t, u2)


def random_gauge(model: DualGroupModel, rng: random.Random, bound: int = 9) -> List[List[Fraction]]:
    n = model.n
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for r, c in model.gauge_positions():
        m[r][c] = Fraction(rng.randint(-bound, bound))
    return m


def random_stratum_point(model: DualGroupModel, rng: random.Random, bound: int = 9,
                         q: Optional[Sequence] = None) -> Tuple[List[List[Fraction]], Factorization]:
    """A point of X_P together with a (generally non-canonical) factorization."""
    n = model.n
    pd = model.pd
    while True:
        qv = [to_fraction(v) for v in q] if q is not None else [
            Fraction(rng.choice([a for a in range(-bound, bound + 1) if a])) for _ in range(pd.k)]
        scale = Fraction(rng.choice([a for a in range(-bound, bound + 1) if a]))
        t = [scale * a for a in t_from_q(pd, qv, Fraction(1))]
        u2 = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i):
                u2[i][j] = Fraction(rng.randint(-bound, bound))
        g = mat_mul(mat_mul(model.wdot_inv, diag_matrix(t)), u2)
        try:
            L, U = lu_lower_upper(g)
        except NotInStratum:
            continue
        return U, Factorization(lower_uni_inverse(L), t, u2)


# --------------------------------------------------------------------------
# generalized minors


def v_e(j: int) -> Tuple[int, ...]:
    return tuple(range(j))


def generalized_minor(model: DualGroupModel, lam, v, x):
    """f_{lambda, v}(x) for type A.

    ``lam`` is either an int j (the fundamental coweight varpi_j, realized on the
    j-th exterior power) with ``v`` a j-subset of column indices, or a tuple of
    multiplicities (a_1..a_r) with ``v`` a sequence of subsets, one per factor in
    the order varpi_1^{a_1} ... varpi_r^{a_r}.  Rows are always the highest
    weight vector e_1 ^ ... ^ e_j, so f_{lambda, v_e} = 1 on U_-.
    """
    if isinstance(lam, int):
        j = lam
        cols = tuple(v)
        if not 1 <= j <= model.n or len(cols) != j or len(set(cols)) != j or not all(0 <= c < model.n for c in cols):
            raise ValueError(f"invalid index data ({lam}, {v})")
        return minor(x, list(range(j)), list(sorted(cols)))
    factors = [j for j, a in enumerate(lam, start=1) for _ in range(a)]
    if len(factors) != len(v):
        raise ValueError("one column set per fundamental factor is required")
    acc = 1
    for j, cols in zip(factors, v):
        acc = generalized_minor(model, j, cols, x) * acc
    return acc


def gale_le(I: Sequence[int], J: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(sorted(I), sorted(J)))


def t_character(t: Sequence, cols: Sequence[int]):
    acc = 1
    for c in cols:
        acc = t[c] * acc
    return acc


def minor_equations(model: DualGroupModel, x, t) -> List[Tuple[str, object]]:
    """Residuals of the stratum equations: the extremal minors equal the
    t-characters and the minors of lower weight vanish."""
    out = []
    for j in range(1, model.n + 1):
        Iw = model.I_w(j)
        for I in combinations(range(model.n), j):
            val = generalized_minor(model, j, I, x)
            if I == Iw:
                out.append((f"f[{j},{I}]-t", val - t_character(t, I)))
            elif not gale_le(I, Iw):
                out.append((f"f[{j},{I}]", val))
    return out


def run_self_test(model: DualGroupModel, samples: int = 8, seed: int = 0) -> List[dict]:
    rng = random.Random(seed)
    ok_a, ok_b, bad = True, True, []
    for _ in range(samples):
        x, f = random_stratum_point(model, rng)
        for name, r in minor_equations(model, x, f.t):
            if r != 0:
                ok_a = False
                bad.append(name)
        W0 = superpotential_from(f)
        try:
            fc = bruhat_factorize(model, x)
        except NotInStratum as exc:
            ok_b = False
            bad.append(str(exc))
            continue
        if superpotential_from(fc) != W0:
            ok_b = False
        g = gauge_move(model, f, random_gauge(model, rng))
        if superpotential_from(g) != W0 or recompose(model, g) != x:
            ok_b = False
    return [
        {"id": "selftest.extremal_minor", "pass": ok_a, "detail": bad[:3]},
        {"id": "selftest.gauge_invariance", "pass": ok_b, "detail": None},
    ]
