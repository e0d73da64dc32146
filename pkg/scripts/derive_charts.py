"""Derive the torus charts shipped in src/mirrorflag/charts.

Independent of the library: uses sympy matrices only.  For each case the
chart is the parameterization

    u_2 = y_{i_1}(z_1) ... y_{i_d}(z_d)   (reduced word of w_P w_0)
    x   = U-part of the LU factorization of wdot^{-1} t u_2
    u_1 = L-part^{-1}

so x = u_1 wdot^{-1} t u_2 with x upper triangular.  Run from the repo root:

    python3 scripts/derive_charts.py
"""

import json
import pathlib
import sys

import sympy as sp

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "mirrorflag" / "charts"

# tag -> (rank, levi subset, reduced word of w_P w_0, representative sign)
CASES = {
    "P1": (1, [], [1], -1),
    "P2": (2, [2], [1, 2], -1),
    "SL3_B": (2, [], [1, 2, 1], -1),
}
ALIASES = {"SL2_B": "P1"}


def sdot(n, i, sign):
    M = sp.eye(n)
    M[i - 1, i - 1] = 0
    M[i, i] = 0
    M[i - 1, i] = sign
    M[i, i - 1] = -sign
    return M


def y(n, i, a):
    M = sp.eye(n)
    M[i, i - 1] = a
    return M


def lu(g):
    n = g.shape[0]
    L = sp.eye(n)
    U = g.copy()
    for c in range(n):
        for r in range(c + 1, n):
            f = sp.cancel(U[r, c] / U[c, c])
            L[r, c] = f
            U[r, :] = (U[r, :] - f * U[c, :]).applyfunc(sp.cancel)
    return L, U


def laurent_terms(expr, gens):
    """[[exponents], "p/q"] list for a Laurent polynomial, or raise."""
    expr = sp.cancel(sp.together(expr))
    num, den = sp.fraction(expr)
    dp = sp.Poly(den, *gens)
    if len(dp.terms()) != 1:
        raise ValueError(f"not a Laurent polynomial: {expr}")
    (dexp, dco), = dp.terms()
    out = []
    for e, c in sp.Poly(num, *gens).terms():
        c = sp.Rational(c) / sp.Rational(dco)
        if c == 0:
            continue
        out.append([[a - b for a, b in zip(e, dexp)], str(c)])
    out.sort()
    return out


def exponent(expr, v):
    num, den = sp.fraction(sp.factor(expr))
    return sp.degree(num, v) - sp.degree(den, v)


def derive(tag):
    rank, levi, word, sign = CASES[tag]
    n = rank + 1
    k = rank - len(levi)
    qidx = [i for i in range(1, n) if i not in levi]
    z = sp.symbols(f"z1:{len(word) + 1}")
    q = sp.symbols(f"q1:{k + 1}")
    gens = list(z) + list(q)

    wd = sp.eye(n)
    for i in word:
        wd = wd * sdot(n, i, sign)
    # t_c = prod of q_i over quantum simple indices >= c, constant on Levi blocks
    t = [sp.prod([q[a] for a, c0 in enumerate(qidx) if c0 >= c]) for c in range(1, n + 1)]
    u2 = sp.eye(n)
    for m, i in enumerate(word):
        u2 = u2 * y(n, i, z[m])
    L, x = lu(wd.inv() * sp.diag(*t) * u2)
    u1 = L.inv().applyfunc(sp.cancel)
    assert (u1 * wd.inv() * sp.diag(*t) * u2 - x).applyfunc(sp.cancel) == sp.zeros(n, n)
    W = sp.cancel(sum(u1[i + 1, i] + u2[i + 1, i] for i in range(n - 1)))

    diag = [sp.factor(x[m, m]) for m in range(n)]
    for d in diag:
        if len(laurent_terms(d, gens)) != 1:
            raise ValueError(f"diagonal entry {d} is not a monomial")
    zexp = [[int(exponent(diag[m], v)) for v in z] for m in range(n)]
    qexp = [[int(exponent(diag[m], v)) for v in q] for m in range(n)]
    # rho-twist gauge monomial prod_j (t_j / x_jj)^(n - j), recorded only
    gauge = sp.prod([(t[j] / diag[j]) ** (n - 1 - j) for j in range(n)])

    def mat(M):
        return [[laurent_terms(M[i, j], gens) for j in range(n)] for i in range(n)]

    return {
        "format": 1,
        "tag": tag,
        "aliases": sorted(a for a, b in ALIASES.items() if b == tag),
        "cartan_type": "A",
        "rank": rank,
        "levi": levi,
        "sign": sign,
        "word": word,
        "z": [str(v) for v in z],
        "q": [str(v) for v in q],
        "t": [laurent_terms(a, gens) for a in t],
        "u1": mat(u1),
        "u2": mat(u2),
        "x": mat(x),
        "W": laurent_terms(W, gens),
        "p_exponents": {"z": zexp, "q": qexp},
        "gauge_monomial": laurent_terms(gauge, gens),
        "frame": "z_j d/dz_j",
        "derivation": "scripts/derive_charts.py (sympy LU of wdot^-1 t u_2)",
    }


def to_algebra(expr, coords, rel_factor, s, allow_neg=()):
    """Write a rational function as a polynomial in ``coords`` and s = 1/rel_factor.

    Denominators may only contain ``rel_factor`` and monomials in ``allow_neg``.
    """
    expr = sp.cancel(sp.together(expr))
    num, den = sp.fraction(expr)
    c, factors = sp.factor_list(den)
    out = num / c
    for f, m in factors:
        if sp.expand(f - rel_factor) == 0:
            out = out * s ** m
        elif sp.expand(f + rel_factor) == 0:
            out = out * (-s) ** m
        elif f in allow_neg:
            out = out / f ** m
        else:
            raise ValueError(f"unexpected denominator factor {f}")
    return sp.expand(out)


def derive_sl3_fiber():
    """Global coordinates on the fiber of X_P over Z(L^vee) for SL_3/B.

    The fiber is {x upper triangular : x13 = 1, x12 x23 - x22 = q2, det x = q1 q2^2},
    parameterized by u = x11 (invertible), a = x12, b = x23 with x22 = ab - q2
    invertible.  The torus chart is the open subset a != 0.
    """
    tag = "SL3_B"
    rank, levi, word, sign = CASES[tag]
    n = rank + 1
    z = sp.symbols("z1:4")
    q = sp.symbols("q1:3")
    u, a, b, s = sp.symbols("u a b s")
    wd = sp.eye(n)
    for i in word:
        wd = wd * sdot(n, i, sign)
    t = [q[0] * q[1], q[1], sp.Integer(1)]
    u2 = sp.eye(n)
    for m, i in enumerate(word):
        u2 = u2 * y(n, i, z[m])
    L, x = lu(wd.inv() * sp.diag(*t) * u2)
    u1 = L.inv().applyfunc(sp.cancel)
    W = sp.cancel(sum(u1[i + 1, i] + u2[i + 1, i] for i in range(n - 1)))
    sol = sp.solve([x[0, 0] - u, x[0, 1] - a, x[1, 2] - b], z, dict=True)
    assert len(sol) == 1
    phi = [sp.cancel(sol[0][v]) for v in z]
    rel = a * b - q[1]
    coords = [u, a, b, s]
    gens = coords + list(q)

    def A(expr, allow=(u,)):
        return laurent_terms(to_algebra(expr, coords, rel, s, tuple(allow) + tuple(q)), gens)

    xg = x.subs(dict(zip(z, phi))).applyfunc(sp.cancel)
    Wg = sp.cancel(W.subs(dict(zip(z, phi))))
    jac = sp.Matrix(3, 3, lambda j, k: sp.diff(sp.log(phi[j]), [u, a, b][k]))
    g = sp.cancel(jac.det())
    sinv = 1 / rel
    return {
        "format": 1,
        "tag": tag,
        "kind": "global",
        "rank": rank,
        "levi": levi,
        "coords": ["u", "a", "b", "s"],
        "invertible": ["u"],
        "weights": {"u": 1, "a": 1, "b": 1, "s": 2},
        "q": [str(v) for v in q],
        "relation": {"lead": [0, 1, 1, 1], "poly": laurent_terms(s * rel - 1, gens)},
        "x": [[A(xg[i, j]) for j in range(n)] for i in range(n)],
        "diag_inv": [A(1 / xg[m, m]) for m in range(n)],
        "W": A(Wg),
        "density": A(g),
        "density_inv": A(1 / g),
        "partials": {
            "u": {"u": A(1)},
            "a": {"a": A(1), "s": A(sp.diff(sinv, a))},
            "b": {"b": A(1), "s": A(sp.diff(sinv, b))},
        },
        "frame": [["u", True], ["a", False], ["b", False]],
        "q_action": [{"s": A(qi * sp.diff(sinv, qi))} for qi in q],
        "torus_images": [A(p, (u, a)) for p in phi],
        "torus_inverse_images": [A(1 / p, (u, a)) for p in phi],
        "torus_localize": ["a"],
        "derivation": "scripts/derive_charts.py (solve x11 = u, x12 = a, x23 = b on the torus chart)",
    }


def main(argv):
    OUT.mkdir(parents=True, exist_ok=True)
    rec = derive_sl3_fiber()
    (OUT / "SL3_B_fiber.json").write_text(json.dumps(rec, indent=1, sort_keys=True) + "\n")
    print("SL3_B global fiber -> SL3_B_fiber.json")
    for tag in CASES:
        rec = derive(tag)
        path = OUT / f"{tag}.json"
        path.write_text(json.dumps(rec, indent=1, sort_keys=True) + "\n")
        print(tag, "W =", sp.expand(sum(sp.Rational(c) * sp.prod(
            [v ** a for v, a in zip(sp.symbols(rec["z"] + rec["q"]), e)]) for e, c in rec["W"])), "->", path.name)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
