"""
Dense GF(2) linear algebra: ranks, kernels, inverses, companion matrices,
and similarity classification via the rational canonical (Frobenius) form.

Matrices are numpy uint8 arrays with entries in {0, 1}; all arithmetic is
mod 2 (XOR row operations).  Polynomials over GF(2) are tuples of bits,
lowest degree first, with no trailing zeros.
"""

from __future__ import annotations

import numpy as np

# ---------------------------------------------------------------------------
# matrices


def mat(rows) -> np.ndarray:
    """Build a uint8 GF(2) matrix from nested lists (entries taken mod 2)."""
    return (np.asarray(rows, dtype=np.uint8) % 2).astype(np.uint8)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=np.uint8)


def row_echelon(M: np.ndarray, n_pivot_cols: int | None = None):
    """Row-reduce a binary matrix over GF(2).

    Gaussian elimination with first-nonzero pivoting (deterministic).
    Returns (R, pivot_cols); row operations apply to the full row width, so
    augmented columns may ride along.
    """
    R = (np.asarray(M, dtype=np.uint8) % 2).copy()
    m, n = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = n

    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n_pivot_cols):
        found = -1
        for row in range(pivot_row, m):
            if R[row, col]:
                found = row
                break
        if found == -1:
            continue
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        for row in range(m):
            if row != pivot_row and R[row, col]:
                R[row] ^= R[pivot_row]
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def rank(M: np.ndarray) -> int:
    M = np.asarray(M, dtype=np.uint8)
    if M.size == 0:
        return 0
    return len(row_echelon(M)[1])


def kernel_dim(M: np.ndarray) -> int:
    M = np.asarray(M, dtype=np.uint8)
    return M.shape[1] - rank(M)


def invert(M: np.ndarray) -> np.ndarray | None:
    """Two-sided inverse over GF(2), or None if singular.

    Raises ValueError on non-square input.
    """
    M = np.asarray(M, dtype=np.uint8)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"invert: non-square shape {M.shape}")
    n = M.shape[0]
    if n == 0:
        return zeros(0, 0)
    aug = np.concatenate([M % 2, identity(n)], axis=1)
    R, pivots = row_echelon(aug, n_pivot_cols=n)
    if len(pivots) < n:
        return None
    return R[:, n:].copy()


def mul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return (np.asarray(A, dtype=np.uint8).astype(np.int64)
            @ np.asarray(B, dtype=np.uint8).astype(np.int64) % 2).astype(np.uint8)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return (np.kron(A.astype(np.int64), B.astype(np.int64)) % 2).astype(np.uint8)


def solve(M: np.ndarray, v: np.ndarray) -> np.ndarray | None:
    """One solution x of M x = v over GF(2), or None if inconsistent."""
    M = np.asarray(M, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8).reshape(-1, 1)
    m, n = M.shape
    R, pivots = row_echelon(np.concatenate([M, v], axis=1), n_pivot_cols=n)
    # inconsistent iff a zero row of the coefficient part has rhs 1
    for row in range(m):
        if not R[row, :n].any() and R[row, n]:
            return None
    x = np.zeros(n, dtype=np.uint8)
    for r, c in enumerate(pivots):
        x[c] = R[r, n]
    return x


# ---------------------------------------------------------------------------
# polynomials (bit tuples, lowest degree first)


def poly(coeffs) -> tuple[int, ...]:
    c = [int(x) % 2 for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


P_ZERO: tuple[int, ...] = ()
P_ONE: tuple[int, ...] = (1,)


def poly_deg(f) -> int:
    return len(f) - 1  # -1 for the zero polynomial


def poly_add(f, g):
    n = max(len(f), len(g))
    return poly([(f[i] if i < len(f) else 0) ^ (g[i] if i < len(g) else 0)
                 for i in range(n)])


def poly_mul(f, g):
    if not f or not g:
        return P_ZERO
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] ^= b
    return poly(out)


def poly_divmod(f, g):
    if not g:
        raise ZeroDivisionError("poly division by zero")
    r = list(f)
    q = [0] * max(len(f) - len(g) + 1, 1)
    dg = len(g) - 1
    while len(r) - 1 >= dg and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < dg:
            break
        shift = len(r) - 1 - dg
        q[shift] ^= 1
        for i, b in enumerate(g):
            r[i + shift] ^= b
    return poly(q), poly(r)


def poly_mod(f, g):
    return poly_divmod(f, g)[1]


def poly_gcd(f, g):
    a, b = poly(f), poly(g)
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_pow_mod(f, e: int, m):
    result = P_ONE
    base = poly_mod(f, m)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base), m)
        base = poly_mod(poly_mul(base, base), m)
        e >>= 1
    return result


def poly_to_str(f) -> str:
    if not f:
        return "0"
    terms = []
    for i in range(len(f) - 1, -1, -1):
        if f[i]:
            terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
    return "+".join(terms)


def poly_eval_matrix(f, X: np.ndarray) -> np.ndarray:
    """f(X) over GF(2), Horner evaluation."""
    n = X.shape[0]
    out = zeros(n, n)
    for c in reversed(f):
        out = mul(out, X)
        if c:
            out ^= identity(n)
    return out


def _monic_polys(deg: int):
    for bits in range(1 << deg):
        yield poly([(bits >> i) & 1 for i in range(deg)] + [1])


_IRR_CACHE: dict[int, list[tuple[int, ...]]] = {}


def irreducibles(deg: int) -> list[tuple[int, ...]]:
    """All monic irreducible polynomials over GF(2) of the given degree."""
    if deg in _IRR_CACHE:
        return _IRR_CACHE[deg]
    out = []
    for f in _monic_polys(deg):
        if deg == 1:
            out.append(f)  # x and x+1
            continue
        if f[0] == 0:  # divisible by x
            continue
        if sum(f) % 2 == 0:  # divisible by x+1
            continue
        ok = True
        for d in range(2, deg // 2 + 1):
            for g in irreducibles(d):
                if not poly_mod(f, g):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(f)
    _IRR_CACHE[deg] = out
    return out


def poly_factor(f) -> list[tuple[tuple[int, ...], int]]:
    """Factor a nonzero polynomial into (irreducible, multiplicity) pairs."""
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    rem = poly(f)
    out: list[tuple[tuple[int, ...], int]] = []
    d = 1
    while poly_deg(rem) > 0:
        if d > poly_deg(rem):
            break
        hit = False
        for g in irreducibles(d):
            mult = 0
            while True:
                q, r = poly_divmod(rem, g)
                if r:
                    break
                rem = q
                mult += 1
            if mult:
                out.append((g, mult))
                hit = True
        if poly_deg(rem) == 0:
            break
        d += 1
        if not hit:
            continue
    return sorted(out)


# ---------------------------------------------------------------------------
# companion matrices and Frobenius normal form


def companion(f) -> np.ndarray:
    """Companion matrix of a monic polynomial of degree >= 1.

    Layout: subdiagonal ones, last column the low coefficients of f.
    Invertible iff f(0) = 1.
    """
    f = poly(f)
    d = poly_deg(f)
    if d < 1:
        raise ValueError("companion: degree must be >= 1")
    if f[-1] != 1:
        raise ValueError("companion: polynomial must be monic")
    X = zeros(d, d)
    for i in range(1, d):
        X[i, i - 1] = 1
    for i in range(d):
        X[i, d - 1] = f[i]
    return X


def _smith_char_matrix(A: np.ndarray) -> list[tuple[int, ...]]:
    """Diagonal of the Smith normal form of xI - A over GF(2)[x]."""
    n = A.shape[0]
    # M[i][j] is a polynomial
    M = [[poly([A[i, j]]) for j in range(n)] for i in range(n)]
    for i in range(n):
        M[i][i] = poly_add(M[i][i], poly([0, 1]))  # xI - A == xI + A over GF(2)

    def deg(f):
        return poly_deg(f)

    diag: list[tuple[int, ...]] = []
    for t in range(n):
        while True:
            # find lowest-degree nonzero pivot in the remaining block
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if M[i][j] and (best is None or deg(M[i][j]) < deg(M[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                diag.append(P_ZERO)
                break
            bi, bj = best
            M[t], M[bi] = M[bi], M[t]
            for row in M:
                row[t], row[bj] = row[bj], row[t]
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, n):
                if M[i][t]:
                    q, _ = poly_divmod(M[i][t], piv)
                    for j in range(t, n):
                        M[i][j] = poly_add(M[i][j], poly_mul(q, M[t][j]))
                    if M[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if M[t][j]:
                    q, _ = poly_divmod(M[t][j], piv)
                    for i in range(t, n):
                        M[i][j] = poly_add(M[i][j], poly_mul(q, M[i][t]))
                    if M[t][j]:
                        dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if M[i][j] and poly_mod(M[i][j], piv):
                        bad = (i, j)
                        break
                if bad:
                    break
            if bad is None:
                diag.append(piv)
                break
            # add the offending row to row t and repeat
            for j in range(t, n):
                M[t][j] = poly_add(M[t][j], M[bad[0]][j])
    return diag


def frobenius_form(A: np.ndarray) -> list[tuple[int, ...]]:
    """Invariant-factor chain f1, ..., fr with f_{l+1} | f_l.

    The sum of degrees equals the dimension; f1 is the minimal polynomial.
    """
    A = np.asarray(A, dtype=np.uint8)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"frobenius_form: non-square shape {A.shape}")
    if A.shape[0] == 0:
        return []
    diag = _smith_char_matrix(A)
    factors = [f for f in diag if poly_deg(f) >= 1]
    factors.sort(key=poly_deg, reverse=True)
    assert sum(poly_deg(f) for f in factors) == A.shape[0]
    for a, b in zip(factors, factors[1:]):
        assert not poly_mod(a, b), "invariant factor chain must divide downward"
    return factors


def elementary_divisors(A: np.ndarray) -> list[tuple[int, ...]]:
    """Prime-power factors of the invariant factors (sorted)."""
    out = []
    for f in frobenius_form(A):
        for g, m in poly_factor(f):
            pw = P_ONE
            for _ in range(m):
                pw = poly_mul(pw, g)
            out.append(pw)
    return sorted(out)


def similar(A: np.ndarray, B: np.ndarray) -> bool:
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    if A.shape != B.shape:
        return False
    return frobenius_form(A) == frobenius_form(B)


def parallel_correction(X: np.ndarray, X2: np.ndarray) -> int:
    """dim ker((X^{-1})^t (x) X2 - id) for invertible X, X2."""
    Xi = invert(X)
    if Xi is None or invert(X2) is None:
        raise ValueError("parallel_correction: inputs must be invertible")
    K = kron(Xi.T, X2)
    K = K ^ identity(K.shape[0])
    return kernel_dim(K)
