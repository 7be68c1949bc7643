"""Exact integer and rational kernels with pinned normalizations.

Matrices are tuples of row tuples.  Integer matrices hold Python ints;
rational matrices hold ``Fraction`` or, for the symbolic pipeline, sympy
expressions (treated as elements of the rational function field).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

IntMatrix = tuple[tuple[int, ...], ...]
RatMatrix = tuple[tuple, ...]


class KernelError(ValueError):
    """Raised when a kernel basis with the requested shape cannot exist."""


def as_matrix(rows: Sequence[Sequence]) -> tuple[tuple, ...]:
    rows = tuple(tuple(r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows have different lengths")
    return rows


def shape(m: Sequence[Sequence]) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def transpose(m: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*m)) if m else ()


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[tuple, ...]:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), 0 * row[0] if row else 0)
                       for col in bt) for row in a)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def is_zero_matrix(m: Sequence[Sequence]) -> bool:
    return all(_is_zero(x) for row in m for x in row)


# -- field helpers (Fraction or sympy) --------------------------------------

def _is_sym(x) -> bool:
    return hasattr(x, "free_symbols")


def _simplify(x):
    if _is_sym(x):
        import sympy as sp

        return sp.cancel(x)
    return x


def _is_zero(x) -> bool:
    if _is_sym(x):
        return _simplify(x) == 0
    return x == 0


def _to_field(x):
    if _is_sym(x):
        import sympy as sp

        if isinstance(x, sp.Rational):
            return Fraction(int(x.p), int(x.q))
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"entry {x!r} is not an exact field element")


# -- Hermite normal form ----------------------------------------------------

def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Column-style HNF: returns ``(H, U)`` with ``H = M U`` and ``U`` unimodular.

    ``H`` is in column echelon form: pivot entries are positive, each pivot
    lies strictly below the previous one, and entries to the left of a pivot
    in its row are reduced into ``[0, pivot)``.
    """
    rows, cols = shape(m)
    if any(not isinstance(x, int) for r in m for x in r):
        raise TypeError("hermite_normal_form expects an integer matrix")
    h = [list(r) for r in m]
    u = [list(r) for r in identity(cols)]

    def col_op(j: int, k: int, a: int, b: int, c: int, d: int) -> None:
        # (col_j, col_k) <- (a*col_j + b*col_k, c*col_j + d*col_k)
        for mat in (h, u):
            for r in mat:
                x, y = r[j], r[k]
                r[j], r[k] = a * x + b * y, c * x + d * y

    piv = 0
    pivots: list[tuple[int, int]] = []
    for i in range(rows):
        if piv >= cols:
            break
        for k in range(piv + 1, cols):
            if h[i][k] == 0:
                continue
            x, y = h[i][piv], h[i][k]
            g, s, t = _ext_gcd(x, y)
            # det [[s, -y/g], [t, x/g]] = (s*x + t*y)/g = 1
            col_op(piv, k, s, t, -y // g, x // g)
        if h[i][piv] == 0:
            continue
        if h[i][piv] < 0:
            _negate_col(h, u, piv)
        p = h[i][piv]
        for k in range(piv):
            q = h[i][k] // p
            if q:
                for mat in (h, u):
                    for r in mat:
                        r[k] -= q * r[piv]
        pivots.append((i, piv))
        piv += 1
    return tuple(map(tuple, h)), tuple(map(tuple, u))


def _negate_col(h, u, j):
    for mat in (h, u):
        for r in mat:
            r[j] = -r[j]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """``g = s*a + t*b`` with ``g = gcd(a, b) > 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank(m: Sequence[Sequence]) -> int:
    return len(_rref(m)[1])


def integer_kernel_basis(m: Sequence[Sequence[int]], pin_last_column: bool = False) -> IntMatrix:
    """Lattice basis of ``ker(M) ∩ Z^cols`` as the columns of the result.

    The basis is canonical: it is brought to echelon form measured from the
    bottom row and then negated, which for ``W = [I | a | 0]`` yields the
    column ``[a, -1]``.  With ``pin_last_column`` the final column is the
    last standard basis vector and every other column ends in 0.
    """
    rows, cols = shape(m)
    if pin_last_column:
        if any(r[-1] != 0 for r in m):
            raise KernelError("cannot pin e_last: last column of the matrix is nonzero")
        inner = tuple(r[:-1] for r in m)
        k = integer_kernel_basis(inner, False) if cols > 1 else ()
        kcols = transpose(k) if k and k[0] else ()
        basis_cols = [tuple(c) + (0,) for c in kcols]
        basis_cols.append(tuple(0 for _ in range(cols - 1)) + (1,))
        return transpose(basis_cols)
    if rows == 0:
        return identity(cols)
    h, u = hermite_normal_form(m)
    zero_cols = [j for j in range(cols) if all(h[i][j] == 0 for i in range(rows))]
    expected = cols - rank(m)
    if len(zero_cols) != expected:
        raise KernelError(f"kernel rank mismatch: found {len(zero_cols)}, expected {expected}")
    if not zero_cols:
        return tuple(() for _ in range(cols))
    basis = tuple(tuple(u[i][j] for j in zero_cols) for i in range(cols))
    return _canonical_lattice_basis(basis)


def _canonical_lattice_basis(k: IntMatrix) -> IntMatrix:
    rev = tuple(reversed(k))
    # HNF of the row-reversed basis is an echelon form seen from the bottom
    h, _ = hermite_normal_form(rev)
    ncols = len(k[0])
    nonzero = [j for j in range(ncols) if any(h[i][j] for i in range(len(h)))]
    h = tuple(tuple(row[j] for j in nonzero) for row in h)
    out = tuple(reversed(h))
    # reverse column order and negate: pivots become -1 for W = [I | A]
    return tuple(tuple(-x for x in reversed(row)) for row in out)


# -- rational row reduction -------------------------------------------------

def _rref(m: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form with leftmost nonzero pivots (exact)."""
    a = [[_to_field(x) for x in r] for r in m]
    rows, cols = shape(a)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pr = next((i for i in range(r, rows) if not _is_zero(a[i][c])), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = a[r][c]
        a[r] = [_simplify(x / inv) for x in a[r]]
        for i in range(rows):
            if i != r and not _is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [_simplify(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> RatMatrix:
    """Kernel basis (as columns) with no rank precondition."""
    rows, cols = shape(m)
    if rows == 0:
        n = ncols or 0
        return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    a, pivots = _rref(m)
    free = [c for c in range(cols) if c not in pivots]
    vecs = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = _simplify(-a[r][f])
        vecs.append(v)
    if not vecs:
        return tuple(() for _ in range(cols))
    return transpose(vecs)


def rational_kernel_basis(m: Sequence[Sequence], pin_last_row: bool = False) -> RatMatrix:
    """Kernel basis of a full-row-rank matrix, columns as basis vectors.

    With ``pin_last_row`` the basis is modified by column operations so that
    its last row is ``[0, ..., 0, 1]``.
    """
    rows, cols = shape(m)
    a, pivots = _rref(m)
    if len(pivots) != rows:
        raise KernelError(f"rank deficiency: rank {len(pivots)} < {rows} rows")
    k = nullspace(m, cols)
    if not pin_last_row:
        return k
    kcols = [list(c) for c in transpose(k)] if k and k[0] else []
    idx = next((j for j in range(len(kcols) - 1, -1, -1) if not _is_zero(kcols[j][-1])), None)
    if idx is None:
        raise KernelError("no kernel vector has a nonzero last coordinate; "
                          "the constant monomial is forced to vanish")
    piv = kcols.pop(idx)
    s = piv[-1]
    piv = [_simplify(x / s) for x in piv]
    for c in kcols:
        f = c[-1]
        if not _is_zero(f):
            for i in range(cols):
                c[i] = _simplify(c[i] - f * piv[i])
    kcols.append(piv)
    return transpose(kcols)
