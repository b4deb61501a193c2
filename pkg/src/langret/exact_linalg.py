"""Exact rational vectors and matrices.

The scalar ``Q`` is GMP's ``mpq`` when gmpy2 is importable and
``fractions.Fraction`` otherwise; both keep values in lowest terms with a
positive denominator, compare and hash alike, and interoperate.  Vectors are
tuples of ``Q`` and matrices are tuples of rows.  Nothing here ever touches
floating point.
"""

from __future__ import annotations

import numbers
from typing import Iterable, Sequence, Tuple

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

Rational = numbers.Rational
Vector = Tuple[Rational, ...]
Matrix = Tuple[Vector, ...]

ZERO = Q(0)
ONE = Q(1)


class LinalgError(ValueError):
    """Raised on dimension mismatches and singular systems."""


def parse_rational(text) -> Rational:
    """Parse ``"p/q"`` or ``"p"``; exact rationals pass through.  Decimal and
    float syntax is refused."""
    if isinstance(text, Q):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, numbers.Rational):
        return Q(text.numerator, text.denominator)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Q(p, q)


def format_rational(x: Rational) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_vector(text: str) -> Vector:
    """Comma separated rationals, e.g. ``"1,-2/3,0"``."""
    if not text.strip():
        return ()
    return tuple(parse_rational(part) for part in text.split(","))


def vec(entries: Iterable) -> Vector:
    return tuple(parse_rational(e) for e in entries)


def mat(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise LinalgError("ragged matrix")
    return m


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def add(x: Sequence[Rational], y: Sequence[Rational]) -> Vector:
    _check_len(x, y)
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Sequence[Rational], y: Sequence[Rational]) -> Vector:
    _check_len(x, y)
    return tuple(a - b for a, b in zip(x, y))


def scale(t: Rational, x: Sequence[Rational]) -> Vector:
    return tuple(t * a for a in x)


def dot(x: Sequence[Rational], y: Sequence[Rational]) -> Rational:
    _check_len(x, y)
    return sum((a * b for a, b in zip(x, y)), ZERO)


def matvec(m: Matrix, x: Sequence[Rational]) -> Vector:
    return tuple(dot(row, x) for row in m)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if shape(a)[1] != len(b):
        raise LinalgError(f"cannot multiply {shape(a)} by {shape(b)}")
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def quad_form(m: Matrix, x: Sequence[Rational]) -> Rational:
    """``x^T m x``."""
    return dot(x, matvec(m, x))


def submatrix(m: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return tuple(tuple(m[i][j] for j in cols) for i in rows)


def is_symmetric(m: Matrix) -> bool:
    n, k = shape(m)
    return n == k and all(m[i][j] == m[j][i] for i in range(n) for j in range(i))


def _check_len(x: Sequence, y: Sequence) -> None:
    if len(x) != len(y):
        raise LinalgError(f"dimension mismatch: {len(x)} vs {len(y)}")


def _require_square(m: Matrix) -> int:
    n, k = shape(m)
    if n != k:
        raise LinalgError(f"matrix is {n}x{k}, expected square")
    return n


def _require_symmetric(m: Matrix) -> int:
    n = _require_square(m)
    if not is_symmetric(m):
        raise LinalgError("matrix is not symmetric")
    return n


def ldl(m: Matrix) -> tuple[Matrix, Vector]:
    """Rational LDL^T factorization of a symmetric matrix without pivoting.

    Returns the unit lower-triangular factor and the diagonal.  Raises
    ``LinalgError`` when a zero pivot shows up, which for a symmetric matrix
    means it is not positive definite (or not definite at all).
    """
    n = _require_symmetric(m)
    lower = [[ZERO] * n for _ in range(n)]
    diag = [ZERO] * n
    for j in range(n):
        d = m[j][j] - sum((lower[j][k] ** 2 * diag[k] for k in range(j)), ZERO)
        if d == 0:
            raise LinalgError("singular matrix in LDL^T factorization")
        diag[j] = d
        lower[j][j] = ONE
        for i in range(j + 1, n):
            s = m[i][j] - sum((lower[i][k] * lower[j][k] * diag[k] for k in range(j)), ZERO)
            lower[i][j] = s / d
    return tuple(map(tuple, lower)), tuple(diag)


def is_positive_definite(m: Matrix) -> bool:
    """Exact test: every leading principal minor is positive.

    The minors are the running products of the LDL^T pivots, so it is enough
    to check that every pivot is positive.
    """
    n = _require_symmetric(m)
    lower: list[list[Rational]] = [[ZERO] * n for _ in range(n)]
    diag: list[Rational] = []
    for j in range(n):
        d = m[j][j] - sum((lower[j][k] ** 2 * diag[k] for k in range(j)), ZERO)
        if d <= 0:
            return False
        diag.append(d)
        for i in range(j + 1, n):
            s = m[i][j] - sum((lower[i][k] * lower[j][k] * diag[k] for k in range(j)), ZERO)
            lower[i][j] = s / d
    return True


def solve_spd(m: Matrix, b: Sequence[Rational]) -> Vector:
    """Solve ``m x = b`` for symmetric positive definite ``m``, exactly."""
    n = _require_square(m)
    if len(b) != n:
        raise LinalgError(f"dimension mismatch: {n}x{n} system with rhs of length {len(b)}")
    lower, diag = ldl(m)
    if any(d < 0 for d in diag):
        raise LinalgError("matrix is not positive definite")
    z = [ZERO] * n
    for i in range(n):
        z[i] = b[i] - sum((lower[i][k] * z[k] for k in range(i)), ZERO)
    for i in range(n):
        z[i] /= diag[i]
    x = [ZERO] * n
    for i in reversed(range(n)):
        x[i] = z[i] - sum((lower[k][i] * x[k] for k in range(i + 1, n)), ZERO)
    return tuple(x)


def invert_spd(m: Matrix) -> Matrix:
    n = _require_symmetric(m)
    cols = [solve_spd(m, tuple(ONE if i == j else ZERO for i in range(n))) for j in range(n)]
    return transpose(tuple(cols))


def _eliminate(m: Matrix, rhs: Matrix) -> tuple[list[list[Rational]], list[list[Rational]], Rational]:
    """Gauss-Jordan with partial pivoting on first nonzero entry.

    Returns the reduced left block, the transformed right block and the
    determinant of ``m``.  Raises on singular input.
    """
    n = _require_square(m)
    a = [list(r) for r in m]
    b = [list(r) for r in rhs]
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise LinalgError("singular matrix")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            det = -det
        p = a[col][col]
        det *= p
        inv = ONE / p
        a[col] = [v * inv for v in a[col]]
        b[col] = [v * inv for v in b[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [u - f * v for u, v in zip(a[r], a[col])]
                b[r] = [u - f * v for u, v in zip(b[r], b[col])]
    return a, b, det


def solve(m: Matrix, b: Sequence[Rational]) -> Vector:
    """Solve a general nonsingular square system exactly."""
    n = _require_square(m)
    if len(b) != n:
        raise LinalgError(f"dimension mismatch: {n}x{n} system with rhs of length {len(b)}")
    _, x, _ = _eliminate(m, tuple((v,) for v in b))
    return tuple(row[0] for row in x)


def inverse(m: Matrix) -> Matrix:
    n = _require_square(m)
    _, inv, _ = _eliminate(m, identity(n))
    return tuple(map(tuple, inv))


def det(m: Matrix) -> Rational:
    n = _require_square(m)
    if n == 0:
        return ONE
    try:
        _, _, d = _eliminate(m, tuple(() for _ in range(n)))
    except LinalgError:
        return ZERO
    return d


def nullspace(m: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of ``{x : m x = 0}`` from the reduced row echelon form.

    ``ncols`` gives the ambient dimension when ``m`` has no rows.
    """
    rows, cols = shape(m)
    if ncols is not None:
        cols = ncols if rows == 0 else cols
    a = [list(r) for r in m]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = ONE / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        x = [ZERO] * cols
        x[fcol] = ONE
        for i, pc in enumerate(pivots):
            x[pc] = -a[i][fcol]
        basis.append(tuple(x))
    return tuple(basis)
