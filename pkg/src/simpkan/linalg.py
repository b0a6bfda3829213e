"""Exact rational linear algebra.

Matrices are dense and immutable, with :class:`fractions.Fraction` entries.
Row reduction runs fraction-free on integer rows (each row is scaled by the
lcm of its denominators, and rows are divided by their content after every
cross-multiplication), so only the final normalisation step creates
fractions.

Subspaces are always stored in reduced column echelon form: the basis vectors
are the rows of the reduced row echelon form of any spanning set. Two
subspaces are equal iff their stored bases are identical.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

Vector = tuple  # tuple[Fraction, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)
_SMALL = {k: Fraction(k) for k in range(-256, 257)}


def _frac(num: int, den: int = 1) -> Fraction:
    if den == 1:
        f = _SMALL.get(num)
        return f if f is not None else Fraction(num)
    return Fraction(num, den)


def as_rational(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return _frac(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise InputError(f"not a rational: {x!r}")


def parse_rational(s: str) -> Fraction:
    """Parse the JSON string form ``"p/q"`` (``q > 0``, ``gcd(|p|, q) = 1``)."""
    num, sep, den = s.strip().partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise InputError(f"malformed rational {s!r}") from None
    if q <= 0:
        raise InputError(f"rational {s!r} must have a positive denominator")
    if math.gcd(p, q) != 1:
        raise InputError(f"rational {s!r} is not in lowest terms")
    return Fraction(p, q)


def rational_to_json(x: Fraction):
    x = as_rational(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def rational_from_json(x) -> Fraction:
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return as_rational(x)
    raise InputError(f"rational must be an integer or a 'p/q' string, got {x!r}")


def vec(xs: Iterable) -> Vector:
    return tuple(as_rational(x) for x in xs)


def zero_vec(n: int) -> Vector:
    return (_ZERO,) * n


def vec_add(a: Sequence, b: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a: Sequence) -> Vector:
    c = as_rational(c)
    return tuple(c * x for x in a)


# --------------------------------------------------------------------------
# fraction-free elimination core


def _int_row(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in row:
        if x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    if den == 1:
        return [x.numerator for x in row]
    return [x.numerator * (den // x.denominator) for x in row]


def _scaled_ints(rows) -> tuple[int, list[list[int]]]:
    """(D, R) with D * rows == R, R integral and D the lcm of all denominators."""
    den = 1
    for row in rows:
        for x in row:
            if x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
    if den == 1:
        return 1, [[x.numerator for x in row] for row in rows]
    return den, [[x.numerator * (den // x.denominator) for x in row] for row in rows]


def _eliminate(rows: list[list[int]], ncols: int, reduce: bool = True):
    """Fraction-free Gauss(-Jordan) elimination on integer rows, in place.

    Returns ``(rows, pivots)`` where ``rows`` are the nonzero echelon rows.
    With ``reduce`` every pivot column is cleared above the pivot as well.
    """
    nrows = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        best = -1
        best_abs = 0
        for k in range(r, nrows):
            v = rows[k][c]
            if v:
                a = v if v > 0 else -v
                if best < 0 or a < best_abs:
                    best, best_abs = k, a
                    if a == 1:
                        break
        if best < 0:
            continue
        if best != r:
            rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r]
        if piv[c] < 0:
            piv = [-x for x in piv]
            rows[r] = piv
        p = piv[c]
        nz = [j for j in range(c, ncols) if piv[j]]
        start = 0 if reduce else r + 1
        for k in range(start, nrows):
            if k == r:
                continue
            row = rows[k]
            f = row[c]
            if not f:
                continue
            if p == 1:
                for j in nz:
                    row[j] -= f * piv[j]
            else:
                g = math.gcd(p, f)
                a, b = p // g, f // g
                row = [a * x for x in row]
                for j in nz:
                    row[j] -= b * piv[j]
                g = math.gcd(*row)
                if g > 1:
                    row = [x // g for x in row]
                rows[k] = row
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form; returns (tuple of Fraction rows, pivots)."""
    work = [_int_row(row) for row in rows]
    work = [row for row in work if any(row)]
    ech, pivots = _eliminate(work, ncols, reduce=True)
    out = []
    for row, c in zip(ech, pivots):
        p = row[c]
        out.append(tuple(_frac(x, p) if x else _ZERO for x in row))
    return tuple(out), tuple(pivots)


# --------------------------------------------------------------------------
# matrices


class Matrix:
    """Immutable dense rational matrix."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Iterable[Iterable] = (), cols: int | None = None):
        data = tuple(tuple(as_rational(x) for x in row) for row in entries)
        if cols is None:
            if not data:
                raise InputError("column count required for a matrix with no rows")
            cols = len(data[0])
        for row in data:
            if len(row) != cols:
                raise InputError("ragged matrix rows")
        self.rows = len(data)
        self.cols = cols
        self.entries = data
        self._hash = None

    @classmethod
    def _raw(cls, data: tuple, cols: int) -> "Matrix":
        m = object.__new__(cls)
        m.rows = len(data)
        m.cols = cols
        m.entries = data
        m._hash = None
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._raw(tuple((_ZERO,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(
            tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        cols = [vec(c) for c in columns]
        for c in cols:
            if len(c) != rows:
                raise InputError("column length does not match row count")
        return cls._raw(tuple(tuple(c[i] for c in cols) for i in range(rows)), len(cols))

    @classmethod
    def vstack(cls, blocks: Sequence["Matrix"], cols: int | None = None) -> "Matrix":
        if cols is None:
            if not blocks:
                raise InputError("vstack of nothing needs a column count")
            cols = blocks[0].cols
        data = []
        for b in blocks:
            if b.cols != cols:
                raise InputError("vstack: column counts differ")
            data.extend(b.entries)
        return cls._raw(tuple(data), cols)

    @classmethod
    def hstack(cls, blocks: Sequence["Matrix"], rows: int | None = None) -> "Matrix":
        if rows is None:
            if not blocks:
                raise InputError("hstack of nothing needs a row count")
            rows = blocks[0].rows
        for b in blocks:
            if b.rows != rows:
                raise InputError("hstack: row counts differ")
        cols = sum(b.cols for b in blocks)
        data = tuple(sum((b.entries[i] for b in blocks), ()) for i in range(rows))
        return cls._raw(data, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(
            tuple(tuple(row[j] for row in self.entries) for j in range(self.cols)), self.rows
        )

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.entries)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise InputError(f"vector of length {len(v)} for a {self.rows}x{self.cols} matrix")
        v = vec(v)
        nz = [(j, x) for j, x in enumerate(v) if x]
        return tuple(sum((row[j] * x for j, x in nz), _ZERO) for row in self.entries)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return self.apply(other)
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        # multiply integer numerators over a common denominator; one
        # normalization per output entry instead of one per product term
        da, a_int = _scaled_ints(self.entries)
        db, b_int = _scaled_ints(other.entries)
        den = da * db
        n = other.cols
        out = []
        for row in a_int:
            acc = [0] * n
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(b_int[k]):
                        if b:
                            acc[j] += a * b
            out.append(tuple(_frac(x, den) if x else _ZERO for x in acc))
        return Matrix._raw(tuple(out), n)

    def _check_same(self, other: "Matrix"):
        if not isinstance(other, Matrix) or self.shape != other.shape:
            raise InputError("matrix shapes differ")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
            self.cols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
            self.cols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.entries), self.cols)

    def scale(self, c) -> "Matrix":
        c = as_rational(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self.entries), self.cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(
            "[" + ", ".join(str(x) for x in row) + "]" for row in self.entries
        )
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[rational_to_json(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj) -> "Matrix":
        if not isinstance(obj, dict) or not {"rows", "cols", "entries"} <= obj.keys():
            raise InputError("matrix JSON needs 'rows', 'cols' and 'entries'")
        rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in (rows, cols)):
            raise InputError("matrix 'rows'/'cols' must be nonnegative integers")
        if not isinstance(entries, list) or len(entries) != rows:
            raise InputError(f"matrix declares {rows} rows but lists {len(entries)}")
        data = []
        for row in entries:
            if not isinstance(row, list) or len(row) != cols:
                raise InputError(f"matrix row does not have {cols} entries")
            data.append(tuple(rational_from_json(x) for x in row))
        return cls._raw(tuple(data), cols)


def block_matrix(blocks: Sequence[Sequence[Matrix | None]], row_dims, col_dims) -> Matrix:
    """Assemble a block matrix; ``None`` blocks are zero."""
    data = []
    for bi, rd in enumerate(row_dims):
        for r in range(rd):
            row: list[Fraction] = []
            for bj, cd in enumerate(col_dims):
                b = blocks[bi][bj]
                if b is None:
                    row.extend((_ZERO,) * cd)
                else:
                    if b.shape != (rd, cd):
                        raise InputError(f"block ({bi},{bj}) has shape {b.shape}, want {(rd, cd)}")
                    row.extend(b.entries[r])
            data.append(tuple(row))
    return Matrix._raw(tuple(data), sum(col_dims))


# --------------------------------------------------------------------------
# subspaces


class Subspace:
    """A linear subspace of Q^n with its canonical (reduced echelon) basis."""

    __slots__ = ("ambient_dim", "_basis", "_pivots", "_ib")

    canonical = True

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        vs = [vec(v) for v in vectors]
        for v in vs:
            if len(v) != ambient_dim:
                raise InputError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        self.ambient_dim = ambient_dim
        self._basis, self._pivots = _rref(vs, ambient_dim)
        self._ib = None

    @classmethod
    def _raw(cls, ambient_dim: int, basis: tuple, pivots: tuple) -> "Subspace":
        s = object.__new__(cls)
        s.ambient_dim = ambient_dim
        s._basis = basis
        s._pivots = pivots
        s._ib = None
        return s

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls._raw(n, Matrix.identity(n).entries, tuple(range(n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls._raw(n, (), ())

    @classmethod
    def column_space(cls, m: Matrix) -> "Subspace":
        return cls(m.rows, m.T.entries)

    @property
    def dim(self) -> int:
        return len(self._basis)

    @property
    def vectors(self) -> tuple:
        """Canonical basis vectors."""
        return self._basis

    @property
    def pivots(self) -> tuple:
        return self._pivots

    @property
    def basis(self) -> Matrix:
        """Basis as an ``ambient_dim x dim`` matrix (reduced column echelon form)."""
        return Matrix._raw(
            tuple(tuple(b[i] for b in self._basis) for i in range(self.ambient_dim)), self.dim
        )

    def _int_basis_rows(self) -> list:
        if self._ib is None:
            self._ib = [_int_row(b) for b in self._basis]
        return self._ib

    def _residual_is_zero(self, v: Sequence) -> bool:
        """Reduce ``v`` against the basis with integer row operations."""
        r = _int_row(v)
        ib = self._int_basis_rows()
        for b, p in zip(ib, self._pivots):
            c = r[p]
            if c:
                bp = b[p]
                g = math.gcd(bp, c)
                a, f = bp // g, c // g
                if a != 1:
                    r = [a * x for x in r]
                for j in range(p, self.ambient_dim):
                    if b[j]:
                        r[j] -= f * b[j]
        return not any(r)

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise InputError("vector length does not match ambient dimension")
        return self._residual_is_zero(vec(v))

    __contains__ = contains

    def coordinates(self, v: Sequence) -> Vector:
        """Coordinates of ``v`` in the canonical basis; raises if ``v`` is outside."""
        v = vec(v)
        if not self.contains(v):
            raise ValueError("vector does not lie in the subspace")
        return tuple(v[p] for p in self._pivots)

    def embed(self, coords: Sequence) -> Vector:
        """Inverse of :meth:`coordinates`."""
        if len(coords) != self.dim:
            raise InputError("coordinate vector has the wrong length")
        out = [_ZERO] * self.ambient_dim
        for c, b in zip(vec(coords), self._basis):
            if c:
                for j, x in enumerate(b):
                    if x:
                        out[j] += c * x
        return tuple(out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self._basis == other._basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self._basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Subspace":
        if not isinstance(obj, dict) or "ambient_dim" not in obj or "basis" not in obj:
            raise InputError("subspace JSON needs 'ambient_dim' and 'basis'")
        b = Matrix.from_json(obj["basis"])
        if b.rows != obj["ambient_dim"]:
            raise InputError("subspace basis rows must equal ambient_dim")
        s = cls(b.rows, b.T.entries)
        if s.dim != b.cols:
            raise InputError("subspace basis columns are linearly dependent")
        return s


# --------------------------------------------------------------------------
# operations


def rank(m: Matrix) -> int:
    work = [_int_row(row) for row in m.entries]
    work = [row for row in work if any(row)]
    _, pivots = _eliminate(work, m.cols, reduce=False)
    return len(pivots)


def kernel_basis(m: Matrix) -> Subspace:
    """Null space of ``m`` as a canonical subspace of Q^cols."""
    n = m.cols
    rows, pivots = _rref(m.entries, n)
    pivset = set(pivots)
    vectors = []
    for f in range(n):
        if f in pivset:
            continue
        v = [_ZERO] * n
        v[f] = _ONE
        for row, p in zip(rows, pivots):
            if row[f]:
                v[p] = -row[f]
        vectors.append(v)
    return Subspace(n, vectors)


def solve(m: Matrix, b: Sequence) -> Vector | None:
    """Echelon particular solution of ``m x = b`` (free variables zero), or None."""
    if len(b) != m.rows:
        raise InputError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    b = vec(b)
    aug = [row + (x,) for row, x in zip(m.entries, b)]
    rows, pivots = _rref(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [_ZERO] * m.cols
    for row, p in zip(rows, pivots):
        x[p] = row[-1]
    return tuple(x)


def annihilator(s: Subspace) -> Subspace:
    """Vectors orthogonal (under the standard pairing) to every vector of ``s``."""
    if s.dim == 0:
        return Subspace.full(s.ambient_dim)
    return kernel_basis(Matrix._raw(s.vectors, s.ambient_dim))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise InputError("intersect: ambient dimensions differ")
    n = a.ambient_dim
    if a.dim == n or b.dim == 0:
        return b
    if b.dim == n or a.dim == 0:
        return a
    eqs = annihilator(a).vectors + annihilator(b).vectors
    return kernel_basis(Matrix._raw(eqs, n))


def intersect_all(spaces: Iterable[Subspace], ambient_dim: int) -> Subspace:
    """Intersection of several subspaces (the full space for an empty family)."""
    spaces = list(spaces)
    for s in spaces:
        if s.ambient_dim != ambient_dim:
            raise InputError("intersect_all: ambient dimensions differ")
    if not spaces:
        return Subspace.full(ambient_dim)
    eqs: tuple = ()
    for s in spaces:
        if s.dim < ambient_dim:
            eqs += annihilator(s).vectors
    if not eqs:
        return Subspace.full(ambient_dim)
    return kernel_basis(Matrix._raw(eqs, ambient_dim))


def span_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise InputError("sum: ambient dimensions differ")
    return Subspace(a.ambient_dim, a.vectors + b.vectors)


def subspace_equal(a: Subspace, b: Subspace) -> bool:
    if a.ambient_dim != b.ambient_dim:
        raise InputError("subspace_equal: ambient dimensions differ")
    return a == b


def image_in(m: Matrix, target: Subspace) -> bool:
    """True iff the column space of ``m`` lies inside ``target``."""
    if m.rows != target.ambient_dim:
        raise InputError(f"map has {m.rows} rows, target ambient is {target.ambient_dim}")
    if target.dim == target.ambient_dim:
        return True
    return all(target._residual_is_zero(c) for c in m.columns())


def surjects_onto(m: Matrix, target: Subspace) -> bool:
    """True iff the column space of ``m`` equals ``target``."""
    return image_in(m, target) and rank(m) == target.dim


def restrict(m: Matrix, source: Subspace, target: Subspace) -> Matrix:
    """Matrix of ``m`` restricted to ``source -> target`` in canonical bases.

    Raises ValueError when ``m`` does not map ``source`` into ``target``.
    """
    if m.cols != source.ambient_dim or m.rows != target.ambient_dim:
        raise InputError("restrict: shapes do not match the subspaces")
    cols = []
    for b in source.vectors:
        img = m.apply(b)
        if not target.contains(img):
            raise ValueError("map does not send the source subspace into the target")
        cols.append(tuple(img[p] for p in target.pivots))
    return Matrix.from_columns(cols, target.dim)
