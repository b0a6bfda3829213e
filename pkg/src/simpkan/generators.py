"""Seeded test-object generators.

All randomness comes from :class:`SplitMix64`, so the same seed reproduces
the same objects on every platform.

Random chain complexes are direct sums of elementary pieces, then each degree
is put in a scrambled basis. Layout of degree n before scrambling: the
spheres S(n), then the upper ends of the disks D(n), then the lower ends of
the disks D(n+1). The scramble at degree n is P_n = L_n U_n with L_n
unit-lower and U_n unit-upper triangular; their off-diagonal entries are drawn
in row-major order (L_n first, then U_n, degrees ascending) as
``next() % 7 - 3``. The new differential is P_{n-1} d_n P_n^{-1}.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .linalg import Matrix, kernel_basis, solve
from .simplicial import ChainComplex, ChainMap, SimplicialMorphism, TruncatedSVS

MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: state += 0x9E3779B97F4A7C15, then the usual xor-shift-multiply mix."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] (inclusive) by reduction modulo the range size."""
        return lo + self.next() % (hi - lo + 1)

    def rational(self, bound: int = 5, max_den: int = 3) -> Fraction:
        num = self.randint(-bound, bound)
        return Fraction(num, self.randint(1, max_den))

    def vector(self, n: int, bound: int = 5, max_den: int = 3) -> tuple:
        return tuple(self.rational(bound, max_den) for _ in range(n))


def unimodular(n: int, rng: SplitMix64) -> Matrix:
    """L U with unit-triangular integer factors; determinant 1."""
    lower = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    upper = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            lower[i][j] = rng.randint(-3, 3)
    for i in range(n):
        for j in range(i + 1, n):
            upper[i][j] = rng.randint(-3, 3)
    return Matrix(lower, cols=n) @ Matrix(upper, cols=n)


def transvections(n: int, rng: SplitMix64, count: int | None = None) -> tuple[Matrix, Matrix]:
    """Product of ``count`` (default 2n) elementary transvections and its inverse.

    Each factor is I + c E_ij with i != j and c in {-2, -1, 1, 2}; entries of
    the product stay small even in large dimensions.
    """
    count = 2 * n if count is None else count
    fwd = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if n < 2:
        return Matrix(fwd, cols=n), Matrix(inv, cols=n)
    for _ in range(count):
        i = rng.randint(0, n - 1)
        j = rng.randint(0, n - 2)
        if j >= i:
            j += 1
        c = (-2, -1, 1, 2)[rng.randint(0, 3)]
        # fwd <- (I + c E_ij) fwd : row_i += c row_j
        fwd[i] = [a + c * b for a, b in zip(fwd[i], fwd[j])]
        # inv <- inv (I - c E_ij) : col_j -= c col_i
        for row in inv:
            row[j] -= c * row[i]
    return Matrix(fwd, cols=n), Matrix(inv, cols=n)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise InputError("only square matrices have inverses")
    cols = []
    for j in range(m.rows):
        e = [0] * m.rows
        e[j] = 1
        x = solve(m, e)
        if x is None:
            raise ValueError("matrix is singular")
        cols.append(x)
    return Matrix.from_columns(cols, m.rows)


def parse_complex_spec(spec) -> tuple[list[int], list[int]]:
    """Accept ``{"sphere": [...], "disk": [...]}`` (counts per degree)."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise InputError(f"complex spec is not valid JSON: {exc}") from None
    if not isinstance(spec, dict) or not set(spec) <= {"sphere", "disk"}:
        raise InputError("complex spec must be an object with 'sphere' and/or 'disk' lists")
    out = []
    for name in ("sphere", "disk"):
        xs = spec.get(name, [])
        if not isinstance(xs, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in xs
        ):
            raise InputError(f"'{name}' must be a list of nonnegative counts")
        out.append(list(xs))
    spheres, disks = out
    if disks and disks[0]:
        raise InputError("a disk D(n) needs n >= 1")
    return spheres, disks


def elementary_complex(spheres: Sequence[int], disks: Sequence[int]) -> ChainComplex:
    """Direct sum of spheres and disks in the layout described in the module docstring."""
    top = max(len(spheres), len(disks), 1) - 1

    def count(xs, n):
        return xs[n] if 0 <= n < len(xs) else 0

    dims = [count(spheres, n) + count(disks, n) + count(disks, n + 1) for n in range(top + 1)]
    diffs = {}
    for n in range(1, top + 1):
        d = [[0] * dims[n] for _ in range(dims[n - 1])]
        k = count(disks, n)
        src0 = count(spheres, n)
        dst0 = count(spheres, n - 1) + count(disks, n - 1)
        for t in range(k):
            d[dst0 + t][src0 + t] = 1
        diffs[n] = Matrix(d, cols=dims[n])
    return ChainComplex(dims, diffs)


def random_chain_complex(spec, seed: int) -> ChainComplex:
    spheres, disks = parse_complex_spec(spec)
    base = elementary_complex(spheres, disks)
    rng = SplitMix64(seed)
    change = [unimodular(d, rng) for d in base.dims]
    diffs = {
        n: change[n - 1] @ base.differential(n) @ inverse(change[n])
        for n in range(1, base.top + 1)
    }
    c = ChainComplex(base.dims, diffs)
    if not c.validate().ok:
        raise AssertionError("generated complex does not square to zero")
    return c


def change_basis(
    x: TruncatedSVS, mats: Sequence[Matrix], invs: Sequence[Matrix] | None = None
) -> TruncatedSVS:
    """Transport ``x`` along levelwise isomorphisms ``mats[n]`` (new = P old)."""
    if invs is None:
        invs = [inverse(p) for p in mats]
    faces = {
        (n, i): mats[n - 1] @ m @ invs[n] for (n, i), m in x.faces.items()
    }
    degs = {
        (n, i): mats[n + 1] @ m @ invs[n] for (n, i), m in x.degeneracies.items()
    }
    return TruncatedSVS(x.dims, faces, degs)


def scramble_svs(x: TruncatedSVS, seed: int) -> tuple[TruncatedSVS, list[Matrix], list[Matrix]]:
    """Random change of basis on every level by transvection products.

    Returns the new object, the basis changes P_n and their inverses.
    """
    rng = SplitMix64(seed)
    pairs = [transvections(d, rng) for d in x.dims]
    mats = [p for p, _ in pairs]
    invs = [q for _, q in pairs]
    return change_basis(x, mats, invs), mats, invs


def transport_morphism(
    f: SimplicialMorphism,
    source: TruncatedSVS,
    target: TruncatedSVS,
    source_inverse: Sequence[Matrix],
    target_change: Sequence[Matrix],
) -> SimplicialMorphism:
    """Conjugate f into the changed bases: Q_n f_n P_n^{-1}."""
    comps = [
        q @ fn @ pinv for fn, pinv, q in zip(f.components, source_inverse, target_change)
    ]
    return SimplicialMorphism(source, target, comps)


def random_chain_map(c: ChainComplex, d: ChainComplex, rng: SplitMix64) -> ChainMap:
    """A random integer combination of a basis of all chain maps c -> d.

    Both complexes must have the same top degree.
    """
    if c.top != d.top:
        raise InputError("chain complexes must have the same top degree")
    offsets, total = [], 0
    for n in range(c.top + 1):
        offsets.append(total)
        total += d.dims[n] * c.dims[n]

    def var(n, r, s):
        return offsets[n] + r * c.dims[n] + s

    eqs = []
    for n in range(1, c.top + 1):
        dd, dc = d.differential(n), c.differential(n)
        # (d_n phi_n - phi_{n-1} c_n)[r, s] = 0
        for r in range(d.dims[n - 1]):
            for s in range(c.dims[n]):
                row = [0] * total
                for t in range(d.dims[n]):
                    if dd[r, t]:
                        row[var(n, t, s)] += dd[r, t]
                for t in range(c.dims[n - 1]):
                    if dc[t, s]:
                        row[var(n - 1, r, t)] -= dc[t, s]
                eqs.append(row)
    space = kernel_basis(Matrix(eqs, cols=total))
    coeffs = [rng.randint(-3, 3) for _ in range(space.dim)]
    flat = [Fraction(0)] * total
    for a, b in zip(coeffs, space.vectors):
        if a:
            for j, x in enumerate(b):
                if x:
                    flat[j] += a * x
    comps = []
    for n in range(c.top + 1):
        comps.append(
            Matrix(
                [
                    [flat[var(n, r, s)] for s in range(c.dims[n])]
                    for r in range(d.dims[n])
                ],
                cols=c.dims[n],
            )
        )
    phi = ChainMap(c, d, tuple(comps))
    if not phi.is_chain_map():
        raise AssertionError("generated map is not a chain map")
    return phi


def random_spec(rng: SplitMix64, top: int, level: int, max_dim: int) -> dict:
    """A random sphere/disk spec whose Dold-Kan levels stay within ``max_dim``."""
    from .simplicial import dold_kan_dims

    while True:
        spheres = [rng.randint(0, 2) for _ in range(top + 1)]
        disks = [0] + [rng.randint(0, 1) for _ in range(top)]
        c = elementary_complex(spheres, disks)
        if sum(c.dims) and max(dold_kan_dims(c.dims, level)) <= max_dim:
            return {"sphere": spheres, "disk": disks}
