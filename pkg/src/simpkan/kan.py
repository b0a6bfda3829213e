"""Horn spaces, horn projections, Kan checks and horn fillers.

A horn index (n, I) removes the faces in I from the boundary of the
n-simplex. Its horn space in a (semi)simplicial vector space V is the subspace
of the direct sum of copies of V_{n-1}, one per kept index in ascending
order, cut out by d_a(x^b) = d_{b-1}(x^a) for kept a < b.

Horn indices of the form I = {j} u {m+1, ..., n} with 0 <= j <= m <= n are
called *filtered* here: the kept set is {0..m} minus j. Those are the ones
with a recursive construction and (for m < n) a closed-form filler.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import (
    CheckFailed,
    ConstructionError,
    InputError,
    NoFillerError,
    PreconditionError,
    UnsupportedShapeError,
)
from .linalg import (
    Matrix,
    Subspace,
    block_matrix,
    image_in,
    kernel_basis,
    solve,
    surjects_onto,
    vec,
    vec_add,
    vec_sub,
    zero_vec,
    rational_from_json,
    rational_to_json,
)
from .simplicial import SemiSVS, TruncatedSVS


@dataclass(frozen=True)
class HornIndex:
    n: int
    removed: tuple[int, ...]

    def __post_init__(self):
        removed = tuple(sorted(set(self.removed)))
        object.__setattr__(self, "removed", removed)
        if self.n < 1:
            raise InputError(f"horn level must be >= 1, got {self.n}")
        if any(i < 0 or i > self.n for i in removed):
            raise InputError(f"removed indices {removed} not inside [0, {self.n}]")
        if len(removed) == self.n + 1:
            raise InputError("a horn must keep at least one face")

    @property
    def kept(self) -> tuple[int, ...]:
        gone = set(self.removed)
        return tuple(i for i in range(self.n + 1) if i not in gone)

    def filtered_shape(self) -> tuple[int, int] | None:
        """``(j, m)`` with removed = {j} u {m+1..n}, or None."""
        target = set(self.removed)
        for m in range(1, self.n + 1):
            for j in range(m + 1):
                if {j} | set(range(m + 1, self.n + 1)) == target:
                    return j, m
        return None

    @property
    def is_filtered(self) -> bool:
        return self.filtered_shape() is not None

    @classmethod
    def filtered(cls, n: int, j: int, m: int) -> "HornIndex":
        if not 0 <= j <= m <= n or m < 1:
            raise InputError(f"need 0 <= j <= m <= n and m >= 1, got j={j} m={m} n={n}")
        return cls(n, (j, *range(m + 1, n + 1)))

    def to_json(self) -> dict:
        return {"n": self.n, "removed": list(self.removed)}

    @classmethod
    def from_json(cls, obj) -> "HornIndex":
        if not isinstance(obj, dict) or "n" not in obj or "removed" not in obj:
            raise InputError("horn index JSON needs 'n' and 'removed'")
        n, removed = obj["n"], obj["removed"]
        if not isinstance(n, int) or not isinstance(removed, list) or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in removed
        ):
            raise InputError("horn index fields must be integers")
        return cls(n, tuple(removed))

    def __str__(self) -> str:
        return f"({self.n},{{{','.join(map(str, self.removed))}}})"


def all_horns(n: int) -> Iterator[HornIndex]:
    """Every horn index at level n, ordered by removed set size then lexicographically."""
    for r in range(n + 1):
        for removed in itertools.combinations(range(n + 1), r):
            yield HornIndex(n, removed)


def filtered_horns(n: int, include_ordinary: bool = False) -> Iterator[HornIndex]:
    """Filtered horn indices {j, m+1..n} with 1 <= m < n (m = n too if asked)."""
    top = n if include_ordinary else n - 1
    for m in range(1, top + 1):
        for j in range(m + 1):
            yield HornIndex.filtered(n, j, m)


@dataclass(frozen=True)
class HornSpace:
    index: HornIndex
    block_dim: int
    space: Subspace

    @property
    def kept(self) -> tuple[int, ...]:
        return self.index.kept

    @property
    def ambient_dim(self) -> int:
        return self.block_dim * len(self.kept)

    @property
    def dim(self) -> int:
        return self.space.dim

    def split(self, v: Sequence) -> dict[int, tuple]:
        d = self.block_dim
        return {j: tuple(v[t * d:(t + 1) * d]) for t, j in enumerate(self.kept)}

    def to_json(self) -> dict:
        return {
            "index": self.index.to_json(),
            "kept": list(self.kept),
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "basis": self.space.basis.to_json(),
        }


@dataclass(frozen=True)
class HornElement:
    index: HornIndex
    components: Mapping[int, tuple]

    def __post_init__(self):
        comps = {int(j): vec(v) for j, v in self.components.items()}
        if set(comps) != set(self.index.kept):
            raise InputError(
                f"horn element components {sorted(comps)} do not match kept {list(self.index.kept)}"
            )
        lengths = {len(v) for v in comps.values()}
        if len(lengths) > 1:
            raise InputError("horn element components have different lengths")
        object.__setattr__(self, "components", comps)

    def vector(self) -> tuple:
        return sum((self.components[j] for j in self.index.kept), ())

    @classmethod
    def from_vector(cls, index: HornIndex, v: Sequence, block_dim: int) -> "HornElement":
        return cls(index, {j: tuple(v[t * block_dim:(t + 1) * block_dim])
                           for t, j in enumerate(index.kept)})

    def to_json(self) -> dict:
        return {
            "index": self.index.to_json(),
            "components": {
                str(j): [rational_to_json(x) for x in v] for j, v in sorted(self.components.items())
            },
        }

    @classmethod
    def from_json(cls, obj) -> "HornElement":
        if not isinstance(obj, dict) or "index" not in obj or "components" not in obj:
            raise InputError("horn element JSON needs 'index' and 'components'")
        index = HornIndex.from_json(obj["index"])
        raw = obj["components"]
        if not isinstance(raw, dict):
            raise InputError("'components' must be an object")
        comps = {}
        for k, v in raw.items():
            if not k.isdigit() or not isinstance(v, list):
                raise InputError(f"bad horn component {k!r}")
            comps[int(k)] = tuple(rational_from_json(x) for x in v)
        return cls(index, comps)


# --------------------------------------------------------------------------


def _cache(x: SemiSVS) -> dict:
    c = x.__dict__.get("_horn_cache")
    if c is None:
        c = x.__dict__["_horn_cache"] = {}
    return c


def _check_range(x: SemiSVS, h: HornIndex) -> None:
    if h.n > x.level:
        raise InputError(f"horn level {h.n} exceeds truncation level {x.level}")


def compatibility_matrix(x: SemiSVS, h: HornIndex) -> Matrix:
    """Rows d_a pi_b - d_{b-1} pi_a for kept a < b (empty when n = 1)."""
    _check_range(x, h)
    n, kept = h.n, h.kept
    d = x.dims[n - 1]
    if n == 1 or len(kept) < 2:
        return Matrix.zeros(0, d * len(kept))
    e = x.dims[n - 2]
    blocks, row_dims = [], []
    for a, b in itertools.combinations(kept, 2):
        row: list[Matrix | None] = [None] * len(kept)
        row[kept.index(b)] = x.face(n - 1, a)
        row[kept.index(a)] = -x.face(n - 1, b - 1)
        blocks.append(row)
        row_dims.append(e)
    return block_matrix(blocks, row_dims, [d] * len(kept))


def horn_space_direct(x: SemiSVS, h: HornIndex) -> HornSpace:
    """Horn space as the kernel of all pairwise compatibility equations."""
    key = ("direct", h)
    cache = _cache(x)
    if key not in cache:
        cache[key] = HornSpace(h, x.dims[h.n - 1], kernel_basis(compatibility_matrix(x, h)))
    return cache[key]


def horn_projection(x: SemiSVS, h: HornIndex, check: bool = True) -> Matrix:
    """Kept faces stacked in ascending order: V_n -> sum of copies of V_{n-1}.

    With ``check`` the image is verified to lie in the horn space, which the
    simplicial identities guarantee for a valid object.
    """
    _check_range(x, h)
    p = Matrix.vstack([x.face(h.n, j) for j in h.kept])
    if check and not image_in(p, horn_space_direct(x, h).space):
        raise CheckFailed(f"horn projection {h} leaves the horn space; face identities fail")
    return p


def check_generalized_kan(x: SemiSVS, h: HornIndex) -> bool:
    """Is the horn projection onto the horn space surjective?"""
    p = horn_projection(x, h, check=False)
    return surjects_onto(p, horn_space_direct(x, h).space)


def check_kan(x: SemiSVS, n: int, i: int) -> bool:
    if not 1 <= n <= x.level:
        raise InputError(f"level {n} outside 1..{x.level}")
    if not 0 <= i <= n:
        raise InputError(f"horn index {i} outside 0..{n}")
    return check_generalized_kan(x, HornIndex(n, (i,)))


def kan_report(x: SemiSVS) -> list[dict]:
    """Kan(n, i) for every n <= level, then the filtered generalized conditions."""
    rows = []
    for n in range(1, x.level + 1):
        for i in range(n + 1):
            rows.append({"kind": "kan", "n": n, "i": i, "holds": check_kan(x, n, i)})
    for n in range(2, x.level + 1):
        for h in filtered_horns(n):
            j, m = h.filtered_shape()
            rows.append({
                "kind": "generalized", "n": n, "j": j, "m": m,
                "removed": list(h.removed), "holds": check_generalized_kan(x, h),
            })
    return rows


# --------------------------------------------------------------------------
# recursive construction


def _block_diag(m: Matrix, copies: int) -> Matrix:
    blocks = [[m if a == b else None for b in range(copies)] for a in range(copies)]
    return block_matrix(blocks, [m.rows] * copies, [m.cols] * copies)


def _recursive(x: SemiSVS, n: int, j: int, m: int) -> Subspace:
    """Filtered horn space at level n, kept {0..m} \\ {j}, built by fiber products."""
    key = ("recursive", n, j, m)
    cache = _cache(x)
    if key in cache:
        return cache[key]
    d = x.dims[n - 1]
    if m == 1:
        result = Subspace.full(d)
    else:
        # The new block is the largest kept index; the rest is a smaller filtered horn.
        if j < m:
            prev_j, face_index, over_j = j, m - 1, j
        else:
            prev_j, face_index, over_j = m - 1, m - 2, m - 1
        prev = _recursive(x, n, prev_j, m - 1)
        over = _recursive(x, n - 1, over_j, m - 1)
        over_kept = [t for t in range(m) if t != over_j]
        p = Matrix.vstack([x.face(n - 1, t) for t in over_kept])
        if not surjects_onto(p, over):
            raise ConstructionError(
                f"projection onto the ({n - 1}, {{{over_j},{m}..{n - 1}}}) horn is not "
                "surjective; the fiber product step is not justified"
            )
        copies = len(over_kept)
        face_map = _block_diag(x.face(n - 1, face_index), copies)
        B = prev.basis
        DB = face_map @ B
        if not image_in(DB, over):
            raise ConstructionError("face images of the smaller horn leave the horn space below")
        # kernel of [D B | -p] in (alpha, y) coordinates
        system = Matrix.hstack([DB, -p])
        k = kernel_basis(system)
        vectors = []
        for w in k.vectors:
            alpha, y = w[:prev.dim], w[prev.dim:]
            vectors.append(B.apply(alpha) + tuple(y))
        result = Subspace(d * (copies + 1), vectors)
    cache[key] = result
    return result


def horn_space_recursive(x: SemiSVS, h: HornIndex) -> HornSpace:
    """Filtered horn space built bottom-up by iterated fiber products.

    Each step adjoins the block of the largest kept index over the smaller
    filtered horn, glued along the faces of the level below. The projection
    the gluing uses is checked to be surjective before the step is taken.
    """
    _check_range(x, h)
    shape = h.filtered_shape()
    if shape is None:
        raise UnsupportedShapeError(f"horn {h} is not of the form {{j, m+1..n}}")
    j, m = shape
    return HornSpace(h, x.dims[h.n - 1], _recursive(x, h.n, j, m))


# --------------------------------------------------------------------------
# fillers


def _require_in_horn(x: SemiSVS, e: HornElement) -> tuple:
    _check_range(x, e.index)
    hs = horn_space_direct(x, e.index)
    v = e.vector()
    if len(v) != hs.ambient_dim:
        raise InputError(
            f"horn element has length {len(v)}, horn ambient dimension is {hs.ambient_dim}"
        )
    if not hs.space.contains(v):
        raise PreconditionError(f"element does not lie in the horn space {e.index}")
    return v


def fill_generalized_horn(x: TruncatedSVS, n: int, m: int, j: int, e: HornElement) -> tuple:
    """Closed-form filler for a horn with removed set {j, m+1..n}, 0 <= j <= m < n.

    Evaluates the alternating sum over increasing chains j_0 < ... < j_l in
    {0..m} \\ {j} of s_{j_l} d_{j_l} ... s_{j_1} d_{j_1} s_{j_0} (v^{j_0}),
    with sign (-1)^l, operators applied right to left.
    """
    if not isinstance(x, TruncatedSVS):
        raise InputError("the closed-form filler needs degeneracies")
    if not (0 <= j <= m < n and m >= 1):
        raise InputError(f"need 0 <= j <= m < n and m >= 1, got j={j} m={m} n={n}")
    h = HornIndex.filtered(n, j, m)
    if e.index != h:
        raise InputError(f"element is for horn {e.index}, expected {h}")
    _require_in_horn(x, e)
    idx = [t for t in range(m + 1) if t != j]
    total = zero_vec(x.dims[n])
    for l in range(m):
        acc = zero_vec(x.dims[n])
        for chain in itertools.combinations(idx, l + 1):
            w = x.degeneracy(n - 1, chain[0]).apply(e.components[chain[0]])
            for t in chain[1:]:
                w = x.degeneracy(n - 1, t).apply(x.face(n, t).apply(w))
            acc = vec_add(acc, w)
        total = vec_add(total, acc) if l % 2 == 0 else vec_sub(total, acc)
    for i in idx:
        if x.face(n, i).apply(total) != e.components[i]:
            raise CheckFailed(f"filler postcondition fails at face {i}")
    return total


def fill_horn_solve(x: SemiSVS, e: HornElement) -> tuple:
    """Echelon solution v of p(v) = e for any horn index."""
    v = _require_in_horn(x, e)
    p = horn_projection(x, e.index, check=False)
    sol = solve(p, v)
    if sol is None:
        raise NoFillerError(f"no filler exists for this {e.index} horn")
    return sol


def fill_horn_linear(x: SemiSVS, n: int, i: int, e: HornElement) -> tuple:
    h = HornIndex(n, (i,))
    if e.index != h:
        raise InputError(f"element is for horn {e.index}, expected {h}")
    return fill_horn_solve(x, e)


def project_to_horn(x: SemiSVS, h: HornIndex, v: Sequence) -> HornElement:
    """The horn element p(v) of an n-simplex v."""
    p = horn_projection(x, h, check=False)
    return HornElement.from_vector(h, p.apply(v), x.dims[h.n - 1])
