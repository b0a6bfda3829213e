"""Normalized chain complexes of simplicial vector spaces.

Two normalizations are provided:

* ``"N"``: level n is the intersection of ker d_j for j < n, with
  differential (-1)^n d_n;
* ``"tilde"``: level n is the intersection of ker d_j for 1 <= j <= n, with
  differential d_0.

Differentials are written in the canonical bases of the level subspaces.
The gamma projections (products of the idempotents id - s d) give an explicit
chain isomorphism from the tilde complex to the N complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import CheckFailed, InputError
from .kan import HornIndex, _cache, horn_projection
from .linalg import (
    Matrix,
    Subspace,
    image_in,
    intersect_all,
    kernel_basis,
    rank,
    restrict,
    subspace_equal,
)
from .simplicial import (
    ChainComplex,
    ChainMap,
    SemiSVS,
    SimplicialMorphism,
    TruncatedSVS,
    load_simplicial,
    validate_morphism,
)

VARIANTS = ("N", "tilde")


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise InputError(f"unknown normalization variant {variant!r}; use 'N' or 'tilde'")


@dataclass(frozen=True)
class NormalizedComplex:
    variant: str
    levels: tuple[Subspace, ...]
    complex: ChainComplex

    @property
    def dims(self) -> tuple[int, ...]:
        return self.complex.dims

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "levels": [s.to_json() for s in self.levels],
            "complex": self.complex.to_json(),
        }


def _kernel_of_faces(x: SemiSVS, n: int, indices) -> Subspace:
    return intersect_all((kernel_basis(x.face(n, j)) for j in indices), x.dims[n])


def n_subspace(x: SemiSVS, n: int, i: int, m: int) -> Subspace:
    """Intersection of ker d_j over j in {0..m} \\ {i} inside V_n (all of V_n if m = 0)."""
    if not 0 <= i <= m <= n <= x.level:
        raise InputError(f"need 0 <= i <= m <= n <= {x.level}, got i={i} m={m} n={n}")
    if m == 0:
        return Subspace.full(x.dims[n])
    cache = _cache(x)
    key = ("n_subspace", n, i, m)
    if key not in cache:
        cache[key] = _kernel_of_faces(x, n, [j for j in range(m + 1) if j != i])
    return cache[key]


def normalized_level(x: SemiSVS, n: int, variant: str) -> Subspace:
    _check_variant(variant)
    if n == 0:
        return Subspace.full(x.dims[0])
    return n_subspace(x, n, n, n) if variant == "N" else n_subspace(x, n, 0, n)


def normalized_differential(x: SemiSVS, n: int, variant: str) -> Matrix:
    """The unrestricted map V_n -> V_{n-1} that the differential restricts."""
    if variant == "N":
        d = x.face(n, n)
        return d if n % 2 == 0 else -d
    return x.face(n, 0)


def normalize(x: SemiSVS, variant: str = "N") -> NormalizedComplex:
    _check_variant(variant)
    levels = tuple(normalized_level(x, n, variant) for n in range(x.level + 1))
    diffs = {}
    for n in range(1, x.level + 1):
        try:
            diffs[n] = restrict(normalized_differential(x, n, variant), levels[n], levels[n - 1])
        except ValueError:
            raise CheckFailed(
                f"differential of degree {n} leaves the normalized subspace"
            ) from None
    c = ChainComplex([s.dim for s in levels], diffs)
    if not c.validate().ok:
        raise CheckFailed("normalized differential does not square to zero")
    return NormalizedComplex(variant, levels, c)


# --------------------------------------------------------------------------
# gamma projections


def _require_degeneracies(x: SemiSVS) -> TruncatedSVS:
    if not isinstance(x, TruncatedSVS):
        raise InputError("gamma projections need degeneracy maps")
    return x


def gamma(x: TruncatedSVS, n: int, i: int, m: int) -> Matrix:
    """gamma^n_{0,m} (``i = 0``) or gamma^n_{m,m} (``i = m``) as a matrix on V_n.

    gamma^n_{0,m} = (id - s_0 d_1) ... (id - s_{m-1} d_m) and
    gamma^n_{m,m} = (id - s_{m-1} d_{m-1}) ... (id - s_0 d_0), composed as
    written (rightmost factor applied first). gamma^n_{0,0} is the identity.
    """
    x = _require_degeneracies(x)
    if not 0 <= m <= n <= x.level:
        raise InputError(f"need 0 <= m <= n <= {x.level}, got m={m} n={n}")
    if i not in (0, m):
        raise InputError("gamma is defined for i = 0 or i = m")
    cache = _cache(x)
    key = ("gamma", n, i, m)
    if key in cache:
        return cache[key]
    eye = Matrix.identity(x.dims[n])
    g = eye
    if m > 0:
        if i == 0:
            for k in range(1, m + 1):
                g = g @ (eye - x.degeneracy(n - 1, k - 1) @ x.face(n, k))
        else:
            for k in range(m - 1, -1, -1):
                g = g @ (eye - x.degeneracy(n - 1, k) @ x.face(n, k))
    if not image_in(g, n_subspace(x, n, i, m)):
        raise CheckFailed(f"gamma^{n}_{{{i},{m}}} does not land in N^{n}_{{{i},{m}}}")
    cache[key] = g
    return g


def gamma_pair_inverse(x: TruncatedSVS, n: int, m: int) -> bool:
    """Are gamma_{m,m} on N_{0,m} and gamma_{0,m} on N_{m,m} mutually inverse?"""
    first = n_subspace(x, n, 0, m)
    last = n_subspace(x, n, m, m)
    try:
        fwd = restrict(gamma(x, n, m, m), first, last)
        back = restrict(gamma(x, n, 0, m), last, first)
    except ValueError:
        return False
    return (
        fwd @ back == Matrix.identity(last.dim)
        and back @ fwd == Matrix.identity(first.dim)
    )


@dataclass(frozen=True)
class ChainIsomorphism:
    tilde: NormalizedComplex
    normal: NormalizedComplex
    forward: ChainMap   # tilde -> N, gamma^n_{n,n}
    backward: ChainMap  # N -> tilde, gamma^n_{0,n}

    def to_json(self) -> dict:
        return {
            "tilde": self.tilde.complex.to_json(),
            "N": self.normal.complex.to_json(),
            "forward": {str(n): f.to_json() for n, f in enumerate(self.forward.components)},
            "backward": {str(n): f.to_json() for n, f in enumerate(self.backward.components)},
        }


def chain_isomorphism(x: TruncatedSVS) -> ChainIsomorphism:
    """The gamma chain isomorphism between the tilde and N normalizations, verified."""
    x = _require_degeneracies(x)
    tilde = normalize(x, "tilde")
    normal = normalize(x, "N")
    fwd, back = [], []
    for n in range(x.level + 1):
        src, dst = tilde.levels[n], normal.levels[n]
        try:
            f = restrict(gamma(x, n, n, n), src, dst)
            b = restrict(gamma(x, n, 0, n), dst, src)
        except ValueError:
            raise CheckFailed(f"gamma projections do not restrict at level {n}") from None
        if f @ b != Matrix.identity(dst.dim) or b @ f != Matrix.identity(src.dim):
            raise CheckFailed(f"gamma projections are not inverse at level {n}")
        fwd.append(f)
        back.append(b)
    for n in range(1, x.level + 1):
        if not chain_square_identity(x, n):
            raise CheckFailed(f"(-1)^n d_n gamma_(n,n) != d_0 on the tilde level {n}")
    forward = ChainMap(tilde.complex, normal.complex, tuple(fwd))
    backward = ChainMap(normal.complex, tilde.complex, tuple(back))
    if not (forward.is_chain_map() and backward.is_chain_map()):
        raise CheckFailed("gamma maps do not commute with the differentials")
    return ChainIsomorphism(tilde, normal, forward, backward)


def chain_square_identity(x: TruncatedSVS, n: int) -> bool:
    """(-1)^n d_n gamma^n_{n,n} v = d_0 v for every basis vector v of the tilde level n."""
    lhs = normalized_differential(x, n, "N") @ gamma(x, n, n, n)
    d0 = x.face(n, 0)
    return all(lhs.apply(v) == d0.apply(v) for v in n_subspace(x, n, 0, n).vectors)


# --------------------------------------------------------------------------
# homology


def homology_dims(c: ChainComplex) -> list[int]:
    """dim ker d_n - rank d_{n+1}; the top degree ignores the (unknown) next differential."""
    if not c.validate().ok:
        raise InputError("chain complex does not square to zero")
    ranks = [0] + [rank(c.differential(n)) for n in range(1, c.top + 1)] + [0]
    return [c.dims[n] - ranks[n] - ranks[n + 1] for n in range(c.top + 1)]


# --------------------------------------------------------------------------
# morphisms


def normalized_map(
    f: SimplicialMorphism,
    variant: str = "N",
    source: NormalizedComplex | None = None,
    target: NormalizedComplex | None = None,
) -> ChainMap:
    """Restriction of f to the normalized complexes, checked to be a chain map."""
    _check_variant(variant)
    source = source or normalize(f.source, variant)
    target = target or normalize(f.target, variant)
    comps = []
    for n, fn in enumerate(f.components):
        try:
            comps.append(restrict(fn, source.levels[n], target.levels[n]))
        except ValueError:
            raise CheckFailed(
                f"f_{n} does not map the normalized level into the target's"
            ) from None
    phi = ChainMap(source.complex, target.complex, tuple(comps))
    if not phi.is_chain_map():
        raise CheckFailed("restricted morphism is not a chain map")
    return phi


def naturality_holds(f: SimplicialMorphism) -> bool:
    """iso_target o tilde(f) == N(f) o iso_source at every level."""
    iso_s = chain_isomorphism(f.source)
    iso_t = chain_isomorphism(f.target)
    nf = normalized_map(f, "N", iso_s.normal, iso_t.normal)
    tf = normalized_map(f, "tilde", iso_s.tilde, iso_t.tilde)
    return all(
        a @ b == c @ d
        for a, b, c, d in zip(
            iso_t.forward.components, tf.components, nf.components, iso_s.forward.components
        )
    )


# --------------------------------------------------------------------------
# kernels of horn projections


def kernel_projection_identity(x: SemiSVS, n: int) -> tuple[bool, bool]:
    """(ker p^n_n == N level n, ker p^n_0 == tilde level n)."""
    if not 1 <= n <= x.level:
        raise InputError(f"level {n} outside 1..{x.level}")
    ker_last = kernel_basis(horn_projection(x, HornIndex(n, (n,)), check=False))
    ker_first = kernel_basis(horn_projection(x, HornIndex(n, (0,)), check=False))
    return (
        subspace_equal(ker_last, normalized_level(x, n, "N")),
        subspace_equal(ker_first, normalized_level(x, n, "tilde")),
    )


# --------------------------------------------------------------------------
# pointed families and the tangent complex


@dataclass
class PointedFamily:
    """One simplicial vector space (a tangent object) per base point."""

    points: list[str]
    fibers: dict[str, SemiSVS]

    schema = "family/1"

    def __post_init__(self):
        if not self.points:
            raise InputError("a pointed family needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise InputError("point labels must be distinct")
        if set(self.points) != set(self.fibers):
            raise InputError("every point needs exactly one fiber")
        levels = {self.fibers[p].level for p in self.points}
        if len(levels) != 1:
            raise InputError(f"fibers have different truncation levels {sorted(levels)}")

    @property
    def level(self) -> int:
        return self.fibers[self.points[0]].level

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "points": list(self.points),
            "fibers": {p: self.fibers[p].to_json() for p in self.points},
        }

    @classmethod
    def from_json(cls, obj) -> "PointedFamily":
        if not isinstance(obj, dict) or obj.get("schema") != cls.schema:
            raise InputError(f"expected schema {cls.schema!r}")
        points, fibers = obj.get("points"), obj.get("fibers")
        if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
            raise InputError("'points' must be a list of labels")
        if not isinstance(fibers, dict):
            raise InputError("'fibers' must be an object")
        return cls(points, {p: load_simplicial(v) for p, v in fibers.items()})


@dataclass
class BundleReport:
    dims: dict[str, list[int]]
    constant: list[bool] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"dims": self.dims, "constant_rank": self.constant}


@dataclass
class TangentComplex:
    variant: str
    complexes: dict[str, NormalizedComplex]
    bundle: BundleReport

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "complexes": {p: c.complex.to_json() for p, c in self.complexes.items()},
            "bundle": self.bundle.to_json(),
        }


def tangent_complex(f: PointedFamily, variant: str = "N") -> TangentComplex:
    """Normalize every fiber; a level counts as a bundle when its rank is constant."""
    _check_variant(variant)
    complexes = {p: normalize(f.fibers[p], variant) for p in f.points}
    dims = {p: list(complexes[p].dims) for p in f.points}
    constant = [
        len({dims[p][n] for p in f.points}) == 1 for n in range(f.level + 1)
    ]
    return TangentComplex(variant, complexes, BundleReport(dims, constant))


def tangent_map(
    source: PointedFamily,
    target: PointedFamily,
    maps: Mapping[str, SimplicialMorphism],
    point_map: Mapping[str, str] | None = None,
    variant: str = "N",
) -> dict[str, ChainMap]:
    """Per-point chain maps induced by morphisms between fibers.

    ``point_map`` sends each source point to a target point (identity by default).
    """
    point_map = point_map or {p: p for p in source.points}
    out = {}
    for p in source.points:
        q = point_map[p]
        f = maps[p]
        if f.source is not source.fibers[p] and f.source != source.fibers[p]:
            raise InputError(f"morphism at {p!r} does not start at the fiber over {p!r}")
        if f.target is not target.fibers[q] and f.target != target.fibers[q]:
            raise InputError(f"morphism at {p!r} does not end at the fiber over {q!r}")
        if not validate_morphism(f).ok:
            raise InputError(f"morphism at {p!r} is not simplicial")
        out[p] = normalized_map(f, variant)
    return out


def compose_chain_maps(g: ChainMap, f: ChainMap) -> ChainMap:
    """``g o f``."""
    return ChainMap(f.source, g.target, tuple(a @ b for a, b in zip(g.components, f.components)))
