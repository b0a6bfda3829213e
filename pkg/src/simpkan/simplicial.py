"""Truncated simplicial and semisimplicial vector spaces, chain complexes and
simplicial morphisms, plus the Dold-Kan inverse that builds test objects.

Index conventions: ``face(n, i)`` is d_i : V_n -> V_{n-1} (shape
``dims[n-1] x dims[n]``), ``degeneracy(n, i)`` is s_i : V_n -> V_{n+1}.
An object truncated at level N stores faces out of levels 1..N and
degeneracies out of levels 0..N-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .errors import InputError
from .linalg import Matrix, block_matrix


@dataclass
class ValidationReport:
    """Violated identities; empty means valid."""

    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, identity: str, level: int, indices, message: str) -> None:
        self.violations.append(
            {"identity": identity, "level": level, "indices": list(indices), "message": message}
        )

    def messages(self) -> list[str]:
        return [v["message"] for v in self.violations]

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": self.violations}


def _key(n: int, i: int) -> str:
    return f"{n},{i}"


def _parse_key(k: str, arity: int) -> tuple[int, ...]:
    parts = k.split(",")
    if len(parts) != arity or any(not p.isdigit() for p in parts):
        raise InputError(f"malformed key {k!r}")
    return tuple(int(p) for p in parts)


def _require_schema(obj, schema: str) -> None:
    if not isinstance(obj, dict):
        raise InputError(f"expected a JSON object with schema {schema!r}")
    if obj.get("schema") != schema:
        raise InputError(f"expected schema {schema!r}, got {obj.get('schema')!r}")


def _count_list(xs, what: str) -> tuple[int, ...]:
    if not isinstance(xs, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in xs
    ):
        raise InputError(f"{what} must be a list of nonnegative integers")
    return tuple(xs)


class SemiSVS:
    """Truncated semisimplicial vector space: dimensions and face matrices."""

    schema = "semi/1"

    def __init__(self, dims, faces: dict[tuple[int, int], Matrix]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise InputError("a simplicial object needs at least level 0")
        if any(d < 0 for d in dims):
            raise InputError("dimensions must be nonnegative")
        self.level = len(dims) - 1
        self.dims = dims
        self.faces = dict(faces)
        for n in range(1, self.level + 1):
            for i in range(n + 1):
                m = self.faces.get((n, i))
                if m is None:
                    raise InputError(f"missing face d_{i} at level {n}")
                if m.shape != (dims[n - 1], dims[n]):
                    raise InputError(
                        f"face d_{i} at level {n} has shape {m.shape}, "
                        f"expected {(dims[n - 1], dims[n])}"
                    )
        extra = set(self.faces) - {(n, i) for n in range(1, self.level + 1) for i in range(n + 1)}
        if extra:
            raise InputError(f"unexpected face keys {sorted(extra)}")

    def face(self, n: int, i: int) -> Matrix:
        return self.faces[(n, i)]

    @property
    def has_degeneracies(self) -> bool:
        return False

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.dims == other.dims and self.faces == other.faces

    def _faces_json(self) -> dict:
        return {_key(n, i): m.to_json() for (n, i), m in sorted(self.faces.items())}

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "level": self.level,
            "dims": list(self.dims),
            "faces": self._faces_json(),
        }

    @staticmethod
    def _read_common(obj) -> tuple[tuple[int, ...], dict]:
        dims = _count_list(obj.get("dims"), "dims")
        level = obj.get("level", len(dims) - 1)
        if level != len(dims) - 1:
            raise InputError(f"level {level} inconsistent with {len(dims)} dims")
        raw = obj.get("faces", {})
        if not isinstance(raw, dict):
            raise InputError("'faces' must be an object")
        faces = {_parse_key(k, 2): Matrix.from_json(v) for k, v in raw.items()}
        return dims, faces

    @classmethod
    def from_json(cls, obj) -> "SemiSVS":
        if isinstance(obj, dict) and obj.get("schema") == TruncatedSVS.schema:
            return TruncatedSVS.from_json(obj).forget_degeneracies()
        _require_schema(obj, cls.schema)
        dims, faces = cls._read_common(obj)
        return cls(dims, faces)


class TruncatedSVS(SemiSVS):
    """Simplicial vector space known up to level N."""

    schema = "svs/1"

    def __init__(self, dims, faces, degeneracies: dict[tuple[int, int], Matrix]):
        super().__init__(dims, faces)
        dims = self.dims
        self.degeneracies = dict(degeneracies)
        for n in range(self.level):
            for i in range(n + 1):
                m = self.degeneracies.get((n, i))
                if m is None:
                    raise InputError(f"missing degeneracy s_{i} at level {n}")
                if m.shape != (dims[n + 1], dims[n]):
                    raise InputError(
                        f"degeneracy s_{i} at level {n} has shape {m.shape}, "
                        f"expected {(dims[n + 1], dims[n])}"
                    )
        extra = set(self.degeneracies) - {(n, i) for n in range(self.level) for i in range(n + 1)}
        if extra:
            raise InputError(f"unexpected degeneracy keys {sorted(extra)}")

    def degeneracy(self, n: int, i: int) -> Matrix:
        return self.degeneracies[(n, i)]

    @property
    def has_degeneracies(self) -> bool:
        return True

    def __eq__(self, other) -> bool:
        return super().__eq__(other) and self.degeneracies == other.degeneracies

    def forget_degeneracies(self) -> SemiSVS:
        return SemiSVS(self.dims, self.faces)

    def to_json(self) -> dict:
        out = super().to_json()
        out["degeneracies"] = {
            _key(n, i): m.to_json() for (n, i), m in sorted(self.degeneracies.items())
        }
        return out

    @classmethod
    def from_json(cls, obj) -> "TruncatedSVS":
        _require_schema(obj, cls.schema)
        dims, faces = cls._read_common(obj)
        raw = obj.get("degeneracies", {})
        if not isinstance(raw, dict):
            raise InputError("'degeneracies' must be an object")
        degs = {_parse_key(k, 2): Matrix.from_json(v) for k, v in raw.items()}
        return cls(dims, faces, degs)


def forget_degeneracies(x: TruncatedSVS) -> SemiSVS:
    return x.forget_degeneracies()


def constant_svs(k: int, level: int) -> TruncatedSVS:
    """Every level Q^k, every structure map the identity."""
    eye = Matrix.identity(k)
    faces = {(n, i): eye for n in range(1, level + 1) for i in range(n + 1)}
    degs = {(n, i): eye for n in range(level) for i in range(n + 1)}
    return TruncatedSVS([k] * (level + 1), faces, degs)


def zero_svs(level: int) -> TruncatedSVS:
    return constant_svs(0, level)


# --------------------------------------------------------------------------
# identity checking


def validate_face_identities(x: SemiSVS, report: ValidationReport | None = None) -> ValidationReport:
    report = report if report is not None else ValidationReport()
    for L in range(2, x.level + 1):
        for j in range(1, L + 1):
            for i in range(j):
                lhs = x.face(L - 1, i) @ x.face(L, j)
                rhs = x.face(L - 1, j - 1) @ x.face(L, i)
                if lhs != rhs:
                    report.add(
                        "d_i d_j = d_{j-1} d_i", L, (i, j),
                        f"d_{i} d_{j} != d_{j - 1} d_{i} on level {L}",
                    )
    return report


def validate_simplicial_identities(x: SemiSVS) -> ValidationReport:
    """Check every simplicial identity whose source and target are within truncation."""
    report = validate_face_identities(x)
    if not x.has_degeneracies:
        return report
    N = x.level
    # s_i s_j = s_{j+1} s_i (i <= j), V_{n-1} -> V_{n+1}
    for n in range(1, N):
        for j in range(n):
            for i in range(j + 1):
                lhs = x.degeneracy(n, i) @ x.degeneracy(n - 1, j)
                rhs = x.degeneracy(n, j + 1) @ x.degeneracy(n - 1, i)
                if lhs != rhs:
                    report.add(
                        "s_i s_j = s_{j+1} s_i", n + 1, (i, j),
                        f"s_{i} s_{j} != s_{j + 1} s_{i} into level {n + 1}",
                    )
    # d_i s_j on V_{n-1} -> V_n -> V_{n-1}
    for n in range(1, N + 1):
        eye = Matrix.identity(x.dims[n - 1])
        for j in range(n):
            s = x.degeneracy(n - 1, j)
            for i in range(n + 1):
                lhs = x.face(n, i) @ s
                if i == j or i == j + 1:
                    rhs, name = eye, "d_i s_j = id"
                elif i < j:
                    rhs, name = x.degeneracy(n - 2, j - 1) @ x.face(n - 1, i), "d_i s_j = s_{j-1} d_i"
                else:
                    rhs, name = x.degeneracy(n - 2, j) @ x.face(n - 1, i - 1), "d_i s_j = s_j d_{i-1}"
                if lhs != rhs:
                    report.add(name, n, (i, j), f"{name} fails for d_{i} s_{j} on level {n}")
    return report


# --------------------------------------------------------------------------
# chain complexes and morphisms


class ChainComplex:
    """Nonnegatively graded chain complex; ``differential(n)`` is C_n -> C_{n-1}."""

    schema = "chain/1"

    def __init__(self, dims, differentials: dict[int, Matrix]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise InputError("a chain complex needs at least degree 0")
        if any(d < 0 for d in dims):
            raise InputError("dimensions must be nonnegative")
        self.dims = dims
        self.top = len(dims) - 1
        self.differentials = dict(differentials)
        for n in range(1, self.top + 1):
            m = self.differentials.get(n)
            if m is None:
                raise InputError(f"missing differential in degree {n}")
            if m.shape != (dims[n - 1], dims[n]):
                raise InputError(
                    f"differential {n} has shape {m.shape}, expected {(dims[n - 1], dims[n])}"
                )
        if set(self.differentials) - set(range(1, self.top + 1)):
            raise InputError("differential keys out of range")

    def differential(self, n: int) -> Matrix:
        return self.differentials[n]

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n <= self.top else 0

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        for n in range(2, self.top + 1):
            if not (self.differential(n - 1) @ self.differential(n)).is_zero():
                report.add("dd = 0", n, (n,), f"d_{n - 1} d_{n} != 0")
        return report

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChainComplex)
            and self.dims == other.dims
            and self.differentials == other.differentials
        )

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "dims": list(self.dims),
            "differentials": {str(n): m.to_json() for n, m in sorted(self.differentials.items())},
        }

    @classmethod
    def from_json(cls, obj) -> "ChainComplex":
        _require_schema(obj, cls.schema)
        dims = _count_list(obj.get("dims"), "dims")
        raw = obj.get("differentials", {})
        if not isinstance(raw, dict):
            raise InputError("'differentials' must be an object")
        diffs = {_parse_key(k, 1)[0]: Matrix.from_json(v) for k, v in raw.items()}
        return cls(dims, diffs)


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices ``components[n] : source_n -> target_n``."""

    source: ChainComplex
    target: ChainComplex
    components: tuple

    def is_chain_map(self) -> bool:
        top = min(self.source.top, self.target.top)
        for n in range(1, top + 1):
            lhs = self.target.differential(n) @ self.components[n]
            rhs = self.components[n - 1] @ self.source.differential(n)
            if lhs != rhs:
                return False
        return True


class SimplicialMorphism:
    """Levelwise matrices f_n : source.V_n -> target.V_n."""

    schema = "morphism/1"

    def __init__(self, source: SemiSVS, target: SemiSVS, components):
        self.source = source
        self.target = target
        self.components = tuple(components)
        if source.level != target.level:
            raise InputError("morphism source and target have different truncation levels")
        if len(self.components) != source.level + 1:
            raise InputError("morphism needs one component per level")
        for n, f in enumerate(self.components):
            if f.shape != (target.dims[n], source.dims[n]):
                raise InputError(
                    f"component {n} has shape {f.shape}, "
                    f"expected {(target.dims[n], source.dims[n])}"
                )

    @property
    def level(self) -> int:
        return self.source.level

    @classmethod
    def identity(cls, x: SemiSVS) -> "SimplicialMorphism":
        return cls(x, x, [Matrix.identity(d) for d in x.dims])

    @classmethod
    def zero(cls, x: SemiSVS, y: SemiSVS) -> "SimplicialMorphism":
        return cls(x, y, [Matrix.zeros(b, a) for a, b in zip(x.dims, y.dims)])

    def compose(self, first: "SimplicialMorphism") -> "SimplicialMorphism":
        """``self o first``."""
        if first.target.dims != self.source.dims:
            raise InputError("morphisms are not composable")
        return SimplicialMorphism(
            first.source, self.target, [g @ f for g, f in zip(self.components, first.components)]
        )

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "components": {str(n): f.to_json() for n, f in enumerate(self.components)},
        }

    @classmethod
    def from_json(cls, obj) -> "SimplicialMorphism":
        _require_schema(obj, cls.schema)
        src = load_simplicial(obj.get("source"))
        tgt = load_simplicial(obj.get("target"))
        raw = obj.get("components")
        if not isinstance(raw, dict):
            raise InputError("'components' must be an object")
        comps = {_parse_key(k, 1)[0]: Matrix.from_json(v) for k, v in raw.items()}
        if set(comps) != set(range(src.level + 1)):
            raise InputError("morphism components must cover every level")
        return cls(src, tgt, [comps[n] for n in range(src.level + 1)])


def load_simplicial(obj) -> SemiSVS:
    """Read either an ``svs/1`` or a ``semi/1`` document."""
    if isinstance(obj, dict) and obj.get("schema") == SemiSVS.schema:
        return SemiSVS.from_json(obj)
    return TruncatedSVS.from_json(obj)


def validate_morphism(f: SimplicialMorphism) -> ValidationReport:
    """Check that f commutes with faces (and degeneracies, when both sides have them)."""
    report = ValidationReport()
    x, y = f.source, f.target
    for n in range(1, f.level + 1):
        for i in range(n + 1):
            if f.components[n - 1] @ x.face(n, i) != y.face(n, i) @ f.components[n]:
                report.add("f d_i = d_i f", n, (i,), f"f does not commute with d_{i} on level {n}")
    if x.has_degeneracies and y.has_degeneracies:
        for n in range(f.level):
            for i in range(n + 1):
                if f.components[n + 1] @ x.degeneracy(n, i) != y.degeneracy(n, i) @ f.components[n]:
                    report.add(
                        "f s_i = s_i f", n, (i,), f"f does not commute with s_{i} out of level {n}"
                    )
    return report


# --------------------------------------------------------------------------
# Dold-Kan inverse


@lru_cache(maxsize=None)
def surjections(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Order-preserving surjections [n] -> [k] as value tuples, in lexicographic order."""
    out = []
    for steps in itertools.combinations(range(1, n + 1), k):
        vals, v = [], 0
        for x in range(n + 1):
            if x in steps:
                v += 1
            vals.append(v)
        out.append(tuple(vals))
    return tuple(sorted(out))


def coface(n: int, i: int) -> tuple[int, ...]:
    """delta_i : [n-1] -> [n], skipping i."""
    return tuple(x if x < i else x + 1 for x in range(n))


def codegeneracy(n: int, i: int) -> tuple[int, ...]:
    """sigma_i : [n+1] -> [n], hitting i twice."""
    return tuple(x if x <= i else x - 1 for x in range(n + 2))


def _summands(n: int, top: int) -> list[tuple[int, tuple[int, ...]]]:
    return [(k, eta) for k in range(min(n, top) + 1) for eta in surjections(n, k)]


def dold_kan_dims(c_dims, level: int) -> list[int]:
    return [sum(comb(n, k) * c for k, c in enumerate(c_dims) if k <= n) for n in range(level + 1)]


def _gamma_action(c: ChainComplex, theta: tuple[int, ...], m: int, n: int) -> Matrix:
    """Matrix of theta^* : Gamma(C)_n -> Gamma(C)_m for theta : [m] -> [n]."""
    top = c.top
    src = _summands(n, top)
    dst = _summands(m, top)
    dst_index = {s: idx for idx, s in enumerate(dst)}
    blocks: list[list[Matrix | None]] = [[None] * len(src) for _ in dst]
    for col, (k, eta) in enumerate(src):
        f = tuple(eta[t] for t in theta)
        image = sorted(set(f))
        t = tuple(image.index(v) for v in f)
        if len(image) == k + 1:
            blocks[dst_index[(k, t)]][col] = Matrix.identity(c.dims[k])
        elif image == list(range(k)):
            d = c.differential(k)
            blocks[dst_index[(k - 1, t)]][col] = d if k % 2 == 0 else -d
    return block_matrix(
        blocks, [c.dims[k] for k, _ in dst], [c.dims[k] for k, _ in src]
    )


def dold_kan_inverse(c: ChainComplex, level: int) -> TruncatedSVS:
    """Simplicial vector space with V_n = sum over surjections [n] ->> [k] of C_k.

    Summands are ordered by k, then lexicographically by the surjection. A
    face whose composite with a summand's surjection factors through the last
    coface of [k] acts by (-1)^k times the differential of degree k, so that
    the normalisation with differential (-1)^n d_n returns ``c`` on the nose.
    """
    if not c.validate().ok:
        raise InputError("chain complex does not square to zero")
    if level < 0:
        raise InputError("level must be nonnegative")
    if level > c.top:
        dims = list(c.dims) + [0] * (level - c.top)
        diffs = dict(c.differentials)
        for n in range(c.top + 1, level + 1):
            diffs[n] = Matrix.zeros(dims[n - 1], dims[n])
        c = ChainComplex(dims, diffs)
    faces = {
        (n, i): _gamma_action(c, coface(n, i), n - 1, n)
        for n in range(1, level + 1)
        for i in range(n + 1)
    }
    degs = {
        (n, i): _gamma_action(c, codegeneracy(n, i), n + 1, n)
        for n in range(level)
        for i in range(n + 1)
    }
    return TruncatedSVS(dold_kan_dims(c.dims, level), faces, degs)


def dold_kan_morphism(
    phi: ChainMap, level: int, source: TruncatedSVS | None = None, target: TruncatedSVS | None = None
) -> SimplicialMorphism:
    """Gamma(phi): acts by phi_k on every summand indexed by a surjection onto [k]."""
    src = source or dold_kan_inverse(phi.source, level)
    tgt = target or dold_kan_inverse(phi.target, level)
    comps = []
    for n in range(level + 1):
        s_sum = _summands(n, phi.source.top)
        t_sum = _summands(n, phi.target.top)
        t_index = {s: idx for idx, s in enumerate(t_sum)}
        blocks: list[list[Matrix | None]] = [[None] * len(s_sum) for _ in t_sum]
        for col, s in enumerate(s_sum):
            if s in t_index:
                blocks[t_index[s]][col] = phi.components[s[0]]
        comps.append(
            block_matrix(
                blocks,
                [phi.target.dim(k) for k, _ in t_sum],
                [phi.source.dim(k) for k, _ in s_sum],
            )
        )
    return SimplicialMorphism(src, tgt, comps)
