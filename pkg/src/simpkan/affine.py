"""Piecewise-affine truncated simplicial objects.

Each level is a finite disjoint union of rational affine spaces
(components). A structure map sends each component into one target
component by an affine map ``x -> A x + b``. This is the finite stand-in for
a simplicial manifold: enough to see horn spaces that are disjoint unions of
pieces of different dimension, and to linearize at a base point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import CheckFailed, InputError
from .kan import HornIndex, kan_report
from .linalg import Matrix, rank, rational_to_json, rational_from_json, solve, vec
from .simplicial import (
    TruncatedSVS,
    ValidationReport,
    _count_list,
    _key,
    _parse_key,
    _require_schema,
    codegeneracy,
    coface,
    surjections,
)


@dataclass(frozen=True)
class AffinePiece:
    """The restriction of a structure map to one source component."""

    to: int
    matrix: Matrix
    shift: tuple

    def __call__(self, x: Sequence) -> tuple:
        return tuple(a + b for a, b in zip(self.matrix.apply(x), self.shift))

    def after(self, first: "AffinePiece") -> "AffinePiece":
        """``self o first``; the caller must know the routing matches."""
        return AffinePiece(self.to, self.matrix @ first.matrix, self(first.shift))

    def to_json(self) -> dict:
        return {
            "to": self.to,
            "matrix": self.matrix.to_json(),
            "shift": [rational_to_json(x) for x in self.shift],
        }

    @classmethod
    def from_json(cls, obj) -> "AffinePiece":
        if not isinstance(obj, dict) or not {"to", "matrix", "shift"} <= obj.keys():
            raise InputError("affine piece needs 'to', 'matrix' and 'shift'")
        to = obj["to"]
        if not isinstance(to, int) or isinstance(to, bool) or to < 0:
            raise InputError("'to' must be a component index")
        if not isinstance(obj["shift"], list):
            raise InputError("'shift' must be a list of rationals")
        return cls(to, Matrix.from_json(obj["matrix"]), tuple(rational_from_json(x) for x in obj["shift"]))


class AffineSimplicialObject:
    schema = "affine/1"

    def __init__(self, components, faces: dict, degeneracies: dict, basepoint: tuple[int, Sequence]):
        self.components = tuple(tuple(c) for c in components)
        if not self.components:
            raise InputError("need at least level 0")
        self.level = len(self.components) - 1
        self.faces = {k: tuple(v) for k, v in faces.items()}
        self.degeneracies = {k: tuple(v) for k, v in degeneracies.items()}
        comp, coords = basepoint
        self.basepoint = (comp, vec(coords))
        self._check_shapes()

    def _check_maps(self, maps: dict, expected: set, shift: int, what: str) -> None:
        if set(maps) != expected:
            missing = sorted(expected - set(maps))
            extra = sorted(set(maps) - expected)
            raise InputError(f"{what}: missing {missing}, unexpected {extra}")
        for (n, i), pieces in maps.items():
            src, dst = self.components[n], self.components[n + shift]
            if len(pieces) != len(src):
                raise InputError(f"{what} {n},{i}: need one piece per component of level {n}")
            for c, p in enumerate(pieces):
                if not 0 <= p.to < len(dst):
                    raise InputError(f"{what} {n},{i}: component {c} routed to missing {p.to}")
                if p.matrix.shape != (dst[p.to], src[c]) or len(p.shift) != dst[p.to]:
                    raise InputError(f"{what} {n},{i}: piece {c} has the wrong shape")

    def _check_shapes(self) -> None:
        for n, dims in enumerate(self.components):
            if not dims:
                raise InputError(f"level {n} has no components")
            if any(not isinstance(d, int) or isinstance(d, bool) or d < 0 for d in dims):
                raise InputError(f"level {n}: component dimensions must be nonnegative integers")
        N = self.level
        self._check_maps(
            self.faces, {(n, i) for n in range(1, N + 1) for i in range(n + 1)}, -1, "face"
        )
        self._check_maps(
            self.degeneracies, {(n, i) for n in range(N) for i in range(n + 1)}, 1, "degeneracy"
        )
        comp, coords = self.basepoint
        if not 0 <= comp < len(self.components[0]) or len(coords) != self.components[0][comp]:
            raise InputError("basepoint does not name a point of a level-0 component")

    def face(self, n: int, i: int, c: int) -> AffinePiece:
        return self.faces[(n, i)][c]

    def degeneracy(self, n: int, i: int, c: int) -> AffinePiece:
        return self.degeneracies[(n, i)][c]

    def basepoint_chain(self) -> list[tuple[int, tuple]]:
        """The iterated s_0 images of the basepoint, one (component, point) per level."""
        chain = [self.basepoint]
        for n in range(self.level):
            c, p = chain[-1]
            s = self.degeneracy(n, 0, c)
            chain.append((s.to, s(p)))
        return chain

    def to_json(self) -> dict:
        def maps(d):
            return {_key(n, i): [p.to_json() for p in v] for (n, i), v in sorted(d.items())}

        comp, coords = self.basepoint
        return {
            "schema": self.schema,
            "level": self.level,
            "components": [list(c) for c in self.components],
            "faces": maps(self.faces),
            "degeneracies": maps(self.degeneracies),
            "basepoint": {"component": comp, "coords": [rational_to_json(x) for x in coords]},
        }

    @classmethod
    def from_json(cls, obj) -> "AffineSimplicialObject":
        _require_schema(obj, cls.schema)
        for k in ("level", "components", "faces", "degeneracies", "basepoint"):
            if k not in obj:
                raise InputError(f"affine object is missing {k!r}")
        comps = obj["components"]
        if not isinstance(comps, list):
            raise InputError("'components' must be a list of lists of dimensions")
        comps = [_count_list(c, f"components[{n}]") for n, c in enumerate(comps)]
        if obj["level"] != len(comps) - 1:
            raise InputError("'level' does not match the number of component lists")

        def maps(d, what):
            if not isinstance(d, dict):
                raise InputError(f"'{what}' must be an object")
            out = {}
            for k, v in d.items():
                if not isinstance(v, list):
                    raise InputError(f"{what} {k}: expected a list of pieces")
                out[_parse_key(k, 2)] = [AffinePiece.from_json(p) for p in v]
            return out

        bp = obj["basepoint"]
        if not isinstance(bp, dict) or not isinstance(bp.get("coords"), list):
            raise InputError("'basepoint' needs 'component' and 'coords'")
        comp = bp.get("component")
        if not isinstance(comp, int) or isinstance(comp, bool):
            raise InputError("basepoint component must be an integer")
        return cls(
            comps,
            maps(obj["faces"], "faces"),
            maps(obj["degeneracies"], "degeneracies"),
            (comp, [rational_from_json(x) for x in bp["coords"]]),
        )


def _compare(report: ValidationReport, name: str, level: int, idx, c: int,
             lhs: AffinePiece, rhs: AffinePiece) -> None:
    if lhs.to != rhs.to:
        report.add(name, level, idx, f"{name}: component {c} routed to {lhs.to} vs {rhs.to}")
    elif lhs.matrix != rhs.matrix or lhs.shift != rhs.shift:
        report.add(name, level, idx, f"{name}: affine maps differ on component {c}")


def _identity_piece(dim: int, c: int) -> AffinePiece:
    return AffinePiece(c, Matrix.identity(dim), (0,) * dim)


def validate_affine(a: AffineSimplicialObject) -> ValidationReport:
    """Simplicial identities on routings and affine maps, plus basepoint consistency."""
    report = ValidationReport()
    N = a.level
    comps = a.components
    for n in range(2, N + 1):
        for c in range(len(comps[n])):
            for j in range(1, n + 1):
                for i in range(j):
                    p, q = a.face(n, j, c), a.face(n, i, c)
                    _compare(report, "d_i d_j = d_{j-1} d_i", n, (i, j), c,
                             a.face(n - 1, i, p.to).after(p), a.face(n - 1, j - 1, q.to).after(q))
    for n in range(1, N):
        for c in range(len(comps[n - 1])):
            for j in range(n):
                for i in range(j + 1):
                    p, q = a.degeneracy(n - 1, j, c), a.degeneracy(n - 1, i, c)
                    _compare(report, "s_i s_j = s_{j+1} s_i", n + 1, (i, j), c,
                             a.degeneracy(n, i, p.to).after(p),
                             a.degeneracy(n, j + 1, q.to).after(q))
    for n in range(1, N + 1):
        for c, dim in enumerate(comps[n - 1]):
            for j in range(n):
                s = a.degeneracy(n - 1, j, c)
                for i in range(n + 1):
                    lhs = a.face(n, i, s.to).after(s)
                    if i == j or i == j + 1:
                        rhs, name = _identity_piece(dim, c), "d_i s_j = id"
                    elif i < j:
                        d = a.face(n - 1, i, c)
                        rhs, name = a.degeneracy(n - 2, j - 1, d.to).after(d), "d_i s_j = s_{j-1} d_i"
                    else:
                        d = a.face(n - 1, i - 1, c)
                        rhs, name = a.degeneracy(n - 2, j, d.to).after(d), "d_i s_j = s_j d_{i-1}"
                    _compare(report, name, n, (i, j), c, lhs, rhs)
    # the degenerate basepoint images must be the same point whichever way they are reached
    chain = a.basepoint_chain()
    for n in range(1, N + 1):
        comp, point = chain[n]
        for i in range(n):
            s = a.degeneracy(n - 1, i, chain[n - 1][0])
            if (s.to, s(chain[n - 1][1])) != (comp, point):
                report.add("basepoint", n, (i,), f"s_{i} moves the degenerate basepoint at level {n}")
        for i in range(n + 1):
            d = a.face(n, i, comp)
            if (d.to, d(point)) != chain[n - 1]:
                report.add("basepoint", n, (i,), f"d_{i} of the degenerate basepoint is not the basepoint")
    return report


def from_svs(x: TruncatedSVS) -> AffineSimplicialObject:
    """One component per level, linear structure maps, basepoint 0."""
    def lin(m, d):
        return [AffinePiece(0, m, (0,) * d)]

    faces = {(n, i): lin(m, x.dims[n - 1]) for (n, i), m in x.faces.items()}
    degs = {(n, i): lin(m, x.dims[n + 1]) for (n, i), m in x.degeneracies.items()}
    return AffineSimplicialObject(
        [[d] for d in x.dims], faces, degs, (0, (0,) * x.dims[0])
    )


# --------------------------------------------------------------------------
# the lines-glued-at-zero example


def glued_lines_labels(n: int) -> list[tuple[int, ...]]:
    """Component labels at level n: surjections [n] -> [k], k ascending, lexicographic."""
    return [eta for k in range(n + 1) for eta in surjections(n, k)]


def build_glued_lines(level: int) -> AffineSimplicialObject:
    """Lines R_(k), one new nondegenerate line per level, glued by constant faces.

    The component of level n labelled by a surjection eta: [n] -> [k] is the
    degenerate copy eta^* R_(k); the identity label is the new line R_(n).
    Faces of eta^* R_(k) along delta_i: if eta o delta_i is still onto [k] the
    map is the identity onto (eta o delta_i)^* R_(k); otherwise it factors
    through a face of R_(k), which is the constant 0 in R_(k-1).
    Degeneracies act by eta -> eta o sigma_i, identically.
    """
    if not isinstance(level, int) or level < 2:
        raise InputError("the example needs level >= 2")
    labels = [glued_lines_labels(n) for n in range(level + 1)]
    index = [{eta: c for c, eta in enumerate(ls)} for ls in labels]
    one = Matrix.identity(1)
    zero = Matrix.zeros(1, 1)
    faces, degs = {}, {}
    for n in range(1, level + 1):
        for i in range(n + 1):
            delta = coface(n, i)
            pieces = []
            for eta in labels[n]:
                g = tuple(eta[t] for t in delta)
                k = eta[-1]
                missing = set(range(k + 1)) - set(g)
                if not missing:
                    pieces.append(AffinePiece(index[n - 1][g], one, (0,)))
                else:
                    (v,) = missing
                    g = tuple(y if y < v else y - 1 for y in g)
                    pieces.append(AffinePiece(index[n - 1][g], zero, (0,)))
            faces[(n, i)] = pieces
    for n in range(level):
        for i in range(n + 1):
            sigma = codegeneracy(n, i)
            degs[(n, i)] = [
                AffinePiece(index[n + 1][tuple(eta[t] for t in sigma)], one, (0,))
                for eta in labels[n]
            ]
    comps = [[1] * len(ls) for ls in labels]
    return AffineSimplicialObject(comps, faces, degs, (0, (0,)))


# name used by the command line and the acceptance checks
build_example_5_1 = build_glued_lines


# --------------------------------------------------------------------------
# horn profiles


@dataclass(frozen=True)
class HornProfile:
    horn: HornIndex
    pieces: tuple  # ((assignment, dim or None), ...)

    @property
    def dims_present(self) -> tuple[int, ...]:
        return tuple(sorted({d for _, d in self.pieces if d is not None}))

    @property
    def manifold_flag(self) -> bool:
        return len(self.dims_present) <= 1

    def dim_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(d for _, d in self.pieces if d is not None))

    def to_json(self) -> dict:
        return {
            "horn": self.horn.to_json(),
            "pieces": [{"components": list(a), "dim": d} for a, d in self.pieces],
            "dims_present": list(self.dims_present),
            "manifold_flag": self.manifold_flag,
        }


def horn_profile(a: AffineSimplicialObject, h: HornIndex) -> HornProfile:
    """Solve the horn equations on every choice of component per kept face."""
    if h.n > a.level:
        raise InputError(f"horn level {h.n} exceeds truncation level {a.level}")
    kept = h.kept
    comps = a.components[h.n - 1]
    pieces = []
    for assign in itertools.product(range(len(comps)), repeat=len(kept)):
        dims = [comps[c] for c in assign]
        offs = [sum(dims[:t]) for t in range(len(dims))]
        total = sum(dims)
        rows, rhs = [], []
        ok = True
        if h.n >= 2:
            for s, t in itertools.combinations(range(len(kept)), 2):
                ka, kb = kept[s], kept[t]
                # d_a x^b = d_{b-1} x^a
                p = a.face(h.n - 1, ka, assign[t])
                q = a.face(h.n - 1, kb - 1, assign[s])
                if p.to != q.to:
                    ok = False
                    break
                for r in range(len(p.shift)):
                    row = [0] * total
                    for col in range(dims[t]):
                        row[offs[t] + col] += p.matrix[r, col]
                    for col in range(dims[s]):
                        row[offs[s] + col] -= q.matrix[r, col]
                    rows.append(row)
                    rhs.append(q.shift[r] - p.shift[r])
        dim = None
        if ok:
            if rows:
                m = Matrix(rows, cols=total)
                if solve(m, rhs) is not None:
                    dim = total - rank(m)
            else:
                dim = total
        pieces.append((assign, dim))
    return HornProfile(h, tuple(pieces))


# --------------------------------------------------------------------------
# linearization at the base point


def tangent_at_base(a: AffineSimplicialObject) -> TruncatedSVS:
    """Linear parts of all structure maps along the degenerate basepoint chain."""
    chain = [c for c, _ in a.basepoint_chain()]
    dims = [a.components[n][c] for n, c in enumerate(chain)]
    faces, degs = {}, {}
    for (n, i) in a.faces:
        p = a.face(n, i, chain[n])
        if p.to != chain[n - 1]:
            raise CheckFailed(f"d_{i} moves the basepoint component at level {n}")
        faces[(n, i)] = p.matrix
    for (n, i) in a.degeneracies:
        p = a.degeneracy(n, i, chain[n])
        if p.to != chain[n + 1]:
            raise CheckFailed(f"s_{i} moves the basepoint component at level {n}")
        degs[(n, i)] = p.matrix
    return TruncatedSVS(dims, faces, degs)


def local_kan_check(a: AffineSimplicialObject) -> list[dict]:
    """Kan and generalized Kan conditions for the linearization at the base point."""
    return kan_report(tangent_at_base(a))
