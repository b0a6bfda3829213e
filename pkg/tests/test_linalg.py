from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import sympy_nullity, sympy_rank
from simpkan.errors import InputError
from simpkan.linalg import (
    Matrix,
    Subspace,
    annihilator,
    image_in,
    intersect,
    kernel_basis,
    parse_rational,
    rank,
    rational_to_json,
    restrict,
    solve,
    span_sum,
    subspace_equal,
    surjects_onto,
)

small = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix(rows, cols=c)


def test_rational_parsing_is_strict():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == -7
    for bad in ("2/4", "1/0", "1/-2", "x", "1.5"):
        with pytest.raises(InputError):
            parse_rational(bad)


def test_rational_json_forms():
    assert rational_to_json(Fraction(4, 2)) == 2
    assert rational_to_json(Fraction(-1, 3)) == "-1/3"


def test_matrix_json_roundtrip_and_shape_errors():
    m = Matrix([[1, "1/2"], [0, -3]])
    assert Matrix.from_json(m.to_json()) == m
    with pytest.raises(InputError):
        Matrix([[1, 2], [3]])
    with pytest.raises(InputError):
        Matrix.from_json({"rows": 2, "cols": 1, "entries": [[1]]})
    with pytest.raises(InputError):
        m @ Matrix.identity(3)


def test_matmul_with_fractions():
    a = Matrix([["1/2", 1], [0, "2/3"]])
    b = Matrix([[2, 0], ["3/2", 3]])
    assert a @ b == Matrix([["5/2", 3], [1, 2]])


def test_kernel_of_known_matrix():
    m = Matrix([[1, 2, 3], [2, 4, 6]])
    k = kernel_basis(m)
    assert k.dim == 2
    assert k == Subspace(3, [[-2, 1, 0], [-3, 0, 1]])


def test_solve_returns_none_when_inconsistent():
    m = Matrix([[1, 1], [2, 2]])
    assert solve(m, [1, 3]) is None
    x = solve(m, [1, 2])
    assert m.apply(x) == (1, 2)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_and_nullity_match_sympy(m):
    assert rank(m) == sympy_rank(m)
    k = kernel_basis(m)
    assert k.dim == sympy_nullity(m)
    assert all(not any(m.apply(v)) for v in k.vectors)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_canonical_basis_ignores_spanning_set(m, data):
    s = Subspace(m.cols, m.entries)
    # recombine the spanning rows with an invertible triangular mix
    rows = list(m.entries)
    mixed = []
    for i, r in enumerate(rows):
        acc = list(r)
        for j in range(i + 1, len(rows)):
            c = data.draw(st.integers(-2, 2))
            acc = [a + c * b for a, b in zip(acc, rows[j])]
        mixed.append(acc)
    assert Subspace(m.cols, mixed[::-1]) == s
    assert s.dim == rank(m)


@settings(max_examples=40, deadline=None)
@given(matrices(4, 5), matrices(4, 5))
def test_intersection_dimension_formula(a, b):
    if a.cols != b.cols:
        return
    u = Subspace(a.cols, a.entries)
    w = Subspace(b.cols, b.entries)
    i = intersect(u, w)
    assert i.dim == u.dim + w.dim - span_sum(u, w).dim
    assert all(u.contains(v) and w.contains(v) for v in i.vectors)


@settings(max_examples=40, deadline=None)
@given(matrices(5, 5))
def test_annihilator_is_orthogonal_complement(m):
    s = Subspace(m.cols, m.entries)
    ann = annihilator(s)
    assert ann.dim + s.dim == m.cols
    assert all(sum(x * y for x, y in zip(a, v)) == 0 for a in ann.vectors for v in s.vectors)


def test_coordinates_and_embed_are_inverse():
    s = Subspace(4, [[1, 2, 0, 1], [0, 1, 1, "1/2"]])
    v = (Fraction(2), Fraction(5), Fraction(1), Fraction(5, 2))
    assert s.contains(v)
    assert s.embed(s.coordinates(v)) == v
    assert not s.contains((1, 0, 0, 0))


def test_restrict_to_subspaces():
    m = Matrix([[0, 1], [0, 0]])
    src = Subspace(2, [[0, 1]])
    dst = Subspace(2, [[1, 0]])
    assert restrict(m, src, dst) == Matrix([[1]])
    assert image_in(m, dst)
    assert surjects_onto(m, dst)
    with pytest.raises(ValueError):
        restrict(Matrix.identity(2), src, dst)


def test_subspace_json_roundtrip():
    s = Subspace(3, [[1, "1/3", 0]])
    assert Subspace.from_json(s.to_json()) == s
    assert subspace_equal(s, Subspace(3, [[3, 1, 0]]))
