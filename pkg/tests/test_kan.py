from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from corpus import corpus_entry
from oracles import horn_space_dim
from simpkan.errors import (
    ConstructionError,
    InputError,
    NoFillerError,
    PreconditionError,
    UnsupportedShapeError,
)
from simpkan.generators import SplitMix64
from simpkan.kan import (
    HornElement,
    HornIndex,
    all_horns,
    check_generalized_kan,
    check_kan,
    fill_generalized_horn,
    fill_horn_linear,
    fill_horn_solve,
    filtered_horns,
    horn_space_direct,
    horn_space_recursive,
    kan_report,
    project_to_horn,
)
from simpkan.linalg import Matrix
from simpkan.simplicial import SemiSVS, constant_svs


def _lonely_point(level=2):
    """V_0 = Q and nothing above: faces exist but no horn over a point fills."""
    dims = [1] + [0] * level
    faces = {(n, i): Matrix.zeros(dims[n - 1], dims[n]) for n in range(1, level + 1) for i in range(n + 1)}
    return SemiSVS(dims, faces)


def test_horn_index_validation():
    for n, removed in ((0, ()), (2, (3,)), (1, (0, 1)), (2, (-1,))):
        with pytest.raises(InputError):
            HornIndex(n, removed)
    h = HornIndex(3, (2, 0))
    assert h.removed == (0, 2)
    assert h.kept == (1, 3)
    assert HornIndex.from_json(h.to_json()) == h


def test_filtered_shapes():
    assert HornIndex(4, (1, 3, 4)).filtered_shape() == (1, 2)
    assert HornIndex(3, (3,)).filtered_shape() == (3, 3)
    assert HornIndex(3, (2, 3)).filtered_shape() == (2, 2)
    assert HornIndex(3, (0, 2)).filtered_shape() is None
    with pytest.raises(InputError):
        HornIndex.filtered(3, 0, 0)
    # each filtered index arises from exactly one (j, m)
    shapes = [h.filtered_shape() for h in filtered_horns(5, include_ordinary=True)]
    assert len(shapes) == len(set(shapes)) == sum(m + 1 for m in range(1, 6))


def test_constant_object_horn_spaces():
    x = constant_svs(2, 3)
    for n in (1, 2, 3):
        for i in range(n + 1):
            assert horn_space_direct(x, HornIndex(n, (i,))).dim == 2
            assert check_kan(x, n, i)


@pytest.mark.parametrize("k", [0, 1, 2, 5, 6])
def test_horn_dims_match_independent_oracle(k):
    x = corpus_entry(k)[3]
    for n in range(1, min(x.level, 3) + 1):
        for h in all_horns(n):
            assert horn_space_direct(x, h).dim == horn_space_dim(x, n, h.kept), h


@pytest.mark.parametrize("k", range(8))
def test_corpus_objects_are_kan(k):
    x = corpus_entry(k)[3]
    assert all(row["holds"] for row in kan_report(x))


def test_kan_report_lists_every_condition():
    x = constant_svs(1, 3)
    rows = kan_report(x)
    kan_rows = [(r["n"], r["i"]) for r in rows if r["kind"] == "kan"]
    assert kan_rows == [(n, i) for n in (1, 2, 3) for i in range(n + 1)]
    gen_rows = [(r["n"], r["j"], r["m"]) for r in rows if r["kind"] == "generalized"]
    assert gen_rows == [(2, 0, 1), (2, 1, 1), (3, 0, 1), (3, 1, 1), (3, 0, 2), (3, 1, 2), (3, 2, 2)]


def test_semisimplicial_object_can_fail_kan():
    x = _lonely_point()
    assert not check_kan(x, 1, 0)
    e = HornElement(HornIndex(1, (0,)), {1: (1,)})
    with pytest.raises(NoFillerError):
        fill_horn_solve(x, e)
    with pytest.raises(ConstructionError):
        horn_space_recursive(x, HornIndex(2, (2,)))


def test_range_errors():
    x = constant_svs(1, 2)
    with pytest.raises(InputError):
        check_kan(x, 3, 0)
    with pytest.raises(InputError):
        check_kan(x, 2, 3)
    with pytest.raises(InputError):
        horn_space_direct(x, HornIndex(3, (0,)))


@pytest.mark.parametrize("k", [1, 2, 3, 7, 11])
def test_recursive_matches_direct(k):
    x = corpus_entry(k)[3]
    for n in range(1, x.level + 1):
        for h in filtered_horns(n, include_ordinary=True):
            assert horn_space_recursive(x, h).space == horn_space_direct(x, h).space, h


def test_recursive_rejects_other_shapes():
    with pytest.raises(UnsupportedShapeError):
        horn_space_recursive(constant_svs(1, 3), HornIndex(3, (0, 2)))


def _random_simplex(x, n, rng):
    return rng.vector(x.dims[n])


@pytest.mark.parametrize("k", [2, 3, 6, 7])
def test_closed_form_filler(k):
    x = corpus_entry(k)[3]
    rng = SplitMix64(k)
    for n in range(2, x.level + 1):
        for h in filtered_horns(n):
            j, m = h.filtered_shape()
            e = project_to_horn(x, h, _random_simplex(x, n, rng))
            v = fill_generalized_horn(x, n, m, j, e)
            assert all(x.face(n, i).apply(v) == e.components[i] for i in h.kept)


def test_closed_form_filler_preconditions():
    x = constant_svs(1, 3)
    h = HornIndex.filtered(3, 1, 2)
    with pytest.raises(InputError):
        fill_generalized_horn(x, 3, 3, 1, HornElement(HornIndex(3, (1,)), {0: (0,), 2: (0,), 3: (0,)}))
    bad = HornElement(h, {0: (1,), 2: (2,)})
    with pytest.raises(PreconditionError):
        fill_generalized_horn(x, 3, 2, 1, bad)
    with pytest.raises(InputError):
        fill_generalized_horn(x.forget_degeneracies(), 3, 2, 1, bad)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.fractions(-3, 3, max_denominator=4))
def test_closed_form_filler_is_linear(seed, c):
    x = corpus_entry(3)[3]
    rng = SplitMix64(seed)
    n = x.level
    h = HornIndex.filtered(n, 1, 2)
    a = project_to_horn(x, h, _random_simplex(x, n, rng))
    b = project_to_horn(x, h, _random_simplex(x, n, rng))
    combo = HornElement(h, {i: tuple(p + c * q for p, q in zip(a.components[i], b.components[i]))
                            for i in h.kept})
    fa, fb = fill_generalized_horn(x, n, 2, 1, a), fill_generalized_horn(x, n, 2, 1, b)
    assert fill_generalized_horn(x, n, 2, 1, combo) == tuple(p + c * q for p, q in zip(fa, fb))


def test_linear_filler_for_ordinary_horns():
    x = corpus_entry(5)[3]
    rng = SplitMix64(1)
    for i in range(4):
        h = HornIndex(3, (i,))
        e = project_to_horn(x, h, _random_simplex(x, 3, rng))
        v = fill_horn_linear(x, 3, i, e)
        assert all(x.face(3, t).apply(v) == e.components[t] for t in h.kept)
    with pytest.raises(InputError):
        fill_horn_linear(x, 3, 0, e)


def test_horn_element_json():
    e = HornElement(HornIndex(2, (1,)), {0: (Fraction(1, 2),), 2: (3,)})
    assert HornElement.from_json(e.to_json()) == e
    with pytest.raises(InputError):
        HornElement(HornIndex(2, (1,)), {0: (1,)})


def test_generalized_kan_on_corpus_member():
    x = corpus_entry(9)[3]
    assert all(check_generalized_kan(x, h) for n in range(2, x.level + 1) for h in filtered_horns(n))
