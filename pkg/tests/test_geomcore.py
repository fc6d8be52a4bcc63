import numpy as np
import pytest
from hypothesis import given, strategies as st

from grunbaum.geomcore import (
    DimensionError,
    Subspace,
    as_vector,
    complement,
    coords_in,
    lift,
    orthonormalize,
    project_point,
    random_subspace,
    same_subspace,
    span_with,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)


def test_orthonormalize_axis_pair():
    E = orthonormalize([[1, 0], [1, 1]])
    assert np.allclose(E.basis, np.eye(2))


def test_orthonormalize_single_vector_in_r3():
    E = orthonormalize([[1, 0, 0]])
    assert E.dim == 1
    assert np.allclose(E.basis, [[1, 0, 0]])


def test_orthonormalize_dependent_pair_collapses():
    v = np.array([1.0, 2.0, 2.0])
    E = orthonormalize([v, 2 * v])
    assert E.dim == 1
    assert np.allclose(np.abs(E.basis[0]), v / 3)


@pytest.mark.parametrize("bad", [[], [[0.0, 0.0], [0.0, 0.0]]])
def test_orthonormalize_rejects_empty_or_zero(bad):
    with pytest.raises(ValueError):
        orthonormalize(bad)


def test_complement_examples():
    E = Subspace(3, np.eye(3)[:2])
    assert same_subspace(complement(E), Subspace(3, [[0, 0, 1]]))
    assert same_subspace(complement(Subspace(2, [[1, 0]])), Subspace(2, [[0, 1]]))
    assert complement(Subspace.full(3)).dim == 0


def test_project_point_examples():
    E = Subspace(3, np.eye(3)[:2])
    assert np.allclose(project_point([1, 2, 3], E), [1, 2, 0])
    x = np.array([0.3, -1.2, 4.0])
    assert np.allclose(project_point(x, Subspace.full(3)), x)


def test_project_point_dimension_mismatch():
    with pytest.raises(DimensionError):
        project_point([1, 2], Subspace(3, np.eye(3)[:1]))


def test_coords_in_examples():
    E = orthonormalize([[1, 1]])
    c = coords_in([1, 1], E)
    assert np.allclose(np.abs(c), [np.sqrt(2)])
    assert np.allclose(coords_in([0, 0], E), [0])
    with pytest.raises(ValueError):
        coords_in([1, 0], E)


def test_span_with_examples():
    e = np.eye(3)
    assert same_subspace(span_with(e[0], Subspace(3, [e[2]])), Subspace(3, [e[0], e[2]]))
    # Ẽ = span(E^⊥, θ) for E = span(e1, e2), θ = e1
    Et = span_with(e[0], complement(Subspace(3, e[:2])))
    assert Et.dim == 2 and same_subspace(Et, Subspace(3, [e[0], e[2]]))
    E = Subspace(3, e[:2])
    assert same_subspace(span_with(e[0], E), E)


def test_as_vector_rejects_nonfinite_and_empty():
    with pytest.raises(ValueError):
        as_vector([np.nan, 1.0])
    with pytest.raises(DimensionError):
        as_vector([])


@given(seeds, dims, st.data())
def test_subspace_invariants(seed, n, data):
    k = data.draw(st.integers(0, n))
    rng = np.random.default_rng(seed)
    E = random_subspace(n, k, rng)
    C = complement(E)
    assert E.orthonormality_defect() < 1e-12
    assert C.orthonormality_defect() < 1e-12
    assert E.dim + C.dim == n
    if k and n - k:
        assert np.max(np.abs(E.basis @ C.basis.T)) < 1e-12
    assert same_subspace(complement(C), E) if k else complement(C).dim == 0


@given(seeds, dims, st.data())
def test_projection_is_idempotent_contraction(seed, n, data):
    k = data.draw(st.integers(1, n))
    rng = np.random.default_rng(seed)
    E = random_subspace(n, k, rng)
    x = rng.standard_normal(n)
    px = project_point(x, E)
    assert np.linalg.norm(project_point(px, E) - px) < 1e-12
    assert np.linalg.norm(px) <= np.linalg.norm(x) + 1e-12


def test_coords_lift_round_trip(rng):
    E = random_subspace(4, 2, rng)
    pts = rng.standard_normal((100, 2)) @ E.basis
    for x in pts:
        assert np.linalg.norm(lift(coords_in(x, E), E) - x) < 1e-10
