import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import special_ortho_group

from grunbaum.extremal import (
    BoundSpec,
    ball_sections_data,
    closed_form_centroid,
    cone_function,
    corollary_equality_function,
    functional_bound,
    grunbaum_bound,
    polytopal_sections_data,
    projections_equality_body,
    sections_equality_body,
    theorem_bound,
    theorem_equality_function,
)
from grunbaum.gammafn import GammaFunction, halfspace_mass_ratio
from grunbaum.geomcore import Subspace, complement, span_with
from grunbaum.polytope import hull, projection_ratio, section_ratio
from grunbaum.transforms import ratio_from


# -- constants -----------------------------------------------------------------------

def test_grunbaum_bound_examples():
    assert grunbaum_bound(2, 2) == pytest.approx(4 / 9)
    assert grunbaum_bound(3, 2) == pytest.approx(1 / 4)
    for n in range(1, 7):
        assert grunbaum_bound(n, 1) == pytest.approx(1 / (n + 1))


@pytest.mark.parametrize("n,k", [(2, 0), (2, 3), (0, 0)])
def test_bounds_reject_bad_dimensions(n, k):
    with pytest.raises(ValueError):
        grunbaum_bound(n, k)
    with pytest.raises(ValueError):
        BoundSpec(n, k)


@pytest.mark.parametrize("gamma", [0.0, -1.0])
def test_bounds_reject_nonpositive_gamma(gamma):
    with pytest.raises(ValueError):
        functional_bound(2, 1, gamma)
    with pytest.raises(ValueError):
        theorem_bound(2, gamma)


def test_functional_bound_examples():
    assert theorem_bound(1, 1.0) == pytest.approx(4 / 9, abs=1e-15)
    assert functional_bound(3, 2, 1.0) == pytest.approx(0.216, abs=1e-15)
    assert theorem_bound(2, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert theorem_bound(3, 1.0) == pytest.approx(0.16, abs=1e-15)
    # log-concave limit e^{-n}
    assert theorem_bound(3, 1e-3) == pytest.approx(math.exp(-3), rel=1e-2)
    assert BoundSpec(3, 2, 1.0).value == functional_bound(3, 2, 1.0)


def test_large_gamma_limit_is_grunbaum():
    for n in range(1, 6):
        for k in range(1, n + 1):
            assert functional_bound(n, k, 1e6) == pytest.approx(grunbaum_bound(n, k), abs=1e-4)
            assert functional_bound(n, k, math.inf) == grunbaum_bound(n, k)


def test_theorem_bound_is_functional_bound_at_k_one():
    for n in range(1, 9):
        for gamma in np.geomspace(1e-3, 1e3, 25):
            assert abs(theorem_bound(n, gamma) - functional_bound(n, 1, gamma)) < 1e-12


@given(st.integers(1, 6), st.floats(0.01, 100))
def test_bound_decreases_in_n(n, gamma):
    assert functional_bound(n + 1, 1, gamma) < functional_bound(n, 1, gamma)


# -- cone functions and centroids -----------------------------------------------------------

def test_closed_form_centroid_examples():
    assert closed_form_centroid(2, 1.0, -1.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert closed_form_centroid(2, 1.0, 0.0, 1.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        closed_form_centroid(2, 1.0, 1.0, 1.0)


def test_closed_form_centroid_matches_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        gamma = float(rng.uniform(0.2, 4.0))
        r0 = float(rng.uniform(-2, 0.5))
        r1 = r0 + float(rng.uniform(0.3, 2))
        T = cone_function(n, gamma, np.eye(n)[0], np.eye(n)[0], 1.0, r0, r1)
        assert T.fn_centroid()[0] == pytest.approx(closed_form_centroid(n, gamma, r0, r1), abs=1e-6)
        m_beta, mom = T.beta_moments()
        assert mom[0] / m_beta == pytest.approx(closed_form_centroid(n, gamma, r0, r1), abs=1e-10)


def test_theorem_equality_function_one_dimensional():
    T = theorem_equality_function(1, 1.0)
    assert np.allclose(sorted(T.support.vertices[:, 0]), [-0.5, 1.0])
    assert ratio_from(0.0, T, [1.0]) == pytest.approx(4 / 9, abs=1e-14)


@pytest.mark.parametrize("n,gamma", [(2, 1.0), (3, 0.5), (4, 2.0), (2, math.e)])
def test_theorem_equality_function_attains_bound(n, gamma):
    T = theorem_equality_function(n, gamma)
    assert np.linalg.norm(T.fn_centroid()) < 1e-6
    assert ratio_from(0.0, T, np.eye(n)[0]) == pytest.approx(theorem_bound(n, gamma), abs=1e-6)


def test_theorem_equality_function_with_tilted_form():
    n = 3
    theta = np.eye(n)[0]
    xi = np.array([0.8, 0.6, 0.0])
    D = hull(np.array([[-0.6, 0.8, 0.0], [0.6, -0.8, 0.0], [0, 0, 1.0], [0, 0, -1.0]]), allow_degenerate=True)
    T = theorem_equality_function(n, 1.5, theta=theta, xi=xi, m=2.0, r=0.7, D=D)
    assert np.linalg.norm(T.fn_centroid()) < 1e-6
    assert ratio_from(0.0, T, theta) == pytest.approx(theorem_bound(n, 1.5), abs=1e-6)


def test_cone_function_validation():
    with pytest.raises(ValueError):
        cone_function(2, 1.0, [1, 0], [-1, 0], 1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        cone_function(2, 1.0, [1, 0], [1, 0], 1.0, 1.0, 0.0)
    off_centre = hull([[0, 0.0], [0, 2.0]], allow_degenerate=True)
    with pytest.raises(ValueError):
        cone_function(2, 1.0, [1, 0], [1, 0], 1.0, -1.0, 1.0, D=off_centre)


# -- equality bodies ------------------------------------------------------------------------

def test_sections_equality_body_plane_triangle():
    # n = k = 2, z = (1/3)e1: conv(-(2/3)e1 + D0, (1/3)e1) is the plane equality triangle
    z = np.array([1 / 3, 0.0])
    D0 = np.array([[0.0, 1.0], [0.0, -1.0]])
    K = sections_equality_body(2, 2, z, D0, np.zeros((1, 2)))
    E = Subspace.full(2)
    assert np.linalg.norm(K.centroid) < 1e-12
    assert section_ratio(K, E, [1.0, 0.0]) == pytest.approx(4 / 9, abs=1e-12)


@pytest.mark.parametrize("n,k", [(3, 2), (3, 1), (4, 2), (4, 3), (3, 3)])
def test_polytopal_sections_body_attains_bound(n, k):
    for rng in (None, np.random.default_rng(n * 10 + k)):
        K, E, theta = polytopal_sections_data(n, k, rng=rng)
        Et = span_with(theta, complement(E))
        assert np.linalg.norm(K.centroid @ Et.basis.T) < 1e-6  # g(K) ∈ Ẽ^⊥
        assert section_ratio(K, E, theta) == pytest.approx(grunbaum_bound(n, k), abs=1e-6)


def test_sections_body_is_rotation_covariant():
    R = special_ortho_group.rvs(3, random_state=3)
    K, E, theta = ball_sections_data(3, 2, M=64, R=R)
    assert section_ratio(K, E, theta) == pytest.approx(0.25, abs=5e-3)


@pytest.mark.parametrize("kw,err", [
    (dict(D0=np.zeros((1, 3))), "D0"),
    (dict(D1=np.array([[0, 0, 1.0], [0, 0, 3.0]])), "centred"),
])
def test_sections_equality_body_validation(kw, err):
    args = dict(z=[1.0, 0, 0], D0=np.array([[0, 1.0, 0], [0, -1.0, 0]]),
                D1=np.array([[0, 0, 1.0], [0, 0, -1.0]]))
    args.update(kw)
    with pytest.raises(ValueError, match=err):
        sections_equality_body(3, 2, **args)


def test_projection_body_examples():
    K, E, theta = projections_equality_body(2, 1)
    assert projection_ratio(K, E, theta) == pytest.approx(1 / 3, abs=1e-12)
    K, E, theta = projections_equality_body(3, 2, M=64)
    assert projection_ratio(K, E, theta) == pytest.approx(0.25, abs=5e-3)
    assert np.linalg.norm(K.centroid) < 1e-9


@pytest.mark.parametrize("n,k", [(3, 1), (3, 2), (3, 3), (4, 2)])
def test_ball_approximant_bodies_converge(n, k):
    errs = {}
    for M in (64, 256):
        K, E, theta = ball_sections_data(n, k, M)
        errs[M] = abs(section_ratio(K, E, theta) - grunbaum_bound(n, k))
        P, Ep, tp = projections_equality_body(n, k, M=M)
        errs[M] = max(errs[M], abs(projection_ratio(P, Ep, tp) - grunbaum_bound(n, k)))
    assert errs[64] < 5e-3
    assert errs[256] <= errs[64] + 1e-12


# -- corollary equality functions --------------------------------------------------------------

@pytest.mark.parametrize("n,k,gamma", [(3, 2, 1.0), (2, 1, 1.0), (3, 3, 0.5), (4, 2, 2.0)])
def test_corollary_equality_function(n, k, gamma):
    f, E, theta = corollary_equality_function(n, k, gamma, M=64)
    assert halfspace_mass_ratio(f, E, theta) == pytest.approx(functional_bound(n, k, gamma), abs=5e-3)
    assert np.linalg.norm(f.fn_centroid()) < 1e-4


def test_corollary_with_k_equal_n_reduces_to_theorem_data():
    # the 1-D marginal along θ of the k = n equality function is a tent with
    # exponent (n-1) + 1/γ whose apex sits where the one-dimensional equality function of that exponent has it
    n, gamma = 3, 1.0
    f, E, theta = corollary_equality_function(n, n, gamma, M=64)
    from grunbaum.gammafn import marginal, marginal_gamma

    F = marginal(f, Subspace(n, [theta]))
    g1 = marginal_gamma(gamma, n)
    T = theorem_equality_function(1, g1)
    s = np.linspace(-1.2, 1.2, 49)[:, None]
    exact = np.array([F.exact(y) for y in s])
    assert np.allclose(exact, T.evaluate(s), atol=1e-9)


def test_corollary_function_rejects_bad_k():
    with pytest.raises(ValueError):
        corollary_equality_function(2, 3, 1.0)
