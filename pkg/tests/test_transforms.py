import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grunbaum.extremal import theorem_bound, theorem_equality_function
from grunbaum.gammafn import GammaFunction
from grunbaum.geomcore import complement, orthonormalize
from grunbaum.polytope import cube, hull
from grunbaum.transforms import (
    affine_majorant,
    affinize,
    coneify,
    compute_beta,
    cone_centroid_decomposition,
    eq8_residual,
    h_tilde,
    lambda0_quotient,
    ratio_from,
    transform_chain,
)
from grunbaum.verify import random_gamma_function


def tent():
    return GammaFunction.from_affine(hull([[-0.5], [1.0]]), [1.0], 1.0, 1.0)


def skewed_q():
    """γ-affine on a skewed triangle, vanishing at its η-extreme vertex, centred."""
    K = hull([[-1, -1], [2, -0.5], [0.5, 1.5]])
    eta = np.array([0.8, 0.6])
    return GammaFunction.from_affine(K, eta, K.support(eta), 1.0).recentered()


E1 = np.array([1.0, 0.0])


# -- ratio_from ---------------------------------------------------------------------

def test_ratio_from_examples():
    sym = GammaFunction.indicator(cube(2, -1, 1))
    assert ratio_from(0.0, sym, E1) == pytest.approx(0.5, abs=1e-14)
    assert ratio_from(0.0, tent(), [1.0]) == pytest.approx(4 / 9, abs=1e-14)
    assert ratio_from(-math.inf, tent(), [1.0]) == 1.0


def test_ratio_from_needs_mass_on_axis():
    f = GammaFunction.indicator(cube(2, 1, 2))
    with pytest.raises(ValueError):
        ratio_from(0.0, f, E1)


# -- β ------------------------------------------------------------------------------

def test_beta_of_tent_is_one():
    assert compute_beta(tent(), [1.0]) == pytest.approx(1.0, abs=1e-14)
    assert eq8_residual(tent(), [1.0], 1.0) == pytest.approx(0.0, abs=1e-14)


@given(st.integers(0, 1000), st.floats(0.2, 5.0))
@settings(max_examples=15)
def test_beta_homogeneity_and_eq8(seed, m):
    f = random_gamma_function(2, 0.8, seed)
    g = GammaFunction(f.cells, f.values, f.gamma, f.scale * m)
    b1, bm = compute_beta(f, E1), compute_beta(g, E1)
    assert bm == pytest.approx(m ** f.gamma * b1, rel=1e-10)
    assert abs(eq8_residual(f, E1, b1)) < 1e-9


def test_beta_rejects_uncentred_input():
    f = GammaFunction.indicator(cube(2, 0.5, 1))
    with pytest.raises(ValueError):
        compute_beta(f, E1)


# -- H-tilde ------------------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_htilde_at_origin_is_f_gamma(seed):
    f = random_gamma_function(2, 1.5, seed)
    beta = compute_beta(f, E1)
    val, _ = h_tilde(f, E1, np.zeros(2), beta)
    assert val == pytest.approx(float(f.evaluate(np.zeros(2))) ** f.gamma, abs=1e-6)


def test_htilde_of_affine_slice_is_its_height():
    # f(x) = (h - βs)^{1/γ} on the slice through o
    T = theorem_equality_function(2, 1.0)
    beta = compute_beta(T, E1)
    assert beta == pytest.approx(1.0, rel=1e-12)
    for y in (0.0, 0.3, -0.5):
        val, _ = h_tilde(T, E1, np.array([0.0, y]), beta)
        assert val == pytest.approx(1.0, abs=1e-9)


def test_htilde_is_midpoint_concave(rng):
    f = random_gamma_function(3, 1.0, seed=6)
    beta = compute_beta(f, np.array([1.0, 0, 0]))
    U = complement(orthonormalize([[1.0, 0, 0]]))
    worst = np.inf
    X = f.random_points(40, rng)
    X = X - np.outer(X[:, 0], [1, 0, 0])
    for x1, x2 in zip(X[:20], X[20:]):
        h1 = h_tilde(f, [1, 0, 0], x1, beta)[0]
        h2 = h_tilde(f, [1, 0, 0], x2, beta)[0]
        hm = h_tilde(f, [1, 0, 0], (x1 + x2) / 2, beta)[0]
        worst = min(worst, hm - (h1 + h2) / 2)
    assert U.dim == 2 and worst >= -1e-7


def test_htilde_spot_check_dominates_tails(rng):
    f = random_gamma_function(2, 1.0, seed=3)
    beta = compute_beta(f, E1)
    x = np.array([0.0, 0.2])
    h, _ = h_tilde(f, E1, x, beta)
    g = f.gamma
    for a in rng.uniform(-1.5, 1.5, 20):
        lhs = f.slice_mass(x, E1, a)
        s_end = h / beta
        rhs = g / (beta * (g + 1)) * max(h - beta * a, 0.0) ** ((g + 1) / g) if a < s_end else 0.0
        assert lhs <= rhs + 1e-8


# -- affine majorant ----------------------------------------------------------------

def test_majorant_recovers_affine_data(rng):
    Y = np.vstack([np.zeros(2), rng.standard_normal((30, 2))])
    L, t = affine_majorant(Y, 1.0 + Y @ [0.3, -0.7])
    assert np.allclose(L, [0.3, -0.7], atol=1e-9) and t <= 1e-9


def test_majorant_of_paraboloid_is_tangent(rng):
    # a ±ε stencil at o pins any supergradient to within ε of the gradient
    eps = 1e-5
    stencil = eps * np.vstack([np.eye(2), -np.eye(2)])
    Y = np.vstack([np.zeros(2), stencil, rng.uniform(-0.5, 0.5, (200, 2))])
    grad = np.array([0.4, -0.2])
    L, _ = affine_majorant(Y, 2.0 + Y @ grad - (Y ** 2).sum(axis=1))
    assert np.allclose(L, grad, atol=1e-4)


def test_majorant_single_sample_and_missing_origin():
    L, t = affine_majorant(np.zeros((1, 2)), [1.0])
    assert np.array_equal(L, np.zeros(2)) and t == 0.0
    with pytest.raises(ValueError):
        affine_majorant([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])


def test_majorant_reports_violation():
    # convex data: no affine function through the centre value dominates
    Y = np.array([[0.0], [1.0], [-1.0]])
    with pytest.raises(ValueError, match="violation"):
        affine_majorant(Y, [0.0, 1.0, 1.0])


# -- affinize -------------------------------------------------------------------------

def test_affinize_fixes_the_equality_function():
    T = theorem_equality_function(2, 1.0)
    A = affinize(T, E1)
    g = np.linspace(-1.2, 1.2, 32)
    X = np.array(np.meshgrid(g, g)).reshape(2, -1).T
    assert np.max(np.abs(A.F.evaluate(X) - T.evaluate(X))) < 1e-6


def test_affinize_tent_is_exact():
    A = affinize(tent(), [1.0])
    X = np.linspace(-1, 1.5, 101)[:, None]
    assert np.max(np.abs(A.F.evaluate(X) - tent().evaluate(X))) < 1e-12
    assert A.beta == pytest.approx(1.0)


@pytest.mark.parametrize("seed", [0, 1])
def test_affinize_postconditions(seed):
    f = random_gamma_function(2, 1.0, seed)
    A = affinize(f, E1)
    c = A.checks
    assert c["htilde_o_error"] < 1e-6
    assert c["majorant_min_gap"] >= -1e-7
    assert c["psi_gap"] >= -1e-9
    assert c["fiber_mass_error"] < 1e-7
    assert c["centroid_axis"] >= -1e-8
    assert c["ratio_F"] <= c["ratio_f"] + 1e-7


def test_affinize_mass_and_centroid_converge_with_the_mesh():
    # K_F is rebuilt from sampled fiber endpoints, so ∫F and the off-axis
    # part of g(F) carry an O(h²) sampling error
    f = random_gamma_function(2, 1.0, seed=1)
    errs = []
    for h in (0.4, 0.2, 0.1, 0.05):
        c = affinize(f, E1, h=h).checks
        errs.append((abs(c["mass_F"] / c["mass_f"] - 1), c["centroid_offaxis"]))
    errs = np.array(errs)
    assert np.all(errs[:-1] / errs[1:] > 2.5)  # better than first order in h
    assert errs[-1, 0] < 2.5e-3 and errs[-1, 1] < 1e-3


# -- coneify ----------------------------------------------------------------------------

def test_coneify_of_equality_function_is_identity():
    T = theorem_equality_function(2, 1.0)
    D = coneify(T, E1)
    assert D.checks["axis_sup_error"] < 1e-12
    assert D.KQ.volume == pytest.approx(T.support.volume, rel=1e-12)
    assert D.checks["ratio_Q"] == pytest.approx(D.checks["ratio_q"], abs=1e-12)


def test_coneify_skewed_triangle():
    q = skewed_q()
    D = coneify(q, E1)
    c = D.checks
    assert float(E1 @ D.eta) > 1e-10 and D.a < 0 < D.b
    assert c["section_dominance_min"] >= -1e-7
    assert c["axis_sup_error"] < 1e-12
    assert c["vertex_error"] < 1e-9
    assert c["centroid_axis"] >= -1e-8 and c["centroid_offaxis"] < 1e-9
    assert 0 < D.lambda0 < 1
    assert c["ratio_Q"] <= c["ratio_q"] + 1e-12
    assert c["ratio_Q"] == pytest.approx(theorem_bound(2, 1.0), abs=1e-9)


def test_lambda0_matches_quotient_of_integrals():
    q = skewed_q()
    D = coneify(q, E1)
    assert lambda0_quotient(D, q) == pytest.approx(D.lambda0, abs=1e-6)


def test_coneify_rejects_wrong_orientation():
    q = skewed_q()
    with pytest.raises(ValueError):
        coneify(q, -E1)


def test_cone_centroid_decomposition_examples():
    # indicator of a cone: g = vertex/(n+1) + n/(n+1)·g(base)
    apex = np.array([0.0, 0.0, 2.0])
    base_pts = np.array([[1, 0, 0], [-1, 1, 0], [-1, -1, 0.0]])
    K = hull(np.vstack([apex, base_pts]))
    lam, res = cone_centroid_decomposition(GammaFunction.indicator(K), apex, hull(base_pts, allow_degenerate=True))
    assert lam == pytest.approx(1 / 4, abs=1e-12) and res < 1e-12
    # balanced equality cone: centroid at o
    T = theorem_equality_function(2, 1.0)
    lam, res = cone_centroid_decomposition(T, T.apex, T.base)
    g = lam * T.apex + (1 - lam) * T.base.centroid
    assert np.linalg.norm(g) < 1e-12 and res < 1e-6


def test_cone_centroid_decomposition_rejects_non_cone():
    with pytest.raises(ValueError):
        cone_centroid_decomposition(GammaFunction.indicator(cube(2)), [0, 0],
                                    hull([[0, 1.0], [1, 1.0]], allow_degenerate=True))


# -- the chain ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,seed", [(2, 0), (2, 1), (2, 2), (3, 0)])
def test_chain_is_monotone_and_above_bound(n, seed):
    f = random_gamma_function(n, 1.0, seed)
    theta = np.eye(n)[0]
    r0, r1, r2 = transform_chain(f, theta).ratios
    assert r0 >= r1 - 1e-7 >= r2 - 2e-7
    assert r2 >= theorem_bound(n, 1.0) - 1e-6
