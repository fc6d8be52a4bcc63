import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grunbaum.extremal import projections_equality_body
from grunbaum.geomcore import Subspace, complement, random_subspace, span_with
from grunbaum.polytope import (
    DegenerateError,
    Halfspace,
    VPolytope,
    ball_points,
    clip,
    clip_measure,
    cube,
    halfspace_fraction,
    halfspace_fractions,
    hull,
    project,
    projection_ratio,
    section,
    section_profile,
    section_volume,
    standard_simplex,
    steiner_symmetrize,
    theta_plus,
    unit_ball_volume,
)
from grunbaum.verify import mc_oracle

from conftest import equality_triangle, random_polytope

seeds = st.integers(0, 2**32 - 1)


# -- hull ---------------------------------------------------------------------

def test_hull_drops_interior_point():
    pts = np.vstack([cube(3).vertices, [[0.5, 0.5, 0.5]]])
    P = hull(pts)
    assert len(P.vertices) == 8 and P.dim == 3


def test_hull_collinear_points_give_segment():
    P = hull([[0, 0], [1, 1], [2, 2]])
    assert P.dim == 1 and len(P.vertices) == 2
    assert P.volume == pytest.approx(2 * math.sqrt(2))


@pytest.mark.parametrize("pts", [[[1.0, 2.0]], [[1.0, 1.0], [1.0, 1.0]]])
def test_hull_rejects_single_or_coincident_points(pts):
    with pytest.raises(DegenerateError):
        hull(pts)


def test_hull_of_ball_samples_is_inside_the_ball(rng):
    X = rng.standard_normal((50, 3))
    X *= (rng.uniform(size=50) ** (1 / 3) / np.linalg.norm(X, axis=1))[:, None]
    P = hull(X)
    assert np.all(np.linalg.norm(P.vertices, axis=1) <= 1 + 1e-12)
    assert P.volume <= unit_ball_volume(3)
    est, sig = mc_oracle(P, "volume", 200_000, seed=1)
    assert abs(est - P.volume) <= 4 * sig


@given(seeds, st.integers(1, 4))
def test_triangulation_volumes_positive_and_sum(seed, n):
    P = random_polytope(np.random.default_rng(seed), n)
    assert np.all(P.simplex_volumes > 1e-14)
    assert P.simplex_volumes.sum() == pytest.approx(P.volume, rel=1e-9)


# -- clip ----------------------------------------------------------------------

def test_clip_cube_half():
    Q = clip(cube(3), Halfspace(np.array([1.0, 0, 0]), 0.5))
    assert Q.volume == pytest.approx(0.5, rel=1e-12)


def test_clip_keeps_polytope_inside_halfspace():
    P = cube(2)
    assert clip(P, Halfspace(np.array([1.0, 0]), -1.0)) is P


def test_clip_empty_result_is_a_value():
    Q = clip(cube(2), Halfspace(np.array([1.0, 0]), 2.0))
    assert Q.is_empty and Q.volume == 0.0


def test_equality_triangle_halves():
    # Grünbaum's equality cone in the plane: area 4/9 on the apex-free side
    T = equality_triangle()
    assert T.volume == pytest.approx(1.0, rel=1e-14)
    assert clip(T, theta_plus([1, 0])).volume == pytest.approx(4 / 9, rel=1e-12)
    assert np.allclose(T.centroid, 0, atol=1e-15)


@given(seeds, st.integers(1, 4))
def test_clip_partition(seed, n):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, n)
    H = Halfspace(rng.standard_normal(n), rng.normal() * 0.5)
    a, b = clip(P, H).volume, clip(P, H.flipped()).volume
    assert a + b == pytest.approx(P.volume, rel=1e-9)
    v, mom = clip_measure(P, H)
    assert v == pytest.approx(a, rel=1e-9, abs=1e-12)
    if a > 1e-9:
        assert np.allclose(mom / v, clip(P, H).centroid, atol=1e-9)


def test_batched_fractions_match_single(rng):
    P = random_polytope(rng, 3)
    U = rng.standard_normal((16, 3))
    assert np.allclose(halfspace_fractions(P, U), [halfspace_fraction(P, u) for u in U], atol=1e-14)


# -- section -------------------------------------------------------------------

def test_section_of_cube_is_square():
    S = section(cube(3), [0, 0, 0.5], Subspace(3, np.eye(3)[:2]))
    assert S.dim == 2 and S.volume == pytest.approx(1.0, rel=1e-12)


def test_section_of_cube_is_regular_hexagon():
    n = np.ones(3) / math.sqrt(3)
    W = complement(Subspace(3, [n]))
    S = section(cube(3), [0.5, 0.5, 0.5], W)
    assert len(S.vertices) == 6
    assert S.volume == pytest.approx(3 * math.sqrt(3) / 4, rel=1e-12)
    est, sig = mc_oracle(cube(3), "fiber", 200_000, seed=3, point=[0.5, 0.5, 0.5], subspace=W)
    assert abs(est - S.volume) < 0.01 * S.volume


def test_section_through_a_vertex_is_a_point():
    W = complement(Subspace(3, [np.ones(3) / math.sqrt(3)]))
    S = section(cube(3), [0, 0, 0], W)
    assert S.dim == 0 and S.volume == 0.0


def test_section_missing_the_body_is_empty():
    S = section(cube(2), [0, 5], Subspace(2, [[1, 0]]))
    assert S.is_empty


# -- volume / centroid ---------------------------------------------------------

def test_cube_and_triangle_measures():
    C = cube(3)
    assert C.volume == pytest.approx(1.0) and np.allclose(C.centroid, 0.5)
    T = standard_simplex(2)
    assert T.volume == pytest.approx(0.5) and np.allclose(T.centroid, [1 / 3, 1 / 3])


def test_centroid_of_empty_polytope_is_an_error():
    E = clip(cube(2), Halfspace(np.array([1.0, 0]), 3.0))
    with pytest.raises(ValueError):
        E.centroid


@given(seeds, st.integers(1, 4))
def test_translation_equivariance_and_centroid_inside(seed, n):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, n)
    t = rng.standard_normal(n)
    assert np.allclose(P.translate(t).centroid, P.centroid + t, atol=1e-10)
    assert P.contains(P.centroid[None])[0]


@pytest.mark.parametrize("n", [3, 4])
def test_volume_and_centroid_match_monte_carlo(n):
    P = random_polytope(np.random.default_rng(n), n)
    v, sv = mc_oracle(P, "volume", 10**6, seed=5)
    g, sg = mc_oracle(P, "centroid", 10**6, seed=6)
    assert abs(v - P.volume) <= 4 * sv
    assert np.all(np.abs(g - P.centroid) <= 4 * sg)


# -- support / radial ----------------------------------------------------------

def test_support_of_centred_cube():
    assert cube(3, -1, 1).support([1, 0, 0]) == pytest.approx(1.0)


def test_support_equality_cone():
    # conv(-(2/3)θ + B^1, (1/3)θ) in the plane: h(θ)/(h(θ)+h(-θ)) = 1/(n+1)
    K = hull([[-2 / 3, -1], [-2 / 3, 1], [1 / 3, 0]])
    hp, hm = K.support([1, 0]), K.support([-1, 0])
    assert hp == pytest.approx(1 / 3) and hm == pytest.approx(2 / 3)
    assert hp / (hp + hm) == pytest.approx(1 / 3, abs=1e-12)


def test_radial_of_ball_approximant(rng):
    P = hull(ball_points(2, 64))
    for u in rng.standard_normal((10, 2)):
        assert P.radial(u / np.linalg.norm(u)) == pytest.approx(1.0, abs=5e-3)


def test_radial_needs_interior_origin():
    with pytest.raises(ValueError):
        cube(2).radial([1, 0])


@given(seeds, st.integers(2, 4), st.floats(0.1, 10))
def test_support_is_homogeneous_width(seed, n, s):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, n)
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    assert P.support(s * u) == pytest.approx(s * P.support(u), rel=1e-12)
    width = np.ptp(P.vertices @ u)
    assert P.support(u) + P.support(-u) == pytest.approx(width, rel=1e-12)


# -- projection ------------------------------------------------------------------

def test_projection_examples():
    assert project(cube(3), Subspace(3, np.eye(3)[:2])).volume == pytest.approx(1.0)
    seg = project(standard_simplex(3), Subspace(3, [[1, 0, 0]]))
    assert seg.dim == 1 and np.allclose(sorted(seg.vertices[:, 0]), [0, 1])


def test_projection_equality_body_ratio():
    K, E, theta = projections_equality_body(3, 2, M=64)
    assert projection_ratio(K, E, theta) == pytest.approx(0.25, abs=5e-3)
    assert np.linalg.norm(K.centroid) < 1e-12


# -- Steiner symmetrization ---------------------------------------------------------

def test_steiner_symmetric_cube_has_constant_radius():
    K = cube(3, -1, 1)
    St = steiner_symmetrize(K, Subspace(3, np.eye(3)[:2]), h=0.5)
    inner = np.all(np.abs(St.mesh_points) < 1 - 1e-9, axis=1)
    assert np.ptp(St.radii[inner]) < 1e-12


def test_steiner_slice_by_E_is_projection_halves(rng):
    # K̃ ∩ E is the projection K|E, so both have the same area on θ⁺
    K = random_polytope(rng, 3)
    K = K.translate(-K.centroid)
    E = Subspace(3, np.eye(3)[:2])
    St = steiner_symmetrize(K, E, h=0.2)
    base = project(K, E)
    sl = St.slice_by_base()
    assert sl.volume == pytest.approx(base.volume, rel=1e-9)
    theta = theta_plus([1.0, 0.0])
    assert clip(sl, theta).volume == pytest.approx(clip(base, theta).volume, rel=1e-9)


def test_steiner_preserves_volume(rng):
    K = random_polytope(rng, 3)
    St = steiner_symmetrize(K, Subspace(3, np.eye(3)[:2]), h=0.3)
    assert St.volume(q=6) == pytest.approx(K.volume, rel=1e-2)


def test_steiner_rejects_full_subspace():
    with pytest.raises(ValueError):
        steiner_symmetrize(cube(2), Subspace.full(2))


# -- section function -------------------------------------------------------------

def test_section_profile_k_equals_n_is_slice_function(rng):
    K = random_polytope(rng, 3)
    theta = np.array([1.0, 0, 0])
    A = section_profile(K, theta, Subspace.full(3), h=0.1)
    assert A.gamma == pytest.approx(0.5)
    Kc = K.translate(-(K.centroid @ theta) * theta)
    t = A.cells[0, 0, 0]
    direct = section_volume(Kc, t * theta, complement(Subspace(3, [theta])))
    assert A.values[0, 0] ** 2 == pytest.approx(direct, rel=1e-9)


def test_section_profile_matches_direct_fibers_and_is_centred():
    K = standard_simplex(3)
    E = Subspace(3, np.eye(3)[:2])
    theta = np.array([1.0, 0, 0])
    A = section_profile(K, theta, E, h=0.1)
    Et = span_with(theta, complement(E))
    Kc = K.translate(-(K.centroid @ Et.basis.T) @ Et.basis)
    fiber = complement(Et)
    Y = A.cells.reshape(-1, 2)
    direct = np.array([section_volume(Kc, y @ Et.basis, fiber) for y in Y])
    assert np.allclose(A.values.reshape(-1), direct, atol=1e-12)
    # the centroid of the section function is g(K)|Ẽ = o; the sampled interpolant gets it to O(h²)
    assert np.linalg.norm(A.fn_centroid()) < 5e-3


def test_brunn_minkowski_midpoint_concavity(rng):
    K = random_polytope(rng, 3)
    theta = rng.standard_normal(3)
    theta /= np.linalg.norm(theta)
    W = complement(Subspace(3, [theta]))
    lo, hi = -K.support(-theta), K.support(theta)
    worst = np.inf
    for _ in range(50):
        s, t = rng.uniform(lo, hi, 2)
        A = lambda x: section_volume(K, x * theta, W) ** 0.5  # noqa: E731
        worst = min(worst, A((s + t) / 2) - (A(s) + A(t)) / 2)
    assert worst >= -1e-8


# -- JSON -------------------------------------------------------------------------

def test_json_round_trip_is_bit_exact(rng):
    P = random_polytope(rng, 3)
    Q = VPolytope.from_json(P.to_json())
    assert json.loads(P.to_json())["n"] == 3
    assert np.array_equal(np.sort(Q.vertices, axis=0), np.sort(P.vertices, axis=0))
