"""Sharp constants and the bodies/functions that attain them.

All constructors work in a standard frame — θ = e1, E = span(e1, ..., e_k),
so Ẽ^⊥ = E ∩ θ^⊥ = span(e2, ..., e_k) and E^⊥ = span(e_{k+1}, ..., e_n) —
optionally followed by an orthogonal map ``R`` applied to everything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gammafn import ConeAffineFunction, GammaFunction
from .geomcore import Subspace, as_vector, complement, orthonormalize, unit
from .polytope import VPolytope, ball_in, hull


def _check_nk(n: int, k: int) -> None:
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise ValueError("gamma must be positive")


def grunbaum_bound(n: int, k: int) -> float:
    """(k/(n+1))^k."""
    _check_nk(n, k)
    return (k / (n + 1)) ** k


def functional_bound(n: int, k: int, gamma: float) -> float:
    """((kγ+1)/((n+1)γ+1))^((kγ+1)/γ); γ = inf gives the body constant."""
    _check_nk(n, k)
    _check_gamma(gamma)
    if math.isinf(gamma):
        return grunbaum_bound(n, k)
    return ((k * gamma + 1) / ((n + 1) * gamma + 1)) ** ((k * gamma + 1) / gamma)


def theorem_bound(n: int, gamma: float) -> float:
    """((γ+1)/(γn+γ+1))^((γ+1)/γ), the one-dimensional case k = 1."""
    _check_gamma(gamma)
    if math.isinf(gamma):
        return 1.0 / (n + 1)
    return ((gamma + 1) / (gamma * n + gamma + 1)) ** ((gamma + 1) / gamma)


@dataclass(frozen=True)
class BoundSpec:
    n: int
    k: int = 1
    gamma: float = math.inf

    def __post_init__(self):
        _check_nk(self.n, self.k)
        _check_gamma(self.gamma)

    @property
    def value(self) -> float:
        return functional_bound(self.n, self.k, self.gamma)


def closed_form_centroid(n: int, gamma: float, r0: float, r1: float) -> float:
    """θ-coordinate of the centroid of the cone function with apex r0θ and base at r1θ."""
    if r0 >= r1:
        raise ValueError("need r0 < r1")
    _check_gamma(gamma)
    return (n * gamma * r1 + (gamma + 1) * r0) / ((n + 1) * gamma + 1)


# ---------------------------------------------------------------------------
# frames


def standard_frame(n: int, k: int, R=None) -> tuple[Subspace, np.ndarray]:
    """(E, θ) = (span(e1..ek), e1), rotated by R if given."""
    _check_nk(n, k)
    R = np.eye(n) if R is None else np.asarray(R, dtype=float)
    return Subspace(n, np.eye(n)[:k] @ R.T), R[:, 0].copy()


def _coordinate(n: int, axes, R) -> Subspace:
    R = np.eye(n) if R is None else np.asarray(R, dtype=float)
    return Subspace(n, np.eye(n)[list(axes)] @ R.T)


def _rotate(points, R):
    return points if R is None else np.asarray(points) @ np.asarray(R, dtype=float).T


# ---------------------------------------------------------------------------
# cone-affine functions


def cone_function(n: int, gamma: float, theta, xi, m: float, r0: float, r1: float, D: VPolytope | None = None):
    """m·(r1<θ,ξ> - <x,ξ>)^{1/γ} on conv(r0θ, r1θ + D), D a centred body in ξ^⊥.

    ``D`` defaults to the cube [-1, 1]^{n-1} in ξ^⊥.
    """
    _check_gamma(gamma)
    theta = unit(as_vector(theta, n))
    xi = unit(as_vector(xi, n))
    if theta @ xi <= 0:
        raise ValueError("need <θ, ξ> > 0")
    if r0 >= r1:
        raise ValueError("need r0 < r1")
    W = complement(orthonormalize([xi]))
    if D is None:
        if n == 1:
            Dpts = np.zeros((1, 1))
        else:
            cube = np.array(np.meshgrid(*[[-1.0, 1.0]] * (n - 1), indexing="ij")).reshape(n - 1, -1).T
            Dpts = cube @ W.basis
    else:
        Dpts = np.asarray(D.vertices, dtype=float)
        if np.max(np.abs(Dpts @ xi)) > 1e-9:
            raise ValueError("D must lie in the hyperplane orthogonal to ξ")
        if n > 1 and np.linalg.norm(D.centroid) > 1e-9:
            raise ValueError("D must be centred")
    apex = r0 * theta
    base_pts = r1 * theta + Dpts
    K = hull(np.vstack([apex, base_pts]))
    base = hull(base_pts, allow_degenerate=True)
    return ConeAffineFunction(K, gamma, m, xi, r1, theta, apex=apex, base=base)


def theorem_equality_function(n: int, gamma: float, theta=None, xi=None, m: float = 1.0, r: float = 1.0,
                              D: VPolytope | None = None) -> ConeAffineFunction:
    """Equality case of the one-dimensional bound: apex at -(nγ/(γ+1)) r θ."""
    theta = np.eye(n)[0] if theta is None else theta
    xi = theta if xi is None else xi
    if r <= 0:
        raise ValueError("need r > 0")
    return cone_function(n, gamma, theta, xi, m, -(n * gamma / (gamma + 1)) * r, r, D)


# ---------------------------------------------------------------------------
# equality bodies


def sections_equality_body(n: int, k: int, z, D0, D1) -> VPolytope:
    """conv(-((n-k+1)/k) z + D0, z + D1) from ambient vertex arrays D0, D1.

    D0 is (k-1)-dimensional in E ∩ θ^⊥, D1 is (n-k)-dimensional and centred.
    """
    _check_nk(n, k)
    z = as_vector(z, n)
    D0 = np.atleast_2d(np.asarray(D0, dtype=float)).reshape(-1, n)
    D1 = np.atleast_2d(np.asarray(D1, dtype=float)).reshape(-1, n)
    for D, dim, name in ((D0, k - 1, "D0"), (D1, n - k, "D1")):
        rank = 0 if len(D) < 2 else int(np.linalg.matrix_rank(D - D.mean(axis=0), tol=1e-9))
        if rank != dim:
            raise ValueError(f"{name} must be {dim}-dimensional, got {rank}")
    if n - k >= 1:
        g1 = hull(D1).centroid
        if np.linalg.norm(g1) > 1e-9:
            raise ValueError("D1 must be centred")
    elif np.linalg.norm(D1) > 1e-12:
        raise ValueError("D1 must be the origin when k = n")
    return hull(np.vstack([-((n - k + 1) / k) * z + D0, z + D1]))


def polytopal_sections_data(n: int, k: int, R=None, rng: np.random.Generator | None = None):
    """(K, E, θ) for a polytopal equality body of the sections bound.

    D0 is a simplex in span(e2..ek) (deliberately not centred), D1 a centred
    cross-polytope in span(e_{k+1}..e_n); both randomised when ``rng`` is given.
    """
    E, theta = standard_frame(n, k, R)
    e = np.eye(n)
    if rng is None:
        z = e[0]
        D0 = np.vstack([np.zeros(n), e[1:k]]) if k > 1 else np.zeros((1, n))
        D1 = np.vstack([e[k:], -e[k:]]) if k < n else np.zeros((1, n))
    else:
        z = e[0] * rng.uniform(0.5, 2.0) + (e[1:k].T @ rng.normal(size=k - 1) if k > 1 else 0)
        D0 = np.vstack([np.zeros(n), (e[1:k].T @ rng.normal(size=(k - 1, k - 1))).T]) if k > 1 else np.zeros((1, n))
        if k < n:
            B = e[k:].T @ rng.normal(size=(n - k, n - k))
            D1 = np.vstack([B.T, -B.T])
        else:
            D1 = np.zeros((1, n))
    K = sections_equality_body(n, k, _rotate(z, R), _rotate(D0, R), _rotate(D1, R))
    return K, E, theta


def ball_sections_data(n: int, k: int, M: int | None = None, R=None):
    """(K, E, θ) with D0, D1 volume-matched ball approximants and z = θ."""
    E, theta = standard_frame(n, k, R)
    D0 = ball_in(_coordinate(n, range(1, k), R), M) if k > 1 else np.zeros((1, n))
    D1 = ball_in(_coordinate(n, range(k, n), R), M) if k < n else np.zeros((1, n))
    return sections_equality_body(n, k, theta, D0, D1), E, theta


def projections_equality_body(n: int, k: int, theta=None, M: int | None = None, R=None):
    """conv(-(1-k/(n+1))θ + B^{k-1}, (k/(n+1))θ + B^{n-k}) and its (E, θ).

    B^{k-1} sits in E ∩ θ^⊥ and B^{n-k} in E^⊥; both are ball approximants.
    If ``theta`` is given, R is completed from it.
    """
    _check_nk(n, k)
    if theta is not None and R is None:
        theta = unit(as_vector(theta, n))
        R = np.column_stack([theta, complement(orthonormalize([theta])).basis.T])
    E, th = standard_frame(n, k, R)
    B0 = ball_in(_coordinate(n, range(1, k), R), M) if k > 1 else np.zeros((1, n))
    B1 = ball_in(_coordinate(n, range(k, n), R), M) if k < n else np.zeros((1, n))
    K = hull(np.vstack([-(1 - k / (n + 1)) * th + B0, (k / (n + 1)) * th + B1]))
    return K, E, th


def corollary_apex(n: int, k: int, gamma: float) -> float:
    """Distance of the lower apex from o: (n-k+1)γ/(kγ+1)."""
    return (n - k + 1) * gamma / (k * gamma + 1)


def corollary_equality_function(n: int, k: int, gamma: float, M: int | None = None, R=None):
    """(f, E, θ): f = (1 - <x,θ>)^{1/γ} on conv(-cθ + δB^{k-1}, θ + B^{n-k}).

    c = (n-k+1)γ/(kγ+1) and δ = (c+1)·vol(B^{k-1})^{-1/(k-1)}, so that every
    fiber of the support over y ∈ Ẽ has (k-1)-volume (1 - <y,θ>)^{k-1}.
    """
    _check_nk(n, k)
    _check_gamma(gamma)
    E, theta = standard_frame(n, k, R)
    c = corollary_apex(n, k, gamma)
    if k > 1:
        from .polytope import unit_ball_volume

        delta = (c + 1) * unit_ball_volume(k - 1) ** (-1.0 / (k - 1))
        D0 = ball_in(_coordinate(n, range(1, k), R), M, radius=delta)
    else:
        D0 = np.zeros((1, n))
    D1 = ball_in(_coordinate(n, range(k, n), R), M) if k < n else np.zeros((1, n))
    K = hull(np.vstack([-c * theta + D0, theta + D1]))
    f = GammaFunction.from_affine(K, theta, 1.0, gamma)
    return f, E, theta
