"""Convex polytopes in vertex representation.

A :class:`VPolytope` may be lower dimensional: it keeps an affine frame
(``origin`` plus orthonormal rows ``frame``) and does all measurement in those
intrinsic coordinates, so a section or a facet reports its own d-volume.
The empty polytope is a legitimate value (``dim == -1``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import BSpline
from scipy.spatial import ConvexHull, Delaunay, QhullError

from . import config
from . import simplices as sx
from .geomcore import RANK_TOL, Subspace, as_vector, complement, unit


class DegenerateError(ValueError):
    pass


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace {x : <x, normal> >= offset}."""

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        nrm = np.linalg.norm(self.normal)
        if nrm == 0:
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float) / nrm)
        object.__setattr__(self, "offset", float(self.offset) / nrm)

    def height(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.normal - self.offset

    def flipped(self) -> "Halfspace":
        return Halfspace(-self.normal, -self.offset)


def theta_plus(theta) -> Halfspace:
    return Halfspace(np.asarray(theta, dtype=float), 0.0)


class VPolytope:
    """Convex hull of finitely many points, with a cached fan triangulation."""

    def __init__(self, vertices, origin, frame, simplices, facets=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.ambient_dim = self.vertices.shape[1]
        self.origin = np.asarray(origin, dtype=float)
        frame = np.asarray(frame, dtype=float)
        self.frame = frame.reshape(-1, self.ambient_dim) if self.ambient_dim else np.zeros((0, 0))
        self.simplices = np.asarray(simplices, dtype=int).reshape(-1, self.dim + 1 if self.dim >= 0 else 1)
        self._facets = facets

    # -- basic attributes -------------------------------------------------
    @property
    def dim(self) -> int:
        if len(self.vertices) == 0:
            return -1
        return self.frame.shape[0]

    intrinsic_dim = dim

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @cached_property
    def coords(self) -> np.ndarray:
        """Vertices in intrinsic coordinates."""
        return (self.vertices - self.origin) @ self.frame.T

    def simplex_coords(self) -> np.ndarray:
        """(S, d+1, d) intrinsic coordinates of the triangulation."""
        return self.coords[self.simplices]

    def __repr__(self) -> str:
        return f"VPolytope(n={self.ambient_dim}, dim={self.dim}, vertices={len(self.vertices)})"

    # -- measurement ------------------------------------------------------
    @cached_property
    def simplex_volumes(self) -> np.ndarray:
        if self.dim < 1:
            return np.zeros(0)
        return sx.volumes(self.simplex_coords())

    @cached_property
    def volume(self) -> float:
        """Intrinsic d-volume; 0 for the empty polytope and for a point."""
        return float(np.sum(self.simplex_volumes)) if self.dim >= 1 else 0.0

    def measure(self, k: int) -> float:
        """k-dimensional measure (0 when the polytope is lower dimensional)."""
        if self.dim < k:
            return 0.0
        if self.dim > k:
            raise ValueError(f"{self.dim}-dimensional polytope has infinite {k}-measure")
        return self.volume

    @cached_property
    def centroid(self) -> np.ndarray:
        if self.is_empty:
            raise ValueError("centroid of the empty polytope is undefined")
        if self.dim == 0:
            return self.vertices[0].copy()
        S = self.simplex_coords()
        c = np.einsum("s,sk->k", self.simplex_volumes, S.mean(axis=1)) / self.volume
        return self.origin + c @ self.frame

    @cached_property
    def diameter(self) -> float:
        V = self.vertices
        if len(V) < 2:
            return 0.0
        return float(np.sqrt(np.max(np.sum((V[:, None, :] - V[None, :, :]) ** 2, axis=-1))))

    def support(self, u) -> float:
        return float(np.max(self.vertices @ np.asarray(u, dtype=float)))

    # -- facets -------------------------------------------------------------
    @property
    def facets(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with the polytope = {y : A y <= b} in intrinsic coordinates."""
        if self._facets is None:
            raise DegenerateError("facets need a polytope of dimension >= 1")
        return self._facets

    def ambient_facets(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) in ambient coordinates; only for full-dimensional polytopes."""
        if self.dim != self.ambient_dim:
            raise DegenerateError("polytope is not full dimensional")
        A, b = self.facets
        Aa = A @ self.frame
        return Aa, b + Aa @ self.origin

    def contains(self, X, tol: float = 1e-9) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.is_empty:
            return np.zeros(len(X), dtype=bool)
        Y = (X - self.origin) @ self.frame.T
        if self.dim == self.ambient_dim:
            ok = np.ones(len(X), dtype=bool)
        else:
            resid = np.linalg.norm((X - self.origin) - Y @ self.frame, axis=1)
            ok = resid <= tol * max(1.0, self.diameter)
        if self.dim == 0:
            return ok
        A, b = self.facets
        return ok & np.all(Y @ A.T <= b + tol * max(1.0, self.diameter), axis=1)

    def radial(self, u) -> float:
        """max{t >= 0 : t u in P}; the origin must be interior."""
        u = np.asarray(u, dtype=float)
        A, b = self.ambient_facets()
        if np.any(b <= 0):
            raise ValueError("radial function needs the origin in the interior")
        au = A @ u
        pos = au > 0
        if not pos.any():
            return math.inf
        return float(np.min(b[pos] / au[pos]))

    # -- transformations ----------------------------------------------------
    def translate(self, t) -> "VPolytope":
        t = as_vector(t, self.ambient_dim)
        out = VPolytope(self.vertices + t, self.origin + t, self.frame, self.simplices, self._facets)
        if "coords" in self.__dict__:
            out.__dict__["coords"] = self.coords
        return out

    def linear_image(self, M) -> "VPolytope":
        return hull(np.asarray(self.vertices) @ np.asarray(M, dtype=float).T, allow_degenerate=True)

    # -- serialisation ------------------------------------------------------
    def to_dict(self) -> dict:
        return {"n": int(self.ambient_dim), "vertices": self.vertices.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "VPolytope":
        n = int(data["n"])
        verts = np.asarray(data["vertices"], dtype=float).reshape(-1, n)
        return hull(verts, allow_degenerate=True) if len(verts) else empty(n)

    @classmethod
    def from_json(cls, text: str) -> "VPolytope":
        return cls.from_dict(json.loads(text))


def empty(n: int) -> VPolytope:
    return VPolytope(np.zeros((0, n)), np.zeros(n), np.zeros((0, n)), np.zeros((0, 1), dtype=int))


def _fan(coords: np.ndarray, facet_idx: np.ndarray, eqs: np.ndarray, apex: int) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(coords))))
    dist = eqs[:, :-1] @ coords[apex] + eqs[:, -1]
    keep = (np.abs(dist) > 1e-12 * scale) & ~np.any(facet_idx == apex, axis=1)
    fi = facet_idx[keep]
    simp = np.concatenate([np.full((len(fi), 1), apex), fi], axis=1)
    vols = sx.volumes(coords[simp])
    return simp[vols > 1e-14 * scale ** coords.shape[1]]


def hull(points, allow_degenerate: bool = False) -> VPolytope:
    """Vertex-minimal convex hull with a fan triangulation.

    The fan is rooted at the vertex closest to the centroid, which keeps the
    simplices fat on the cone-like bodies this package works with.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = P.shape[1]
    if len(P) == 0:
        if allow_degenerate:
            return empty(n)
        raise DegenerateError("hull of an empty point set")
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite coordinates")
    origin = P.mean(axis=0)
    X = P - origin
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(P))))
    if s[0] <= 1e-14 * scale:
        if not allow_degenerate:
            raise DegenerateError("all points coincide")
        return VPolytope(P[:1], P[0], np.zeros((0, n)), np.zeros((1, 1), dtype=int))
    if not allow_degenerate and len(P) < 2:
        raise DegenerateError("need at least two points")
    r = int(np.sum(s > RANK_TOL * s[0]))
    frame = Vt[:r]
    Y = X @ frame.T
    if r == 1:
        lo, hi = int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))
        verts = P[[lo, hi]]
        c = Y[[lo, hi]]
        facets = (np.array([[-1.0], [1.0]]), np.array([-c[0, 0], c[1, 0]]))
        return VPolytope(verts, origin, frame, np.array([[0, 1]]), facets)
    try:
        H = ConvexHull(Y, qhull_options="Qt")
    except QhullError:
        H = ConvexHull(Y, qhull_options="Qt QJ")
    vidx = np.asarray(H.vertices)
    remap = -np.ones(len(P), dtype=int)
    remap[vidx] = np.arange(len(vidx))
    facet_idx = remap[H.simplices]
    if np.any(facet_idx < 0):  # joggled or coplanar input; keep referenced points
        used = np.unique(H.simplices)
        vidx = used
        remap = -np.ones(len(P), dtype=int)
        remap[vidx] = np.arange(len(vidx))
        facet_idx = remap[H.simplices]
    coords = Y[vidx]
    eqs = H.equations
    simp = _fan(coords, facet_idx, eqs, 0)
    vols = sx.volumes(coords[simp])
    cen = np.einsum("s,sk->k", vols, coords[simp].mean(axis=1)) / vols.sum()
    apex = int(np.argmin(np.sum((coords - cen) ** 2, axis=1)))
    if apex != 0:
        simp = _fan(coords, facet_idx, eqs, apex)
    # unique facet inequalities  A y <= b
    key = np.round(eqs, 10)
    _, first = np.unique(key, axis=0, return_index=True)
    E = eqs[np.sort(first)]
    facets = (E[:, :-1], -E[:, -1])
    poly = VPolytope(P[vidx], origin, frame, simp, facets)
    poly.__dict__["coords"] = coords
    return poly


def _plane_points(V: np.ndarray, h: np.ndarray, tol: float) -> np.ndarray:
    on = np.abs(h) <= tol
    pos, neg = h > tol, h < -tol
    pts = [V[on]]
    if pos.any() and neg.any():
        Vp, Vn, hp, hn = V[pos], V[neg], h[pos], h[neg]
        t = hp[:, None] / (hp[:, None] - hn[None, :])
        C = Vp[:, None, :] + t[:, :, None] * (Vn[None, :, :] - Vp[:, None, :])
        pts.append(C.reshape(-1, V.shape[1]))
    return np.concatenate(pts, axis=0)


def _tol(P: VPolytope) -> float:
    return 1e-12 * max(1.0, float(np.max(np.abs(P.vertices))) if len(P.vertices) else 1.0)


def clip(P: VPolytope, H: Halfspace) -> VPolytope:
    """P ∩ H; kept vertices plus edge crossings (all crossing pairs, then hull)."""
    if P.is_empty:
        return P
    h = H.height(P.vertices)
    tol = _tol(P)
    if np.all(h >= -tol):
        return P
    if np.all(h < -tol):
        return empty(P.ambient_dim)
    keep = P.vertices[h >= -tol]
    cross = _plane_points(P.vertices, h, tol)
    return hull(np.concatenate([keep, cross]), allow_degenerate=True)


def clip_measure(P: VPolytope, H: Halfspace) -> tuple[float, np.ndarray]:
    """(d-volume, first moment) of P ∩ H straight from P's triangulation."""
    if P.dim < 1:
        return 0.0, np.zeros(P.ambient_dim)
    nrm = P.frame @ H.normal
    off = H.offset - P.origin @ H.normal
    S = P.simplex_coords()
    vol, mom = sx.clipped_moments(S, S @ nrm - off)
    return vol, P.origin * vol + mom @ P.frame


def halfspace_fraction(P: VPolytope, theta) -> float:
    """vol(P ∩ θ⁺) / vol(P) for the halfspace through the origin."""
    v, _ = clip_measure(P, theta_plus(theta))
    return v / P.volume


def halfspace_fractions(P: VPolytope, thetas) -> np.ndarray:
    """:func:`halfspace_fraction` for each row of ``thetas``, in one batch."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if P.dim < 1:
        raise DegenerateError("fractions of a lower-dimensional polytope")
    S = P.simplex_coords()
    nrm = thetas @ P.frame.T  # (T, d)
    off = -(thetas @ P.origin)  # heights are <x, θ> = <origin, θ> + <y, nrm>
    H = np.einsum("sjd,td->tsj", S, nrm) - off[:, None, None]
    return sx.clipped_volumes(S, H) / P.volume


def section(P: VPolytope, point, subspace: Subspace, tol: float = 1e-10) -> VPolytope:
    """P ∩ (point + subspace), returned in the subspace's coordinates."""
    k = subspace.dim
    point = np.zeros(P.ambient_dim) if point is None else as_vector(point, P.ambient_dim)
    if P.is_empty:
        return empty(k)
    pts = P.vertices
    scale = max(1.0, float(np.max(np.abs(pts))))
    for u in complement(subspace).basis:
        h = (pts - point) @ u
        pts = _plane_points(pts, h, tol * scale)
        if len(pts) == 0:
            return empty(k)
        if len(pts) > 4 * (P.ambient_dim + 1):
            pts = hull(pts, allow_degenerate=True).vertices
    if k == 0:
        return VPolytope(np.zeros((1, 0)), np.zeros(0), np.zeros((0, 0)), np.zeros((1, 1), dtype=int))
    return hull((pts - point) @ subspace.basis.T, allow_degenerate=True)


def section_volume(P: VPolytope, point, subspace: Subspace) -> float:
    """dim(subspace)-volume of P ∩ (point + subspace)."""
    return section(P, point, subspace).measure(subspace.dim)


def hyperplane_section_volumes(P: VPolytope, normal, ts) -> np.ndarray:
    """(n-1)-volumes of P ∩ {<x, normal> = t} for each t, P full-dimensional.

    On each simplex S of the triangulation, <x, u> for uniform x ∈ S has the
    B-spline density with the vertex heights as knots (Curry–Schoenberg), so
    the slice area is vol(S)·M_S(t); the slices of the simplices tile the section.
    """
    n = P.ambient_dim
    if P.dim != n:
        raise DegenerateError("hyperplane sections need a full-dimensional polytope")
    u = unit(as_vector(normal, n))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if n == 1:
        lo, hi = sorted(P.vertices[:, 0] * u[0])
        return ((ts >= lo) & (ts <= hi)).astype(float)
    heights = np.sort(P.vertices[P.simplices] @ u, axis=1)
    out = np.zeros(len(ts))
    for h, v in zip(heights, P.simplex_volumes):
        span = h[-1] - h[0]
        if span <= 0:
            continue
        B = BSpline.basis_element(h, extrapolate=False)
        vals = np.nan_to_num(B(ts), nan=0.0)
        out += v * (n / span) * vals
    return out


def project(P: VPolytope, E: Subspace) -> VPolytope:
    """Orthogonal projection P|E in E-coordinates."""
    return hull(P.vertices @ E.basis.T, allow_degenerate=True)


# ---------------------------------------------------------------------------
# meshing helpers


def _lattice(d: int, N: int) -> np.ndarray:
    """Barycentric lattice {a/N : a in Z^{d+1}_{>=0}, |a| = N}."""
    if d == 0:
        return np.ones((1, 1))
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + [left])
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, slots - 1)

    rec([], N, d + 1)
    return np.array(out, dtype=float) / N


def refined_points(P: VPolytope, h: float, max_points: int | None = None) -> np.ndarray:
    """Points of P (intrinsic coordinates) with spacing about ``h``.

    Every simplex of the triangulation is subdivided into a barycentric
    lattice with N segments per edge; the result contains every vertex.  With
    ``max_points`` the subdivision is coarsened until the count fits.
    """
    if P.dim < 1:
        return P.coords.copy()
    S = P.simplex_coords()
    d = P.dim
    edge = max(float(np.max(np.linalg.norm(s[:, None] - s[None, :], axis=-1))) for s in S)
    N = max(1, int(math.ceil(edge / h)))
    if max_points is not None:
        while N > 1 and len(S) * math.comb(N + d, d) > 4 * max_points:
            N = max(1, int(N / 1.25))
    while True:
        lam = _lattice(d, N)
        pts = np.concatenate([P.coords] + [lam @ s for s in S])
        pts = np.unique(np.round(pts, 12), axis=0)
        if max_points is None or len(pts) <= max_points or N == 1:
            return pts
        N = max(1, min(N - 1, int(N / 1.1)))


def triangulate_points(Y: np.ndarray) -> np.ndarray:
    """Simplices (indices) triangulating the convex hull of Y (intrinsic coords)."""
    d = Y.shape[1]
    if d == 1:
        order = np.argsort(Y[:, 0])
        return np.stack([order[:-1], order[1:]], axis=1)
    tri = Delaunay(Y, qhull_options="Qbb Qc Qz Q12 Qt")
    simp = tri.simplices
    vols = sx.volumes(Y[simp])
    scale = max(1.0, float(np.max(np.abs(Y))))
    return simp[vols > 1e-13 * scale ** d]


# ---------------------------------------------------------------------------
# standard bodies


def cube(n: int, lo: float = 0.0, hi: float = 1.0) -> VPolytope:
    grid = np.array(np.meshgrid(*[[lo, hi]] * n, indexing="ij")).reshape(n, -1).T
    return hull(grid)


def standard_simplex(n: int) -> VPolytope:
    return hull(np.vstack([np.zeros(n), np.eye(n)]))


def _fibonacci_sphere(M: int) -> np.ndarray:
    i = np.arange(M) + 0.5
    z = 1.0 - 2.0 * i / M
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z ** 2)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def ball_points(dim: int, M: int | None = None, volume_matched: bool = True) -> np.ndarray:
    """Vertices of a polytope approximating the unit ball B_2^dim.

    With ``volume_matched`` the approximant is rescaled to the ball's volume,
    so formulas that only see the volume of the ball factor stay exact.
    """
    if dim == 0:
        return np.zeros((1, 0))
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    M = config.ball_vertices(dim, M)
    if dim == 2:
        ang = 2 * math.pi * np.arange(M) / M
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    elif dim == 3:
        pts = _fibonacci_sphere(M)
    else:
        from scipy.stats import qmc

        g = qmc.Sobol(dim, scramble=True, seed=12345).random(M)
        from scipy.special import ndtri

        pts = ndtri(np.clip(g, 1e-9, 1 - 1e-9))
        pts = np.vstack([np.eye(dim), -np.eye(dim), pts])
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    if volume_matched:
        vol = hull(pts).volume
        pts = pts * (unit_ball_volume(dim) / vol) ** (1.0 / dim)
    return pts


def embed(coords: np.ndarray, S: Subspace, shift=None) -> np.ndarray:
    """Map coordinates in S to ambient points, optionally translated."""
    out = np.asarray(coords, dtype=float).reshape(-1, S.dim) @ S.basis
    if shift is not None:
        out = out + np.asarray(shift, dtype=float)
    return out


# ---------------------------------------------------------------------------
# Steiner symmetrization and the section function


class SteinerBody:
    """Steiner symmetral of K with respect to E.

    Over each y in K|E the fiber K ∩ (y + E^⊥) is replaced by the centred
    (n-k)-ball of the same volume.  Radii are exact fiber computations; the
    stored ``mesh`` samples them on a refined triangulation of K|E.
    """

    def __init__(self, K: VPolytope, E: Subspace, h: float | None = None):
        if E.dim >= K.ambient_dim:
            raise ValueError("Steiner symmetrization needs dim E < n")
        self.K = K
        self.E = E
        self.Eperp = complement(E)
        self.base = project(K, E)
        h = h if h is not None else config.PROFILE_REFINEMENT * max(self.base.diameter, 1e-12)
        Y = refined_points(self.base, h)
        self.mesh_points = self.base.origin + Y @ self.base.frame
        self.radii = np.array([self.radius(y) for y in self.mesh_points])

    @property
    def fiber_dim(self) -> int:
        return self.Eperp.dim

    def fiber_volume(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return section_volume(self.K, y @ self.E.basis, self.Eperp)

    def radius(self, y) -> float:
        A = self.fiber_volume(y)
        return (A / unit_ball_volume(self.fiber_dim)) ** (1.0 / self.fiber_dim)

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = X @ self.E.basis.T
        Z = X @ self.Eperp.basis.T
        inside = self.base.contains(Y)
        out = np.zeros(len(X), dtype=bool)
        for i in np.nonzero(inside)[0]:
            out[i] = np.linalg.norm(Z[i]) <= self.radius(Y[i]) + 1e-12
        return out

    def slice_by_base(self) -> VPolytope:
        """K̃ ∩ E in E-coordinates: the points y where the fiber is nonempty."""
        keep = self.radii >= 0
        return hull(self.mesh_points[keep], allow_degenerate=True)

    def volume(self, q: int = 4) -> float:
        """∫_{K|E} A(y) dy by conical Gauss quadrature with exact fiber volumes."""
        lam, w = sx.conical_rule(self.base.dim, q)
        total = 0.0
        for simp, v in zip(self.base.simplex_coords(), self.base.simplex_volumes):
            Y = self.base.origin + (lam @ simp) @ self.base.frame
            total += v * float(np.sum(w * np.array([self.fiber_volume(y) for y in Y])))
        return total


def steiner_symmetrize(P: VPolytope, E: Subspace, h: float | None = None) -> SteinerBody:
    if E.dim >= P.ambient_dim:
        raise ValueError("k = n: nothing to symmetrize")
    return SteinerBody(P, E, h)


def section_profile(P: VPolytope, theta, E: Subspace, h: float | None = None):
    """The section function y -> vol_{k-1}(K ∩ (y + Ẽ^⊥)) on Ẽ = span(E^⊥, θ).

    Returned as a gamma-concave function on Ẽ (in Ẽ-coordinates) with
    gamma = 1/(k-1), sampled at a refined triangulation of K|Ẽ.  K is first
    translated so that g(K)|Ẽ = o.  For k = 1 the indicator of K is returned.
    """
    from .gammafn import GammaFunction
    from .geomcore import span_with

    theta = unit(as_vector(theta, P.ambient_dim))
    k = E.dim
    Et = span_with(theta, complement(E))
    K = P.translate(-(P.centroid @ Et.basis.T) @ Et.basis)
    if k == 1:
        Kc = hull(K.vertices @ Et.basis.T)
        return GammaFunction.indicator(Kc)
    fiber = complement(Et)
    base = project(K, Et)
    if base.dim != Et.dim:
        raise DegenerateError("degenerate section profile")
    h = h if h is not None else config.PROFILE_REFINEMENT * base.diameter
    Y = base.origin + refined_points(base, h) @ base.frame
    A = np.array([section_volume(K, y @ Et.basis, fiber) for y in Y])
    gamma = 1.0 / (k - 1)
    simp = triangulate_points(Y)
    return GammaFunction.from_mesh(Y, simp, A ** gamma, gamma=gamma, scale=1.0)


# ---------------------------------------------------------------------------
# halved volumes of sections and projections


def _halved_ratio(P: VPolytope, k: int, tc: np.ndarray) -> float:
    if P.dim < k:
        raise DegenerateError(f"{k}-dimensional slice has measure zero")
    vol = P.volume
    return clip_measure(P, theta_plus(tc))[0] / vol


def section_ratio(K: VPolytope, E: Subspace, theta) -> float:
    """vol_k(K ∩ E ∩ θ⁺) / vol_k(K ∩ E) for θ ∈ E."""
    from .geomcore import coords_in

    return _halved_ratio(section(K, None, E), E.dim, coords_in(np.asarray(theta, float), E))


def projection_ratio(K: VPolytope, E: Subspace, theta) -> float:
    """vol_k((K|E) ∩ θ⁺) / vol_k(K|E) for θ ∈ E."""
    from .geomcore import coords_in

    return _halved_ratio(project(K, E), E.dim, coords_in(np.asarray(theta, float), E))


def ball_in(S: Subspace, M: int | None = None, radius: float = 1.0) -> np.ndarray:
    """Ambient vertices of a ball approximant of the given radius in S."""
    if S.dim == 0:
        return np.zeros((1, S.ambient_dim))
    return radius * ball_points(S.dim, M) @ S.basis
