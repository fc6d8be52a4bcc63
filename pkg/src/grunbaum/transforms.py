"""The two ratio-decreasing transforms behind the one-dimensional bound.

``affinize`` replaces every slice f(x' + sθ) by a γ-affine slice of the same
mass whose forms share one affine majorant H; the result F is γ-affine.
``coneify`` turns a γ-affine q into a function Q on a cone with the same
θ-axis restriction and a centroid pushed forward along θ.

Both work on sampled data: H̃ and Ψ are evaluated on a triangulated sample of
K_f|θ^⊥, and all "≥ 0" statements carry an explicit slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import linprog, minimize_scalar

from . import config
from .gammafn import ConeAffineFunction, GammaFunction
from .geomcore import Subspace, as_vector, complement, orthonormalize, unit
from .polytope import VPolytope, hull, hyperplane_section_volumes, project, refined_points, section, section_volume


def ratio_from(t0: float, f: GammaFunction, theta) -> float:
    """∫_{t0}^∞ f(sθ) ds / ∫_{-∞}^∞ f(sθ) ds."""
    den = f.ray_integral(theta, -math.inf)
    if den <= 0:
        raise ValueError("function vanishes on the θ-axis")
    if t0 == -math.inf:
        return 1.0
    return f.ray_integral(theta, t0) / den


def _power_gamma(f: GammaFunction, x) -> float:
    """f(x)^γ."""
    v = float(f.evaluate(np.asarray(x, dtype=float)))
    return v ** f.gamma


def compute_beta(f: GammaFunction, theta) -> float:
    """β = γ f_o(0)^{γ+1} / ((γ+1) ∫_0^∞ f(sθ) ds)."""
    if math.isinf(f.gamma):
        raise ValueError("the transforms need a finite gamma")
    theta = unit(as_vector(theta, f.n))
    f0 = float(f.evaluate(np.zeros(f.n)))
    fwd = f.ray_integral(theta, 0.0)
    if f0 <= 0 or fwd <= 0:
        raise ValueError("inconsistent input: f(o) = 0 or no forward mass (is f centred?)")
    g = f.gamma
    return g * f0 ** (g + 1) / ((g + 1) * fwd)


# ---------------------------------------------------------------------------
# H-tilde


def _tail_masses(f: GammaFunction, pieces: np.ndarray, a: np.ndarray) -> np.ndarray:
    """∫_a^∞ over the slice given by ``pieces`` for each entry of a."""
    a = np.atleast_1d(a)
    lo = np.maximum(pieces[None, :, 0], a[:, None])
    hi = np.broadcast_to(pieces[None, :, 1], lo.shape)
    L = pieces[:, 1] - pieces[:, 0]
    t = (lo - pieces[None, :, 0]) / L
    plo = pieces[None, :, 2] + t * (pieces[None, :, 3] - pieces[None, :, 2])
    phi = np.broadcast_to(pieces[None, :, 3], lo.shape)
    vals = f._piece_integral(lo, hi, plo, phi)
    return np.where(hi > lo, vals, 0.0).sum(axis=1)


def h_tilde(f: GammaFunction, theta, xprime, beta: float, grid: int = 32) -> tuple[float, float]:
    """H̃(x') = max_a [β(γ+1)/γ ∫_a^∞ f_{x'}]^{γ/(γ+1)} + βa and its maximiser a.

    The maximand is concave in a; it is scanned at the slice breakpoints and a
    ``grid``-point grid, then refined by bounded Brent iteration.
    """
    theta = unit(as_vector(theta, f.n))
    pieces = f.line_pieces(xprime, theta)
    if len(pieces) == 0:
        raise ValueError("empty slice")
    g = f.gamma
    c = beta * (g + 1) / g
    e = g / (g + 1)

    def phi(a):
        return (c * _tail_masses(f, pieces, a)) ** e + beta * np.atleast_1d(a)

    lo, hi = pieces[0, 0], pieces[-1, 1]
    cand = np.unique(np.concatenate([pieces[:, 0], pieces[:, 1], np.linspace(lo, hi, grid)]))
    vals = phi(cand)
    i = int(np.argmax(vals))
    best_a, best = cand[i], vals[i]
    left, right = cand[max(i - 1, 0)], cand[min(i + 1, len(cand) - 1)]
    if right > left:
        res = minimize_scalar(lambda s: -phi(s)[0], bounds=(left, right), method="bounded",
                              options={"xatol": 1e-10})
        if -res.fun > best:
            best_a, best = float(res.x), float(-res.fun)
    return float(best), float(best_a)


def affine_majorant(points, values, center: int | None = None, tol: float = 1e-7):
    """Linear L with values[center] + L(x_i) >= values[i] at every sample.

    Two LPs: first the smallest uniform violation t, then among forms with
    that violation the one of minimal total slack.  Returns (L, t).
    """
    Y = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(values, dtype=float)
    d = Y.shape[1]
    if center is None:
        center = int(np.argmin(np.linalg.norm(Y, axis=1)))
    if np.linalg.norm(Y[center]) > 1e-12:
        raise ValueError("samples must include the origin")
    if len(Y) == 1 or d == 0:
        return np.zeros(d), 0.0
    rhs = v[center] - v
    # phase 1: min t  s.t.  -Y l - t <= rhs
    A1 = np.hstack([-Y, -np.ones((len(Y), 1))])
    c1 = np.zeros(d + 1)
    c1[-1] = 1.0
    bounds = [(None, None)] * d + [(0, None)]
    r1 = linprog(c1, A_ub=A1, b_ub=rhs, bounds=bounds, method="highs")
    if r1.status != 0:
        raise RuntimeError(f"affine majorant LP failed: {r1.message}")
    t = float(r1.x[-1])
    if t > tol:
        raise ValueError(f"no affine majorant through the centre (max violation {t:.3g})")
    # phase 2: min sum(v_c + Y l - v)  s.t. the same violation budget
    r2 = linprog(Y.sum(axis=0), A_ub=-Y, b_ub=rhs + t + 1e-12, bounds=[(None, None)] * d, method="highs")
    L = r2.x if r2.status == 0 else r1.x[:-1]
    return np.asarray(L, dtype=float), t


# ---------------------------------------------------------------------------
# affinization


@dataclass
class AffinizationData:
    theta: np.ndarray
    frame: Subspace  # θ^⊥
    beta: float
    f_gamma_o: float  # f(o)^γ
    samples: np.ndarray  # (N, n-1) coordinates in θ^⊥
    htilde: np.ndarray
    argmax: np.ndarray
    slice_mass: np.ndarray
    L: np.ndarray
    lp_violation: float
    F: GammaFunction
    checks: dict = field(default_factory=dict)

    @property
    def H(self) -> np.ndarray:
        return self.f_gamma_o + self.samples @ self.L

    @property
    def Psi(self) -> np.ndarray:
        g = self.F.gamma
        c = self.beta * (g + 1) / g
        return (self.H - (c * self.slice_mass) ** (g / (g + 1))) / self.beta

    def fiber_mass(self) -> np.ndarray:
        """Mass of the γ-affine replacement slices, by the closed form."""
        g = self.F.gamma
        return g / (self.beta * (g + 1)) * np.clip(self.H - self.beta * self.Psi, 0, None) ** ((g + 1) / g)


def affinize(f: GammaFunction, theta, max_samples: int = config.MAX_AFFINIZE_SAMPLES,
             h: float | None = None) -> AffinizationData:
    """Replace the θ-slices of a centred γ-concave f by γ-affine slices."""
    theta = unit(as_vector(theta, f.n))
    n, g = f.n, f.gamma
    beta = compute_beta(f, theta)
    fgo = _power_gamma(f, np.zeros(n))
    U = complement(orthonormalize([theta]))
    if n == 1:
        Y = np.zeros((1, 0))
    else:
        P = project(f.support, U)
        h = h if h is not None else config.PROFILE_REFINEMENT * P.diameter
        Y = P.origin + refined_points(P, h, max_samples) @ P.frame
        if not np.any(np.linalg.norm(Y, axis=1) < 1e-12):
            Y = np.vstack([np.zeros(n - 1), Y])
    X = Y @ U.basis if n > 1 else np.zeros((1, 1))
    ht = np.empty(len(Y))
    am = np.empty(len(Y))
    mass = np.empty(len(Y))
    for i, x in enumerate(X):
        mass[i] = f.slice_mass(x, theta)
        if mass[i] > 0:
            ht[i], am[i] = h_tilde(f, theta, x, beta)
        else:  # the line only grazes the support
            ht[i], am[i] = -np.inf, np.nan
    live = np.isfinite(ht)
    L, viol = affine_majorant(Y[live], ht[live])
    H = fgo + Y @ L
    c = beta * (g + 1) / g
    psi = (H - (c * mass) ** (g / (g + 1))) / beta
    lower = X + psi[:, None] * theta
    upper = X + (H / beta)[:, None] * theta
    KF = hull(np.vstack([lower, upper]))
    a = beta * theta - (L @ U.basis if n > 1 else 0.0)
    F = GammaFunction.from_affine(KF, a, fgo, g, 1.0)
    data = AffinizationData(theta, U, beta, fgo, Y, ht, am, mass, L, viol, F)
    data.checks = _affinize_checks(f, data, X)
    return data


def _affinize_checks(f, data: AffinizationData, X) -> dict:
    F, theta = data.F, data.theta
    gF = F.fn_centroid()
    tF = float(gF @ theta)
    fm = data.fiber_mass()
    rel = np.abs(fm - data.slice_mass) / np.maximum(data.slice_mass.max(), 1e-300)
    center = int(np.argmin(np.linalg.norm(data.samples, axis=1))) if len(data.samples[0]) else 0
    return {
        "htilde_at_o": float(data.htilde[center]),
        "htilde_o_error": abs(float(data.htilde[center]) - data.f_gamma_o),
        "majorant_min_gap": float(np.min((data.H - data.htilde)[np.isfinite(data.htilde)])),
        "psi_gap": float(np.min(data.H / data.beta - data.Psi)),
        "fiber_mass_error": float(rel.max()),
        "mass_f": f.integrate(),
        "mass_F": F.integrate(),
        "centroid_F": gF,
        "centroid_offaxis": float(np.linalg.norm(gF - tF * theta)),
        "centroid_axis": tF,
        "ratio_f": ratio_from(0.0, f, theta),
        "ratio_F": ratio_from(tF, F, theta),
    }


def eq8_residual(f: GammaFunction, theta, beta: float) -> float:
    """∫_0^∞ f_o - ∫_0^{f_o^γ(0)/β} (f_o^γ(0) - βs)^{1/γ} ds."""
    g = f.gamma
    fgo = _power_gamma(f, np.zeros(f.n))
    rhs = g / (beta * (g + 1)) * fgo ** ((g + 1) / g)
    return f.ray_integral(theta, 0.0) - rhs


# ---------------------------------------------------------------------------
# cone construction


@dataclass
class ConeData:
    theta: np.ndarray
    eta: np.ndarray
    a: float
    b: float
    vertex: np.ndarray
    C: VPolytope
    KQ: VPolytope
    Q: ConeAffineFunction
    lambda0: float
    checks: dict = field(default_factory=dict)


def affine_form(q: GammaFunction) -> tuple[np.ndarray, float, float]:
    """(η, c, m') with q(x) = m' (c - <x, η>)^{1/γ} on its support."""
    if q.affine is None:
        raise ValueError("coneify needs a γ-affine function")
    a, b = q.affine
    na = float(np.linalg.norm(a))
    if na == 0:
        raise ValueError("constant profile has no level-set normal")
    return a / na, b / na, q.scale * na ** q.alpha


def coneify(q: GammaFunction, theta, grid: int = 64) -> ConeData:
    """Cone replacement Q of a centred γ-affine q."""
    theta = unit(as_vector(theta, q.n))
    n = q.n
    eta, c_level, m2 = affine_form(q)
    ct = float(theta @ eta)
    if ct <= 1e-10:
        raise ValueError("<θ, η> <= 0: the zero level set does not face θ")
    Kq = q.support
    rho = Kq.radial(-theta)
    v = -rho * theta
    a = float(v @ eta)
    b = Kq.support(eta)
    W = complement(orthonormalize([eta]))
    S0 = section(Kq, None, W)
    S0_pts = S0.vertices @ W.basis
    g0 = S0.centroid @ W.basis
    s = (b - a) / (-a)
    Cb = v + s * (S0_pts - v)
    gCb = v + s * (g0 - v)
    r = b / ct
    base_pts = Cb - gCb + r * theta
    C = hull(np.vstack([v, Cb]))
    KQ = hull(np.vstack([v, base_pts]))
    base = hull(base_pts, allow_degenerate=True)
    # Q keeps q's affine profile; its zero level should be the base plane
    Q = ConeAffineFunction(KQ, q.gamma, m2, eta, c_level / ct, theta, apex=v, base=base)
    gQ = Q.fn_centroid()
    lam0, resid = cone_centroid_decomposition(Q, v, base)
    data = ConeData(theta, eta, a, b, v, C, KQ, Q, lam0)
    ts = np.linspace(a, b, grid + 2)[1:-1]
    AC = hyperplane_section_volumes(C, eta, ts)
    AK = hyperplane_section_volumes(Kq, eta, ts)
    dom = np.where(ts <= 0, AK - AC, AC - AK)
    tline = np.linspace(-rho, float(Kq.radial(theta)), grid)
    X = tline[:, None] * theta
    data.checks = {
        "level_offset": abs(c_level - b),
        "section_dominance_min": float(dom.min()) / max(float(AK.max()), 1e-300),
        "axis_sup_error": float(np.max(np.abs(Q.evaluate(X) - q.evaluate(X)))),
        "centroid_Q": gQ,
        "centroid_axis": float(gQ @ theta),
        "centroid_offaxis": float(np.linalg.norm(gQ - (gQ @ theta) * theta)),
        "lambda0_residual": resid,
        "vertex_error": abs(KQ.radial(-theta) - rho),
        "ratio_q": ratio_from(0.0, q, theta),
        "ratio_Q": ratio_from(float(gQ @ theta), Q, theta),
    }
    return data


def cone_centroid_decomposition(fn: GammaFunction, vertex, base: VPolytope) -> tuple[float, float]:
    """λ0 with g(fn) = λ0·vertex + (1-λ0)·g(base), and the residual norm.

    ``fn`` must be supported on conv(vertex, base) and constant on sections
    parallel to the base.
    """
    vertex = np.asarray(vertex, dtype=float)
    K = fn.support
    if base.dim != fn.n - 1:
        raise ValueError("base must be a facet-dimensional polytope")
    nrm = complement(Subspace(fn.n, base.frame)).basis[0]
    off = base.vertices[0] @ nrm
    on_base = np.abs(K.vertices @ nrm - off) < 1e-9 * max(1.0, K.diameter)
    at_apex = np.linalg.norm(K.vertices - vertex, axis=1) < 1e-9 * max(1.0, K.diameter)
    if not np.all(on_base | at_apex) or not at_apex.any():
        raise ValueError("support is not the cone over the given base")
    g = fn.fn_centroid()
    gb = base.centroid
    d = vertex - gb
    lam = float((g - gb) @ d / (d @ d))
    resid = float(np.linalg.norm(g - (lam * vertex + (1 - lam) * gb)))
    return lam, resid


def lambda0_quotient(data: ConeData, q: GammaFunction) -> float:
    """λ0 from the quotient of double integrals over [a, b] by adaptive quadrature.

    Uses q on the θ-axis and the exact section areas of K_Q.
    """
    a, b, ct = data.a, data.b, float(data.theta @ data.eta)
    W = complement(orthonormalize([data.eta]))

    def w(t):
        return float(q.evaluate(t * data.theta / ct)) * section_volume(data.KQ, t * data.eta, W)

    num = quad(lambda t: w(t) * (b - t), a, b, limit=200, epsabs=0, epsrel=1e-11)[0]
    den = quad(w, a, b, limit=200, epsabs=0, epsrel=1e-11)[0]
    return num / ((b - a) * den)


# ---------------------------------------------------------------------------


@dataclass
class ChainResult:
    ratios: tuple[float, float, float]
    affinization: AffinizationData
    cone: ConeData


def transform_chain(f: GammaFunction, theta, max_samples: int = config.MAX_AFFINIZE_SAMPLES,
                    h: float | None = None) -> ChainResult:
    """ratio_from(0,f) ≥ ratio_from(<g(F),θ>, F) ≥ ratio_from(<g(Q),θ>, Q)."""
    theta = unit(as_vector(theta, f.n))
    A = affinize(f, theta, max_samples, h)
    gF = A.checks["centroid_F"]
    q = A.F.translate(-gF)
    D = coneify(q, theta)
    r = (A.checks["ratio_f"], A.checks["ratio_F"], D.checks["ratio_Q"])
    return ChainResult(r, A, D)
