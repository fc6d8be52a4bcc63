"""Randomised verification harness.

Instances are random centred polytopes and random γ-concave functions; each
check sweeps directions (and k-frames) for the smallest halved ratio, then
compares it with the sharp constant.  Rows are collected into a
:class:`VerificationReport`, which serialises to JSON or CSV.

Every number a row reports is the value of an actual (E, θ) instance that
was evaluated — the sweep never extrapolates — so ``min_ratio`` is an upper
bound on the true infimum over the Grassmannian.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import jsonschema
import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtri
from scipy.stats import qmc

from . import config as cfg
from .extremal import functional_bound, grunbaum_bound, theorem_bound
from .gammafn import GammaFunction, halfspace_mass_ratio, halfspace_mass_ratios
from .geomcore import Subspace, complement, coords_in, orthonormalize, random_subspace, unit
from .polytope import (
    DegenerateError,
    VPolytope,
    halfspace_fractions,
    hull,
    project,
    section,
    theta_plus,
)
from .transforms import ratio_from, transform_chain

log = logging.getLogger(__name__)

CHECKS = ("grunbaum", "support", "radial", "projection", "section", "functional", "theorem", "chain",
          "chain-monotone")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class TrialConfig:
    n: int
    k: int = 1
    gamma: float | None = None
    num_bodies: int = 200
    seed: int = 0
    theta_grid_size: int = 64
    refine_iters: int = 40
    mc_samples: int = 0
    tolerance: float = 1e-6
    num_frames: int = 2
    num_points: int | None = None  # vertices sampled per random body (default 4n + 4)
    num_forms: int = 3  # affine pieces in a random profile
    chain_samples: int = cfg.MAX_AFFINIZE_SAMPLES

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if self.num_bodies < 0 or self.theta_grid_size < 1 or self.refine_iters < 0:
            raise ValueError("counts must be non-negative (grid size positive)")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")

    @property
    def points(self) -> int:
        return self.num_points if self.num_points is not None else 4 * self.n + 4


def thread_count() -> int:
    """Worker threads, capped by the GRUNBAUM_THREADS environment variable."""
    raw = os.environ.get("GRUNBAUM_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"GRUNBAUM_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("GRUNBAUM_THREADS must be >= 1")
    return value


# ---------------------------------------------------------------------------
# instance generators


def random_body(n: int, num_points: int, seed) -> VPolytope:
    """Hull of Gaussian points, translated so that its centroid is at o."""
    if num_points < n + 1:
        raise ValueError("need at least n+1 points")
    rng = np.random.default_rng(seed)
    for _ in range(10):
        try:
            K = hull(rng.standard_normal((num_points, n)))
        except DegenerateError:
            continue
        K = K.translate(-K.centroid)
        # one more pass removes the rounding left by the first translation
        return K.translate(-K.centroid)
    raise DegenerateError("could not sample a full-dimensional hull in 10 attempts")


def random_gamma_function(n: int, gamma: float, seed, num_points: int | None = None,
                          num_forms: int = 3) -> GammaFunction:
    """γ-concave f with a random support and the minimum of ``num_forms`` affine forms as profile.

    The result is translated until |g(f)| < 1e-8.
    """
    rng = np.random.default_rng(seed)
    K = random_body(n, num_points or 4 * n + 4, rng)
    A = rng.standard_normal((num_forms, n))
    c = np.max(K.vertices @ A.T, axis=0) + rng.uniform(0.2, 1.5, num_forms)
    f = GammaFunction.from_min_affine(K, A, c, gamma)
    for _ in range(40):
        g = f.fn_centroid()
        if np.linalg.norm(g) < 1e-8:
            return f
        f = f.translate(-g)
    raise RuntimeError("centroid recentering did not converge")


# ---------------------------------------------------------------------------
# direction grids and charts


def direction_grid(k: int, size: int) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors in R^k."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        ang = 2 * math.pi * np.arange(size) / size
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if k == 3:
        i = np.arange(size) + 0.5
        z = 1 - 2 * i / size
        phi = math.pi * (1 + math.sqrt(5)) * i
        r = np.sqrt(1 - z ** 2)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    u = qmc.Sobol(k, scramble=True, seed=2024).random(size)
    g = ndtri(np.clip(u, 1e-9, 1 - 1e-9))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


class _FrameChart:
    """Local coordinates around (E0, c0): E = orth(B0 + Z C), θ-coords c = unit(c0 + W u)."""

    def __init__(self, E0: Subspace, c0: np.ndarray, move_frame: bool = True):
        self.B0 = E0.basis
        self.n, self.k = E0.ambient_dim, E0.dim
        self.C = complement(E0).basis if move_frame else np.zeros((0, self.n))
        self.c0 = unit(c0)
        self.W = complement(orthonormalize([self.c0])).basis.T if self.k > 1 else np.zeros((1, 0))
        self.nz = self.k * self.C.shape[0]
        self.size = self.nz + self.W.shape[1]

    def __call__(self, p) -> tuple[Subspace, np.ndarray, np.ndarray]:
        p = np.asarray(p, dtype=float)
        Z = p[: self.nz].reshape(self.k, -1)
        M = self.B0 + Z @ self.C if self.nz else self.B0
        q, r = np.linalg.qr(M.T)
        B = (q * np.sign(np.diag(r))).T
        c = unit(self.c0 + self.W @ p[self.nz:]) if self.W.shape[1] else self.c0
        return Subspace(self.n, B), c, c @ B


# ---------------------------------------------------------------------------
# the sweep


@dataclass
class SweepResult:
    min_ratio: float
    E: Subspace
    theta: np.ndarray
    evaluations: int
    skipped: int = 0


def _support_ratios(K: VPolytope, U: np.ndarray) -> np.ndarray:
    hp = np.max(K.vertices @ U.T, axis=0)
    hm = np.max(-K.vertices @ U.T, axis=0)
    return hp / (hp + hm)


def _radial_ratios(K: VPolytope, U: np.ndarray) -> np.ndarray:
    A, b = K.ambient_facets()
    if np.any(b <= 0):
        raise DegenerateError("origin is not interior; radial function undefined")

    def rho(V):
        au = V @ A.T
        with np.errstate(divide="ignore"):
            q = np.where(au > 0, b[None, :] / np.where(au > 0, au, 1.0), np.inf)
        return q.min(axis=1)

    rp, rm = rho(U), rho(-U)
    return rp / (rp + rm)


def _slice(K: VPolytope, E: Subspace, mode: str) -> VPolytope:
    return section(K, None, E) if mode == "section" else project(K, E)


def sweep_min_ratio(K: VPolytope, k: int, config: TrialConfig, mode: str = "section",
                    rng: np.random.Generator | None = None, frames=None) -> SweepResult:
    """Smallest vol_k(L ∩ θ⁺)/vol_k(L) found over frames E and θ ∈ E, L = K∩E or K|E.

    ``frames`` overrides the random k-frames.  For k = 1 the sweep runs over
    lines, where the ratio reduces to the radial (sections) or support
    (projections) form.
    """
    if mode not in ("section", "projection"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    n = K.ambient_dim
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    best = {"r": math.inf, "E": None, "c": None, "evals": 0, "skipped": 0}

    def record(r, E, c):
        best["evals"] += 1
        if r < best["r"]:
            best.update(r=float(r), E=E, c=np.array(c, float))

    if k == 1:
        ratios = _radial_ratios if mode == "section" else _support_ratios
        U = direction_grid(n, config.theta_grid_size) if n > 1 else np.array([[1.0], [-1.0]])
        if frames is not None:
            U = np.array([F.basis[0] for F in frames])
        vals = ratios(K, U)
        for u, r in zip(U, vals):
            record(r, orthonormalize([u]), [1.0])

        def objective(p):
            E, c, th = chart(p)
            r = float(ratios(K, th[None, :])[0])
            record(r, orthonormalize([th]), [1.0])
            return r

        if n > 1 and config.refine_iters:
            E0, c0 = best["E"], best["c"]
            th0 = c0 @ E0.basis
            chart = _FrameChart(Subspace(n, np.eye(n)), th0, move_frame=False)
            _nelder_mead(objective, chart.size, config.refine_iters)
        return _result(best)

    if frames is None:
        frames = [Subspace(n, np.eye(n))] if k == n else [random_subspace(n, k, rng) for _ in range(config.num_frames)]
    grid = direction_grid(k, config.theta_grid_size)
    for E in frames:
        try:
            L = _slice(K, E, mode)
            vals = halfspace_fractions(L, grid)
        except DegenerateError as exc:
            log.info("skipping a frame: %s", exc)
            best["skipped"] += 1
            continue
        for c, r in zip(grid, vals):
            record(r, E, c)
    if best["E"] is None:
        raise DegenerateError("every frame gave a section of measure zero")

    if config.refine_iters:
        chart = _FrameChart(best["E"], best["c"], move_frame=k < n)
        fixed = None if k < n else _slice(K, best["E"], mode)

        def objective(p):
            E, c, th = chart(p)
            try:
                L = fixed if fixed is not None else _slice(K, E, mode)
                r = float(halfspace_fractions(L, c[None, :])[0])
            except DegenerateError:
                best["skipped"] += 1
                return math.inf
            record(r, E, c)
            return r

        _nelder_mead(objective, chart.size, config.refine_iters)
    return _result(best)


def _nelder_mead(objective, dim: int, iters: int, step: float = 0.05) -> None:
    if dim == 0:
        return
    simplex = np.vstack([np.zeros(dim), step * np.eye(dim)])
    minimize(objective, np.zeros(dim), method="Nelder-Mead",
             options={"maxiter": iters, "initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-13})


def _result(best) -> SweepResult:
    E = best["E"]
    return SweepResult(best["r"], E, best["c"] @ E.basis, best["evals"], best["skipped"])


# ---------------------------------------------------------------------------
# checks -> report rows


def _row(check: str, n: int, k: int, gamma, ratio: float, bound: float, E: Subspace | None = None,
         theta=None, **extra) -> dict:
    row = {
        "check": check,
        "n": int(n),
        "k": int(k),
        "gamma": None if gamma is None or math.isinf(gamma) else float(gamma),
        "ratio": float(ratio),
        "bound": float(bound),
        "margin": float(ratio - bound),
        "frame": None if E is None else E.basis.tolist(),
        "theta": None if theta is None else np.asarray(theta, float).tolist(),
        "chain": None,
        "mc_delta": None,
    }
    row.update(extra)
    return row


def check_grunbaum(K: VPolytope, config: TrialConfig) -> dict:
    """min over θ of vol(K ∩ θ⁺)/vol(K) against (n/(n+1))^n."""
    n = K.ambient_dim
    res = sweep_min_ratio(K, n, config)
    return _row("grunbaum", n, n, None, res.min_ratio, grunbaum_bound(n, n), res.E, res.theta)


def check_minkrad(K: VPolytope, mode: str, config: TrialConfig) -> dict:
    """min over θ of h(θ)/(h(θ)+h(−θ)) (support) or ρ(θ)/(ρ(θ)+ρ(−θ)) (radial) against 1/(n+1)."""
    if mode not in ("support", "radial"):
        raise ValueError(f"mode must be 'support' or 'radial', got {mode!r}")
    n = K.ambient_dim
    res = sweep_min_ratio(K, 1, config, "projection" if mode == "support" else "section")
    return _row(mode, n, 1, None, res.min_ratio, 1.0 / (n + 1), res.E, res.theta)


def check_projection(K: VPolytope, k: int, config: TrialConfig, rng=None, frames=None) -> dict:
    n = K.ambient_dim
    res = sweep_min_ratio(K, k, config, "projection", rng, frames)
    return _row("projection", n, k, None, res.min_ratio, grunbaum_bound(n, k), res.E, res.theta)


def check_sections(K: VPolytope, k: int, config: TrialConfig, rng=None, frames=None) -> dict:
    n = K.ambient_dim
    res = sweep_min_ratio(K, k, config, "section", rng, frames)
    row = _row("section", n, k, None, res.min_ratio, grunbaum_bound(n, k), res.E, res.theta)
    if config.mc_samples:
        L = section(K, None, res.E)
        est, sig = mc_halved_ratio(L, coords_in(res.theta, res.E), config.mc_samples, config.seed)
        row["mc_delta"] = float((res.min_ratio - est) / sig) if sig > 0 else 0.0
    return row


def check_functional(f: GammaFunction, E: Subspace, theta) -> dict:
    """∫_{E∩θ⁺} f / ∫_E f against the k-dimensional functional constant."""
    r = halfspace_mass_ratio(f, E, theta)
    return _row("functional", f.n, E.dim, f.gamma, r, functional_bound(f.n, E.dim, f.gamma), E, theta)


def sweep_functional(f: GammaFunction, k: int, config: TrialConfig, rng: np.random.Generator) -> dict:
    """check_functional minimised over random frames and a θ-grid in each."""
    n = f.n
    worst = None
    grid = direction_grid(k, config.theta_grid_size)
    frames = [Subspace(n, np.eye(n))] if k == n else [random_subspace(n, k, rng) for _ in range(config.num_frames)]
    bound = functional_bound(n, k, f.gamma)
    for E in frames:
        try:
            vals = halfspace_mass_ratios(f, E, grid)
        except ValueError as exc:
            log.info("skipping a functional frame: %s", exc)
            continue
        i = int(np.argmin(vals))
        if worst is None or vals[i] < worst["ratio"]:
            theta = grid[i] @ E.basis
            worst = _row("functional", n, k, f.gamma, vals[i], bound, E, theta)
    if worst is None:
        raise DegenerateError("no frame meets the support in positive measure")
    return worst


def check_theorem(f: GammaFunction, config: TrialConfig) -> dict:
    """min over θ of ratio_from(0, f, θ) against the one-dimensional constant."""
    n = f.n
    U = direction_grid(n, config.theta_grid_size) if n > 1 else np.array([[1.0], [-1.0]])
    vals = np.array([ratio_from(0.0, f, u) for u in U])
    i = int(np.argmin(vals))
    best = [vals[i], U[i]]
    if n > 1 and config.refine_iters:
        chart = _FrameChart(Subspace(n, np.eye(n)), U[i], move_frame=False)

        def objective(p):
            th = chart(p)[2]
            r = ratio_from(0.0, f, th)
            if r < best[0]:
                best[:] = [r, th]
            return r

        _nelder_mead(objective, chart.size, config.refine_iters)
    th = np.asarray(best[1], float)
    return _row("theorem", n, 1, f.gamma, best[0], theorem_bound(n, f.gamma), orthonormalize([th]), th)


def check_transform_chain(f: GammaFunction, theta, max_samples: int = cfg.MAX_AFFINIZE_SAMPLES,
                          h: float | None = None) -> list[dict]:
    """Two rows: the last chain ratio against the constant, and the smallest chain step (≥ 0)."""
    res = transform_chain(f, theta, max_samples, h)
    r0, r1, r2 = res.ratios
    E = orthonormalize([theta])
    chain = [float(r0), float(r1), float(r2)]
    fp = fixed_point_error(f, res.affinization.F)
    last = _row("chain", f.n, 1, f.gamma, r2, theorem_bound(f.n, f.gamma), E, theta, chain=chain,
                fixed_point_error=fp)
    step = _row("chain-monotone", f.n, 1, f.gamma, min(r0 - r1, r1 - r2), 0.0, E, theta, chain=chain,
                fixed_point_error=fp)
    return [last, step]


def fixed_point_error(f: GammaFunction, F: GammaFunction, samples: int = 500, seed: int = 0) -> float:
    """sup |F − f| over the vertices of both supports and uniform points in their joint box."""
    rng = np.random.default_rng(seed)
    V = np.vstack([f.support.vertices, F.support.vertices])
    lo, hi = V.min(axis=0), V.max(axis=0)
    X = np.vstack([V, rng.uniform(lo, hi, (samples, f.n))])
    return float(np.max(np.abs(F.evaluate(X) - f.evaluate(X))))


# ---------------------------------------------------------------------------
# Monte Carlo oracle


_CHUNK = 200_000


def _box(obj, subspace: Subspace | None, point):
    """Sampling box (lo, hi) in the coordinates the samples are drawn in, and the lift map."""
    P = obj.support if isinstance(obj, GammaFunction) else obj
    if subspace is None:
        C = P.coords
        lift = lambda Y: P.origin + Y @ P.frame  # noqa: E731
    else:
        base = np.zeros(P.ambient_dim) if point is None else np.asarray(point, float)
        C = (P.vertices - base) @ subspace.basis.T
        lift = lambda Y: base + Y @ subspace.basis  # noqa: E731
    lo, hi = C.min(axis=0), C.max(axis=0)
    if C.shape[1] == 0 or np.any(hi - lo <= 0):
        raise ValueError("bounding box has zero volume")
    return lo, hi, lift


_IN_TOL = 1e-12  # samples are lifted into the affine hull, so only rounding separates them from it


def _weights(obj, X: np.ndarray) -> np.ndarray:
    if isinstance(obj, VPolytope):
        return obj.contains(X, tol=_IN_TOL).astype(float)
    if obj.affine is not None:
        a, b = obj.affine
        inside = obj.support.contains(X, tol=_IN_TOL)
        p = np.clip(b - X @ a, 0.0, None)
        return np.where(inside, obj.scale * (p ** obj.alpha if obj.alpha else 1.0), 0.0)
    return obj.evaluate(X)


def mc_oracle(obj, quantity: str, samples: int = 10 ** 6, seed: int = 0, point=None,
              subspace: Subspace | None = None):
    """Monte Carlo estimate and standard error of a volume, centroid, integral or fiber measure.

    ``obj`` is a VPolytope (weights are the indicator) or a GammaFunction.
    ``fiber`` measures obj over ``point + subspace``.  Samples are uniform
    in a bounding box, so the result is a plain hit-or-miss / box-average
    estimate; centroids use the ratio estimator with a delta-method error.
    """
    if quantity not in ("volume", "centroid", "integral", "fiber"):
        raise ValueError(f"unknown quantity {quantity!r}")
    if quantity == "fiber" and subspace is None:
        raise ValueError("fiber needs a subspace")
    if quantity != "fiber":
        subspace, point = None, None
    lo, hi, lift = _box(obj, subspace, point)
    box = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    s0 = s00 = 0.0
    d = obj.n if isinstance(obj, GammaFunction) else obj.ambient_dim
    s1 = np.zeros(d)
    s11 = np.zeros(d)
    s01 = np.zeros(d)
    done = 0
    while done < samples:
        m = min(_CHUNK, samples - done)
        X = lift(rng.uniform(lo, hi, (m, len(lo))))
        w = _weights(obj, X)
        s0 += w.sum()
        s00 += (w * w).sum()
        wx = w[:, None] * X
        s1 += wx.sum(axis=0)
        s11 += (wx * wx).sum(axis=0)
        s01 += (w[:, None] * wx).sum(axis=0)
        done += m
    N = float(samples)
    mean0 = s0 / N
    var0 = max(s00 / N - mean0 ** 2, 0.0)
    if quantity != "centroid":
        return box * mean0, box * math.sqrt(var0 / N)
    if s0 <= 0:
        raise ValueError("no mass hit by the samples")
    g = s1 / s0
    # delta method for the ratio of means E[wx]/E[w]
    mean1 = s1 / N
    var1 = s11 / N - mean1 ** 2
    cov = s01 / N - mean0 * mean1
    var_g = (var1 - 2 * g * cov + g ** 2 * var0) / (mean0 ** 2 * N)
    return g, np.sqrt(np.clip(var_g, 0.0, None))


def mc_halved_ratio(L: VPolytope, theta_coords, samples: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo vol(L ∩ θ⁺)/vol(L) for a full-dimensional L; θ is in L's ambient coordinates."""
    rng = np.random.default_rng(seed)
    lo, hi = L.coords.min(axis=0), L.coords.max(axis=0)
    Y = rng.uniform(lo, hi, (samples, L.dim))
    X = L.origin + Y @ L.frame
    inside = L.contains(X, tol=0.0)
    hits = int(inside.sum())
    if hits == 0:
        raise ValueError("no samples landed inside")
    up = theta_plus(theta_coords).height(X[inside]) >= 0
    p = up.mean()
    return float(p), float(math.sqrt(p * (1 - p) / hits))


# ---------------------------------------------------------------------------
# reports


ROW_SCHEMA = {
    "type": "object",
    "required": ["trial_id", "check", "n", "k", "gamma", "ratio", "bound", "margin", "mc_delta", "seed"],
    "properties": {
        "trial_id": {"type": "string"},
        "check": {"enum": list(CHECKS)},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "gamma": {"type": ["number", "null"]},
        "ratio": {"type": "number"},
        "bound": {"type": "number"},
        "margin": {"type": "number"},
        "mc_delta": {"type": ["number", "null"]},
        "seed": {"type": "integer"},
        "frame": {"type": ["array", "null"]},
        "theta": {"type": ["array", "null"], "items": {"type": "number"}},
        "chain": {"type": ["array", "null"], "items": {"type": "number"}},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["kind", "config", "rows", "skipped", "summary"],
    "properties": {
        "kind": {"type": "string"},
        "config": {"type": "object"},
        "rows": {"type": "array", "items": ROW_SCHEMA},
        "skipped": {
            "type": "array",
            "items": {"type": "object", "required": ["trial_id", "reason"]},
        },
        "summary": {
            "type": "object",
            "required": ["min_margin", "argmin", "violations", "skipped", "trials", "runtime"],
            "properties": {
                "min_margin": {"type": ["number", "null"]},
                "argmin": {"type": ["string", "null"]},
                "violations": {"type": "integer", "minimum": 0},
                "skipped": {"type": "integer", "minimum": 0},
                "trials": {"type": "integer", "minimum": 0},
                "runtime": {"type": "number", "minimum": 0},
            },
        },
    },
}

CSV_COLUMNS = ["trial_id", "n", "k", "gamma", "ratio", "bound", "margin", "mc_delta", "seed"]


@dataclass
class VerificationReport:
    kind: str
    config: dict
    tolerance: float = 1e-6
    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def violations(self) -> list[dict]:
        return [r for r in self.rows if r["margin"] < -self.tolerance]

    @property
    def summary(self) -> dict:
        worst = min(self.rows, key=lambda r: r["margin"]) if self.rows else None
        trials = {r["trial_id"].split(":")[0] for r in self.rows} | {s["trial_id"] for s in self.skipped}
        return {
            "min_margin": None if worst is None else worst["margin"],
            "argmin": None if worst is None else worst["trial_id"],
            "violations": len(self.violations),
            "skipped": len(self.skipped),
            "trials": len(trials),
            "runtime": float(self.runtime),
        }

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": dict(self.config, tolerance=self.tolerance),
            "rows": self.rows,
            "skipped": self.skipped,
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        jsonschema.validate(data, REPORT_SCHEMA)
        conf = dict(data["config"])
        tol = conf.pop("tolerance", 1e-6)
        return cls(data["kind"], conf, tol, list(data["rows"]), list(data["skipped"]),
                   data["summary"]["runtime"])

    def validate(self) -> None:
        jsonschema.validate(json.loads(json.dumps(self.to_dict())), REPORT_SCHEMA)


def emit_report(report: VerificationReport, path, format: str = "json") -> None:
    """Write the report as JSON (full) or CSV (one line per row)."""
    if format not in ("json", "csv"):
        raise ValueError(f"unknown report format {format!r}")
    report.validate()
    try:
        with open(path, "w", newline="") as fh:
            if format == "json":
                json.dump(report.to_dict(), fh, indent=2)
                fh.write("\n")
            else:
                w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
                w.writeheader()
                for r in report.rows:
                    w.writerow({c: ("" if r[c] is None else r[c]) for c in CSV_COLUMNS})
    except OSError as exc:
        raise OSError(f"could not write report to {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# drivers


KINDS = ("grunbaum", "minkrad", "projections", "sections", "functional", "theorem", "chain")


def _trial(kind: str, config: TrialConfig, index: int) -> list[dict]:
    rng = np.random.default_rng([config.seed, index])
    n, k = config.n, config.k
    if kind in ("grunbaum", "minkrad", "projections", "sections"):
        K = random_body(n, config.points, rng)
        if kind == "grunbaum":
            return [check_grunbaum(K, config)]
        if kind == "minkrad":
            return [check_minkrad(K, "support", config), check_minkrad(K, "radial", config)]
        if kind == "projections":
            return [check_projection(K, k, config, rng)]
        return [check_sections(K, k, config, rng)]
    gamma = config.gamma if config.gamma is not None else 1.0
    f = random_gamma_function(n, gamma, rng, config.num_points, config.num_forms)
    if kind == "functional":
        return [sweep_functional(f, k, config, rng)]
    if kind == "theorem":
        return [check_theorem(f, config)]
    theta = unit(rng.standard_normal(n))
    return check_transform_chain(f, theta, config.chain_samples)


def run_trial(kind: str, config: TrialConfig, index: int):
    """Rows of one trial, or (None, reason) when the instance is degenerate."""
    try:
        rows = _trial(kind, config, index)
    except (DegenerateError, ValueError, RuntimeError) as exc:
        log.warning("trial %d of %s skipped: %s", index, kind, exc)
        return None, str(exc)
    for r in rows:
        r["trial_id"] = f"{index}:{r['check']}"
        r["seed"] = int(config.seed)
    return rows, None


def run_verification(kind: str, config: TrialConfig, threads: int | None = None) -> VerificationReport:
    """Run ``config.num_bodies`` trials of one kind; rows come back in trial order."""
    if kind not in KINDS:
        raise ValueError(f"unknown verification kind {kind!r}")
    threads = threads if threads is not None else thread_count()
    t0 = time.perf_counter()
    indices = range(config.num_bodies)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: run_trial(kind, config, i), indices))
    else:
        results = [run_trial(kind, config, i) for i in indices]
    report = VerificationReport(kind, asdict(config), config.tolerance)
    for i, (rows, reason) in zip(indices, results):
        if rows is None:
            report.skipped.append({"trial_id": str(i), "reason": reason})
        else:
            report.rows.extend(rows)
    report.runtime = time.perf_counter() - t0
    return report
