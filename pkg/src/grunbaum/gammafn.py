"""γ-concave functions f = m · χ_K · p^{1/γ} with a piecewise-linear profile p.

The profile is stored as a soup of cells: n-simplices in ``cells`` with the
values of p at their vertices in ``values``.  p is affine on each cell, so all
integrals (total mass, first moments, masses of halfspaces, ray integrals) are
computed exactly, and restricting to an affine subspace is again a PL
function of the same kind.

``gamma = inf`` encodes the indicator of the support (p ≡ 1, exponent 0).
"""

from __future__ import annotations

import json
import math
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from . import simplices as sx
from .geomcore import Subspace, as_vector, complement, coords_in, unit
from .polytope import (
    DegenerateError,
    Halfspace,
    VPolytope,
    clip,
    hull,
    project,
    refined_points,
    theta_plus,
    triangulate_points,
)
from . import config


def beta_integral(u: float, v: float) -> float:
    """B(u, v) = Γ(u)Γ(v)/Γ(u+v) evaluated through log-gamma."""
    if u <= 0 or v <= 0:
        raise ValueError("Beta function needs positive arguments")
    return math.exp(gammaln(u) + gammaln(v) - gammaln(u + v))


def marginal_gamma(gamma: float, k: int) -> float:
    """Concavity exponent of a (k-1)-dimensional marginal of a γ-concave function."""
    if math.isinf(gamma):
        return 1.0 / (k - 1) if k > 1 else math.inf
    return gamma / ((k - 1) * gamma + 1.0)


class GammaFunction:
    """f(x) = scale · p(x)^{1/gamma} on the union of ``cells``, 0 elsewhere."""

    def __init__(self, cells, values, gamma: float, scale: float = 1.0, affine=None, support=None, forms=None):
        self.cells = np.asarray(cells, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.cells.ndim != 3 or self.cells.shape[1] != self.cells.shape[2] + 1:
            raise ValueError("cells must be an (S, n+1, n) stack of n-simplices")
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.gamma = float(gamma)
        self.scale = float(scale)
        self.affine = None if affine is None else (np.asarray(affine[0], float), float(affine[1]))
        # p = min_j (c_j - <A_j, x>) on the support, when known: fast evaluation
        self.forms = None if forms is None else (np.atleast_2d(np.asarray(forms[0], float)),
                                                 np.asarray(forms[1], float).reshape(-1))
        if support is not None:
            self.__dict__["support"] = support

    # ------------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.cells.shape[2]

    @property
    def alpha(self) -> float:
        """Exponent 1/gamma (0 for indicators)."""
        return 0.0 if math.isinf(self.gamma) else 1.0 / self.gamma

    @cached_property
    def support(self) -> VPolytope:
        return hull(self.cells.reshape(-1, self.n))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, gamma={self.gamma:g}, cells={len(self.cells)})"

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_mesh(cls, points, simplices, values, gamma, scale=1.0, **kw):
        P = np.asarray(points, dtype=float)
        S = np.asarray(simplices, dtype=int)
        v = np.asarray(values, dtype=float)
        return cls(P[S], v[S], gamma, scale, **kw)

    @classmethod
    def from_affine(cls, K: VPolytope, a, b: float, gamma: float, scale: float = 1.0):
        """p(x) = b - <a, x> on K (must be >= 0 there)."""
        a = as_vector(a, K.ambient_dim)
        cells = K.vertices[K.simplices]
        vals = b - cells @ a
        return cls(cells, vals, gamma, scale, affine=(a, b), support=K)

    @classmethod
    def indicator(cls, K: VPolytope):
        return cls.from_affine(K, np.zeros(K.ambient_dim), 1.0, math.inf)

    @classmethod
    def from_min_affine(cls, K: VPolytope, A, c, gamma: float, scale: float = 1.0):
        """p(x) = min_j (c_j - <A_j, x>), triangulated along its cells of linearity."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        c = np.asarray(c, dtype=float).reshape(-1)
        if np.min(np.min(c[None, :] - K.vertices @ A.T, axis=1)) < -1e-12:
            raise ValueError("profile is negative on the support")
        if len(c) == 1:
            return cls.from_affine(K, A[0], c[0], gamma, scale)
        cells, vals = [], []
        for j in range(len(c)):
            R = K
            for i in range(len(c)):
                if i != j and not R.is_empty:
                    R = clip(R, Halfspace(A[j] - A[i], c[j] - c[i]))
            if R.dim < K.ambient_dim:
                continue
            S = R.vertices[R.simplices]
            cells.append(S)
            vals.append(c[j] - S @ A[j])
        return cls(np.concatenate(cells), np.concatenate(vals), gamma, scale, support=K, forms=(A, c))

    @classmethod
    def from_profile(cls, K: VPolytope, profile, gamma: float, scale: float = 1.0, h: float | None = None):
        """Sample a concave profile callable at a refined triangulation of K."""
        h = h if h is not None else config.PROFILE_REFINEMENT * K.diameter
        Y = K.origin + refined_points(K, h) @ K.frame
        vals = np.array([profile(y) for y in Y], dtype=float)
        return cls.from_mesh(Y, triangulate_points(Y), vals, gamma, scale)

    # -- pointwise ----------------------------------------------------------
    @cached_property
    def _bary(self):
        v0 = self.cells[:, 0, :]
        T = self.cells[:, 1:, :] - v0[:, None, :]
        return v0, np.linalg.inv(T)

    def profile(self, X) -> np.ndarray:
        """p at the points (nan outside the support)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(len(X), np.nan)
        if self.forms is not None:
            A, c = self.forms
            inside = self.support.contains(X, tol=1e-10)
            out[inside] = np.min(c[None, :] - X[inside] @ A.T, axis=1)
            return out
        v0, Tinv = self._bary
        S = len(self.cells)
        chunk = max(1, 200000 // max(S * self.n, 1))
        for lo in range(0, len(X), chunk):
            Xc = X[lo:lo + chunk]
            mu = np.einsum("psn,snm->psm", Xc[:, None, :] - v0[None], Tinv)
            lam = np.concatenate([1.0 - mu.sum(axis=2, keepdims=True), mu], axis=2)
            ok = np.all(lam >= -1e-10, axis=2)
            hit = ok.any(axis=1)
            first = np.argmax(ok, axis=1)
            rows = np.nonzero(hit)[0]
            vals = np.einsum("pj,pj->p", lam[rows, first[rows]], self.values[first[rows]])
            out[lo + rows] = vals
        return out

    def evaluate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        p = self.profile(X)
        inside = ~np.isnan(p)
        f = np.zeros(len(p))
        if self.alpha == 0.0:
            f[inside] = self.scale
        else:
            f[inside] = self.scale * np.clip(p[inside], 0.0, None) ** self.alpha
        return f[0] if single else f

    __call__ = evaluate

    # -- integrals ------------------------------------------------------------
    def _cell_integrals(self, cells, vals, method: str = "exact"):
        if len(cells) == 0:
            return 0.0, np.zeros(cells.shape[-1] if cells.ndim == 3 else self.n)
        if method == "exact":
            I0, I1 = sx.power_integrals(cells, vals, self.alpha)
        elif method == "gauss":
            I0, I1 = sx.gauss_integrals(cells, vals, self.alpha)
        else:
            raise ValueError(f"unknown integration method {method!r}")
        order = np.argsort(I0)
        return self.scale * float(np.sum(I0[order])), self.scale * I1[order].sum(axis=0)

    @cached_property
    def moments(self) -> tuple[float, np.ndarray]:
        """(∫f, ∫x f) by the exact simplex integrator."""
        return self._cell_integrals(self.cells, self.values)

    def integrate(self, method: str = "exact") -> float:
        if method == "exact":
            return self.moments[0]
        return self._cell_integrals(self.cells, self.values, method)[0]

    def fn_centroid(self, method: str = "exact") -> np.ndarray:
        I0, I1 = self.moments if method == "exact" else self._cell_integrals(self.cells, self.values, method)
        if I0 <= 0:
            raise ValueError("function has zero integral")
        return I1 / I0

    def halfspace_moments(self, H: Halfspace) -> tuple[float, np.ndarray]:
        """(∫_H f, ∫_H x f)."""
        aug = np.concatenate([self.cells, self.values[:, :, None]], axis=2)
        pieces = sx.positive_part(aug, self.cells @ H.normal - H.offset)
        return self._cell_integrals(pieces[:, :, :-1], pieces[:, :, -1])

    # -- one-dimensional slices -------------------------------------------------
    def line_pieces(self, x0, direction) -> np.ndarray:
        """Pieces of the line x0 + s·direction inside the support.

        Returns an (m, 4) array of rows (s_lo, s_hi, p(s_lo), p(s_hi)), sorted
        and with duplicate/overlapping pieces (lines running inside a shared
        face) removed.
        """
        x0 = as_vector(x0, self.n)
        d = as_vector(direction, self.n)
        v0, Tinv = self._bary
        mu0 = np.einsum("sn,snm->sm", x0[None] - v0, Tinv)
        dmu = np.einsum("n,snm->sm", d, Tinv)
        lam0 = np.concatenate([1.0 - mu0.sum(axis=1, keepdims=True), mu0], axis=1)
        dlam = np.concatenate([-dmu.sum(axis=1, keepdims=True), dmu], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -lam0 / dlam
        lo = np.where(dlam > 0, t, -np.inf).max(axis=1)
        hi = np.where(dlam < 0, t, np.inf).min(axis=1)
        flat = np.abs(dlam) <= 1e-15
        bad = np.any(flat & (lam0 < -1e-12), axis=1)
        ok = (~bad) & (hi - lo > 1e-12 * max(1.0, float(np.max(np.abs(x0)))))
        if not ok.any():
            return np.zeros((0, 4))
        lo, hi = lo[ok], hi[ok]
        pv = self.values[ok]
        plo = np.einsum("sj,sj->s", lam0[ok] + lo[:, None] * dlam[ok], pv)
        phi = np.einsum("sj,sj->s", lam0[ok] + hi[:, None] * dlam[ok], pv)
        order = np.argsort(lo)
        rows = []
        end = -np.inf
        for i in order:
            a, b = lo[i], hi[i]
            if b <= end + 1e-12:
                continue
            if a < end:
                slope = (phi[i] - plo[i]) / (b - a)
                plo_i = plo[i] + slope * (end - a)
                a = end
            else:
                plo_i = plo[i]
            rows.append((a, b, plo_i, phi[i]))
            end = b
        return np.array(rows)

    def _piece_integral(self, a, b, pa, pb) -> np.ndarray:
        """∫_a^b m·p(s)^{1/γ} ds for p affine from pa to pb (vectorised)."""
        a, b = np.asarray(a, float), np.asarray(b, float)
        pa, pb = np.clip(pa, 0.0, None), np.clip(pb, 0.0, None)
        L = b - a
        if self.alpha == 0.0:
            return self.scale * L
        e = self.alpha + 1.0
        diff = pb - pa
        big = np.abs(diff) > 1e-9 * np.maximum(np.maximum(pa, pb), 1e-300)
        out = np.empty_like(L)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(big, L * (pb ** e - pa ** e) / (e * diff), L * (0.5 * (pa + pb)) ** self.alpha)
        return self.scale * out

    def slice_mass(self, x0, direction, a: float = -math.inf) -> float:
        """∫_a^∞ f(x0 + s·direction) ds."""
        P = self.line_pieces(x0, direction)
        if len(P) == 0:
            return 0.0
        lo = np.maximum(P[:, 0], a)
        keep = P[:, 1] > lo
        P, lo = P[keep], lo[keep]
        if len(P) == 0:
            return 0.0
        t = (lo - P[:, 0]) / (P[:, 1] - P[:, 0])
        plo = P[:, 2] + t * (P[:, 3] - P[:, 2])
        return float(np.sum(self._piece_integral(lo, P[:, 1], plo, P[:, 3])))

    def ray_integral(self, theta, t0: float = 0.0) -> float:
        """∫_{t0}^∞ f(sθ) ds."""
        return self.slice_mass(np.zeros(self.n), theta, t0)

    # -- restriction and transformation ----------------------------------------
    def restrict(self, point, subspace: Subspace) -> "GammaFunction":
        """f restricted to point + subspace, in the subspace's coordinates."""
        if subspace.ambient_dim != self.n:
            raise ValueError("subspace lives in a different dimension")
        point = np.zeros(self.n) if point is None else as_vector(point, self.n)
        if subspace.dim == self.n:
            cells = (self.cells - point) @ subspace.basis.T
            return GammaFunction(cells, self.values, self.gamma, self.scale)
        stack = np.concatenate([self.cells, self.values[:, :, None]], axis=2)
        for u in complement(subspace).basis:
            h = (stack[:, :, : self.n] - point) @ u
            if h.max() <= 1e-12 * max(1.0, float(np.abs(h).max())):
                h = -h  # supporting hyperplane from the negative side
            out = []
            for Sk, hk in zip(stack, h):
                if hk.max() < -1e-12 * max(1.0, np.abs(hk).max()) or hk.min() > 1e-12 * max(1.0, np.abs(hk).max()):
                    continue
                _, _, sec = sx.split(Sk, hk)
                out.extend(sec)
            if not out:
                raise DegenerateError("affine subspace misses the support")
            stack = np.array(out)
        cells = (stack[:, :, : self.n] - point) @ subspace.basis.T
        vol = sx.volumes(cells)
        keep = vol > 1e-14 * max(1.0, float(np.max(vol)))
        if not keep.any():
            raise DegenerateError("restriction has measure zero")
        return GammaFunction(cells[keep], stack[keep, :, -1], self.gamma, self.scale)

    def translate(self, t) -> "GammaFunction":
        """x -> f(x - t)."""
        t = as_vector(t, self.n)
        aff = forms = None
        if self.affine is not None:
            a, b = self.affine
            aff = (a, b + float(a @ t))
        if self.forms is not None:
            A, c = self.forms
            forms = (A, c + A @ t)
        return GammaFunction(self.cells + t, self.values, self.gamma, self.scale, affine=aff, forms=forms)

    def recentered(self, tol: float = 1e-8, max_steps: int = 40) -> "GammaFunction":
        """Translate until the centroid is at the origin."""
        g = self
        for _ in range(max_steps):
            c = g.fn_centroid()
            if np.linalg.norm(c) < tol:
                return g
            g = g.translate(-c)
        raise RuntimeError("recentering did not converge")

    # -- diagnostics --------------------------------------------------------------
    def random_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        vol = sx.volumes(self.cells)
        idx = rng.choice(len(self.cells), size=count, p=vol / vol.sum())
        lam = rng.dirichlet(np.ones(self.n + 1), size=count)
        return np.einsum("pj,pjn->pn", lam, self.cells[idx])

    def concavity_slack(self, rng: np.random.Generator, pairs: int = 200) -> float:
        """min over random pairs of p((x+y)/2) - (p(x)+p(y))/2."""
        X = self.random_points(pairs, rng)
        Y = self.random_points(pairs, rng)
        pm = self.profile(0.5 * (X + Y))
        return float(np.min(pm - 0.5 * (self.profile(X) + self.profile(Y))))

    # -- serialisation --------------------------------------------------------------
    def to_dict(self) -> dict:
        gamma = "inf" if math.isinf(self.gamma) else self.gamma
        out = {"gamma": gamma, "scale": self.scale, "support": self.support.to_dict()}
        if self.affine is not None:
            out["affine"] = {"a": self.affine[0].tolist(), "b": self.affine[1]}
        else:
            pts = self.cells.reshape(-1, self.n)
            uniq, inv = np.unique(pts, axis=0, return_inverse=True)
            vals = np.zeros(len(uniq))
            vals[inv.reshape(-1)] = self.values.reshape(-1)
            out["profile"] = {
                "vertices": uniq.tolist(),
                "simplices": inv.reshape(len(self.cells), self.n + 1).tolist(),
                "values": vals.tolist(),
            }
            if self.forms is not None:
                out["profile"]["forms"] = {"A": self.forms[0].tolist(), "c": self.forms[1].tolist()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "GammaFunction":
        gamma = math.inf if data["gamma"] == "inf" else float(data["gamma"])
        K = VPolytope.from_dict(data["support"])
        if "affine" in data:
            return cls.from_affine(K, data["affine"]["a"], data["affine"]["b"], gamma, data["scale"])
        prof = data["profile"]
        forms = None
        if "forms" in prof:
            forms = (prof["forms"]["A"], prof["forms"]["c"])
        return cls.from_mesh(prof["vertices"], prof["simplices"], prof["values"], gamma, data["scale"], forms=forms)

    @classmethod
    def from_json(cls, text: str) -> "GammaFunction":
        return cls.from_dict(json.loads(text))


class ConeAffineFunction(GammaFunction):
    """f(x) = m · χ_K(x) · (r⟨θ,ξ⟩ - ⟨x,ξ⟩)^{1/γ}.

    If the support is a cone whose base lies in the zero level set of the
    form (``apex``/``base`` given), mass and centroid come from Beta-function
    slicing instead of the general simplex integrator.
    """

    def __init__(self, K: VPolytope, gamma: float, m: float, xi, r: float, theta, apex=None, base=None):
        xi = unit(as_vector(xi, K.ambient_dim))
        theta = unit(as_vector(theta, K.ambient_dim))
        b = r * float(theta @ xi)
        cells = K.vertices[K.simplices]
        vals = b - cells @ xi
        if np.min(vals) < -1e-9 * max(1.0, abs(b)):
            raise ValueError("linear form is negative on the support")
        super().__init__(cells, vals, gamma, m, affine=(xi, b), support=K)
        self.xi, self.r, self.theta = xi, float(r), theta
        self.apex = None if apex is None else np.asarray(apex, dtype=float)
        self.base = base

    @property
    def m(self) -> float:
        return self.scale

    def form(self, X) -> np.ndarray:
        return self.affine[1] - np.asarray(X, dtype=float) @ self.xi

    def beta_moments(self) -> tuple[float, np.ndarray]:
        """(∫f, ∫x f) for a cone with the base on the zero level (Beta slicing)."""
        if self.apex is None or self.base is None:
            raise ValueError("Beta slicing needs the apex and base of a cone support")
        n = self.n
        w = float(self.form(self.apex))
        a1 = self.alpha + 1.0
        vol_base = self.base.volume if n > 1 else 1.0
        mass = self.m * w ** a1 * vol_base * beta_integral(n, a1)
        frac = beta_integral(n + 1, a1) / beta_integral(n, a1)
        g = self.apex + frac * (self.base.centroid - self.apex)
        return mass, mass * g

    def translate(self, t) -> "ConeAffineFunction":
        t = as_vector(t, self.n)
        K = self.support.translate(t)
        # keep the same form, shifted: r' chosen so r'<θ,ξ> = r<θ,ξ> + <ξ,t>
        r = self.r + float(self.xi @ t) / float(self.theta @ self.xi)
        apex = None if self.apex is None else self.apex + t
        base = None if self.base is None else self.base.translate(t)
        return ConeAffineFunction(K, self.gamma, self.m, self.xi, r, self.theta, apex, base)


# ---------------------------------------------------------------------------
# marginals


class MarginalFunction(GammaFunction):
    """Sampled marginal F(y) = ∫_{Ẽ^⊥} f(y + z) dz on Ẽ (in Ẽ-coordinates).

    The PL interpolant of F^γ̃ is what the GammaFunction machinery sees;
    :meth:`exact` recomputes F at any point from the source function.
    """

    source: GammaFunction
    Etilde: Subspace

    def exact(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return fiber_integral(self.source, y @ self.Etilde.basis, self.Etilde)

    def quadrature_moments(self, q: int = 4) -> tuple[float, np.ndarray]:
        """(∫F, ∫y F) by conical Gauss quadrature of the exact fiber integrals.

        Independent of the PL interpolant, so it measures how much mass the
        sampled representation loses near the boundary of K|Ẽ.
        """
        lam, w = sx.conical_rule(self.n, q)
        vol = sx.volumes(self.cells)
        m0, m1 = 0.0, np.zeros(self.n)
        for S, v in zip(self.cells, vol):
            pts = lam @ S
            vals = np.array([self.exact(y) for y in pts])
            m0 += v * float(w @ vals)
            m1 += v * (w * vals) @ pts
        return m0, m1


def fiber_integral(f: GammaFunction, x, Etilde: Subspace) -> float:
    """∫ f over the affine fiber x + Ẽ^⊥."""
    fiber = complement(Etilde)
    if fiber.dim == 0:
        return float(f.evaluate(np.asarray(x, dtype=float)))
    if fiber.dim == 1:
        return f.slice_mass(x, fiber.basis[0])
    try:
        return f.restrict(x, fiber).integrate()
    except DegenerateError:
        return 0.0


def marginal(f: GammaFunction, Etilde: Subspace, h: float | None = None, max_points: int | None = None) -> MarginalFunction:
    """Marginal of f on Ẽ, sampled on a refined triangulation of K|Ẽ.

    The result is γ̃ = γ/((k-1)γ + 1)-concave, k - 1 = dim Ẽ^⊥.
    """
    n = f.n
    k = n - Etilde.dim + 1
    gt = marginal_gamma(f.gamma, k)
    if k == 1:
        cells = f.cells @ Etilde.basis.T
        F = MarginalFunction(cells, f.values, f.gamma, f.scale)
    else:
        base = project(f.support, Etilde)
        if base.dim != Etilde.dim:
            raise DegenerateError("projection onto Ẽ is degenerate")
        h = h if h is not None else config.PROFILE_REFINEMENT * base.diameter
        Y = base.origin + refined_points(base, h, max_points) @ base.frame
        F_vals = np.array([fiber_integral(f, y @ Etilde.basis, Etilde) for y in Y])
        simp = triangulate_points(Y)
        F = MarginalFunction(Y[simp], F_vals[simp] ** gt, gt, 1.0)
    F.source = f
    F.Etilde = Etilde
    return F


def bbl_midpoint_check(F: GammaFunction, y1, y2, lam: float) -> float:
    """F(λy1+(1-λ)y2)^γ̃ - [λF(y1)^γ̃ + (1-λ)F(y2)^γ̃] using exact fiber values."""
    ev = F.exact if isinstance(F, MarginalFunction) else (lambda y: float(F.evaluate(np.asarray(y, float))))
    y1, y2 = np.asarray(y1, float), np.asarray(y2, float)
    g = F.gamma
    F1, F2 = ev(y1), ev(y2)
    if F1 * F2 == 0:
        raise ValueError("BBL check needs F(y1)·F(y2) != 0")
    Fm = ev(lam * y1 + (1 - lam) * y2)
    if math.isinf(g):
        return 0.0 if Fm > 0 else -1.0
    return Fm ** g - (lam * F1 ** g + (1 - lam) * F2 ** g)


def halfspace_mass_ratio(f: GammaFunction, E: Subspace, theta) -> float:
    """∫_{E∩θ⁺} f / ∫_E f, integrals over the k-dimensional subspace E."""
    theta = unit(as_vector(theta, f.n))
    return float(halfspace_mass_ratios(f, E, coords_in(theta, E)[None, :])[0])


def halfspace_mass_ratios(f: GammaFunction, E: Subspace, C) -> np.ndarray:
    """halfspace_mass_ratio for many directions, given by their E-coordinates (rows of C).

    The restriction f|_E and its total mass are computed once.
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    try:
        g = f.restrict(None, E)
    except DegenerateError as exc:
        raise ValueError("section misses the support") from exc
    if E.dim == 1:
        den = g.ray_integral(np.array([1.0]), -math.inf)
        if den <= 0:
            raise ValueError("zero mass on E")
        return np.array([g.ray_integral(np.sign(c), 0.0) for c in C[:, 0]]) / den
    den = g.integrate()
    if den <= 0:
        raise ValueError("zero mass on E")
    return np.array([g.halfspace_moments(theta_plus(unit(c)))[0] for c in C]) / den
