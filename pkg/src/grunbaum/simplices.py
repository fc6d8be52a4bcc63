"""Simplex-level kernels shared by the polytope and gamma-function code.

Everything here works on "augmented" simplices: arrays of shape ``(d+1, m)``
whose rows are vertices.  Extra trailing columns (e.g. profile values) are
carried through linear interpolation untouched, which is what makes cutting a
PL function along a hyperplane exact.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.interpolate import BSpline, PPoly
from scipy.special import gammaln, roots_jacobi

ZERO_TOL = 1e-12


def volumes(S: np.ndarray) -> np.ndarray:
    """d-dimensional volume of each simplex in an ``(N, d+1, n)`` stack."""
    S = np.asarray(S, dtype=float)
    d = S.shape[-2] - 1
    if d == 0:
        return np.zeros(S.shape[:-2])
    M = S[..., 1:, :] - S[..., :1, :]
    if M.shape[-1] == d:
        det = np.abs(np.linalg.det(M))
    else:
        det = np.sqrt(np.clip(np.linalg.det(M @ np.swapaxes(M, -1, -2)), 0.0, None))
    return det / math.factorial(d)


@lru_cache(maxsize=None)
def _paths(rows: int, cols: int) -> tuple:
    """Monotone lattice paths from (0,0) to (rows-1, cols-1) as cell lists."""
    steps = rows - 1 + cols - 1
    out = []
    for downs in combinations(range(steps), rows - 1):
        i = j = 0
        cells = [(0, 0)]
        down = set(downs)
        for s in range(steps):
            if s in down:
                i += 1
            else:
                j += 1
            cells.append((i, j))
        out.append(tuple(cells))
    return tuple(out)


def _staircase(grid: np.ndarray, extra: np.ndarray) -> list[np.ndarray]:
    rows, cols = grid.shape[:2]
    out = []
    for path in _paths(rows, cols):
        pts = [grid[i, j] for i, j in path]
        if len(extra):
            pts.extend(extra)
        out.append(np.array(pts))
    return out


def split(S: np.ndarray, h: np.ndarray, tol: float = ZERO_TOL):
    """Cut a simplex by the hyperplane ``h = 0`` (h given at the vertices).

    Returns ``(positive, negative, section)``: lists of simplices triangulating
    ``S ∩ {h >= 0}``, ``S ∩ {h <= 0}`` and ``S ∩ {h = 0}``.  The pieces are
    staircase triangulations of the truncated simplex, which is projectively a
    product of two simplices.  A facet lying in the plane is reported as a
    section only for the simplex on the positive side, so that a shared facet
    is not counted twice.
    """
    S = np.asarray(S, dtype=float)
    h = np.asarray(h, dtype=float)
    scale = max(1.0, float(np.max(np.abs(h))))
    pos = h > tol * scale
    neg = h < -tol * scale
    zer = ~(pos | neg)
    d = S.shape[0] - 1
    Z = S[zer]
    if not neg.any():
        section = [Z] if zer.sum() == d and d >= 1 and pos.any() else []
        return [S], [], section
    if not pos.any():
        return [], [S], []
    P, N = S[pos], S[neg]
    hp, hn = h[pos], h[neg]
    # c[i, j] = crossing of edge P_i N_j with the plane
    t = hp[:, None] / (hp[:, None] - hn[None, :])
    C = P[:, None, :] + t[:, :, None] * (N[None, :, :] - P[:, None, :])
    a, b = len(P), len(N)
    gpos = np.concatenate([P[:, None, :], C], axis=1)  # a x (b+1)
    gneg = np.concatenate([N[:, None, :], np.swapaxes(C, 0, 1)], axis=1)  # b x (a+1)
    return _staircase(gpos, Z), _staircase(gneg, Z), _staircase(C, Z)


def positive_part(S: np.ndarray, h: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    """Simplices triangulating the union of ``S_i ∩ {h >= 0}``, fully vectorised.

    Simplices are grouped by their sign pattern (a vertices with h >= 0,
    b with h < 0); each group is cut with one staircase triangulation in
    batch.  Trailing (non-geometric) columns are interpolated along; the
    caller slices them off before measuring volumes.
    """
    S = np.asarray(S, dtype=float)
    h = np.asarray(h, dtype=float)
    if len(S) == 0:
        return S
    scale = np.maximum(1.0, np.max(np.abs(h), axis=1, keepdims=True))
    h = np.where(np.abs(h) <= tol * scale, 0.0, h)
    neg = h < 0
    nneg = neg.sum(axis=1)
    d1 = S.shape[1]
    out = [S[nneg == 0]]
    for b in range(1, d1):
        idx = np.nonzero(nneg == b)[0]
        if len(idx) == 0:
            continue
        a = d1 - b
        order = np.argsort(neg[idx], axis=1, kind="stable")  # non-negative first
        Sg = np.take_along_axis(S[idx], order[:, :, None], axis=1)
        hg = np.take_along_axis(h[idx], order, axis=1)
        P, N = Sg[:, :a], Sg[:, a:]
        hp, hn = hg[:, :a], hg[:, a:]
        t = hp[:, :, None] / (hp[:, :, None] - hn[:, None, :])
        C = P[:, :, None, :] + t[..., None] * (N[:, None, :, :] - P[:, :, None, :])
        grid = np.concatenate([P[:, :, None, :], C], axis=2)  # (G, a, b+1, m)
        for path in _paths(a, b + 1):
            ii = [i for i, _ in path]
            jj = [j for _, j in path]
            out.append(grid[:, ii, jj, :])
    return np.concatenate(out, axis=0)


def clipped_moments(S: np.ndarray, h: np.ndarray) -> tuple[float, np.ndarray]:
    """(volume, first moment) of the union of ``S_i ∩ {h >= 0}``."""
    pieces = positive_part(S, h)
    if len(pieces) == 0:
        return 0.0, np.zeros(S.shape[-1])
    vol = volumes(pieces)
    return float(vol.sum()), vol @ pieces.mean(axis=1)


def clipped_volumes(S: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Volumes of ``S ∩ {h_t >= 0}`` for a batch of height fields ``H`` (T, len(S), d+1).

    The batch index rides along as an extra coordinate (it is constant on
    each simplex, so interpolation keeps it exact) and is used to bin the
    piece volumes.
    """
    H = np.asarray(H, dtype=float)
    T = H.shape[0]
    tiled = np.broadcast_to(S, (T,) + S.shape).reshape(-1, *S.shape[1:])
    tag = np.repeat(np.arange(T, dtype=float), len(S))
    aug = np.concatenate([tiled, np.broadcast_to(tag[:, None, None], tiled.shape[:2] + (1,))], axis=2)
    pieces = positive_part(aug, H.reshape(-1, S.shape[1]))
    if len(pieces) == 0:
        return np.zeros(T)
    vol = volumes(pieces[:, :, :-1])
    return np.bincount(pieces[:, 0, -1].round().astype(int), weights=vol, minlength=T)


# ---------------------------------------------------------------------------
# exact integrals of powers of affine functions over simplices


def _complete_homogeneous(p: np.ndarray, m: int) -> np.ndarray:
    """h_0..h_m of the rows of ``p`` -> array (N, m+1)."""
    N = p.shape[0]
    H = np.zeros((N, m + 1))
    H[:, 0] = 1.0
    for j in range(p.shape[1]):
        x = p[:, j]
        for r in range(1, m + 1):
            H[:, r] += x * H[:, r - 1]
    return H


def _integer_power(S, vals, m: int):
    d = S.shape[1] - 1
    vol = volumes(S)
    H = _complete_homogeneous(vals, m)
    c0 = math.factorial(m) * math.factorial(d) / math.factorial(d + m)
    I0 = vol * c0 * H[:, m]
    # h_m(p with p_i doubled) = sum_j p_i^j h_{m-j}(p)
    powers = vals[:, :, None] ** np.arange(m + 1)[None, None, :]
    Hrev = H[:, ::-1]
    hi = np.einsum("nij,nj->ni", powers, Hrev)
    c1 = math.factorial(m) * math.factorial(d) / math.factorial(d + m + 1)
    I1 = (vol * c1)[:, None] * np.einsum("ni,nik->nk", hi, S)
    return I0, I1


_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def bspline_power_mean(knots, alpha: float) -> float:
    """E[T^alpha] for T with the normalised B-spline density on ``knots``.

    This is the law of <lambda, p> for lambda uniform on the simplex when the
    knots are the vertex values p (Curry-Schoenberg), so it gives exact
    simplex integrals of p^alpha for affine p.
    """
    t = np.sort(np.clip(np.asarray(knots, dtype=float), 0.0, None))
    span = t[-1] - t[0]
    if span <= 1e-13 * max(1.0, t[-1]):
        return float(np.mean(t)) ** alpha
    deg = len(t) - 2
    B = BSpline.basis_element(t, extrapolate=False)
    pp = PPoly.from_spline(B.tck if hasattr(B, "tck") else B)
    x, c = pp.x, pp.c
    total = 0.0
    for j in range(len(x) - 1):
        lo, hi = x[j], x[j + 1]
        w = hi - lo
        if w <= 0 or hi <= t[0] or lo >= t[-1]:
            continue
        coef = c[:, j][::-1]  # coefficient of (s - lo)^r, r = 0..deg
        if not np.any(coef):
            continue
        if lo > 0.25 * w:
            s = lo + 0.5 * w * (_GL_X + 1.0)
            poly = np.polyval(coef[::-1], s - lo)
            total += 0.5 * w * float(np.sum(_GL_W * s ** alpha * poly))
        else:
            # int_lo^hi s^alpha (s - lo)^r ds, expanded binomially
            for r, cr in enumerate(coef):
                if cr == 0.0:
                    continue
                acc = 0.0
                for q in range(r + 1):
                    e = alpha + q + 1.0
                    acc += math.comb(r, q) * (-lo) ** (r - q) * (hi ** e - lo ** e) / e
                total += cr * acc
    return total * (deg + 1) / span


def _binom_series(beta: float, start: int, J: int) -> np.ndarray:
    """C(beta, start + j) for j = 0..J-1."""
    out = np.empty(J)
    c = math.exp(gammaln(beta + 1) - gammaln(start + 1) - gammaln(beta - start + 1)) if beta - start + 1 > 0 else None
    if c is None:  # fall back to the product form
        c = 1.0
        for i in range(start):
            c *= (beta - i) / (i + 1)
    for j in range(J):
        out[j] = c
        r = start + j
        c *= (beta - r) / (r + 1)
    return out


_TAYLOR_RADIUS = 0.5
_TAYLOR_TERMS = 60
_COND_LIMIT = 1e6  # cancellation budget of the explicit formula: ~1e-10 relative


def _taylor_sum(H: np.ndarray, c: np.ndarray, m: int, alpha: float) -> np.ndarray:
    """Σ_r C(β, m-1+r) c^{β-(m-1)-r} h_r, β = α + m - 1, times the B-spline normaliser."""
    beta = alpha + m - 1
    coef = _binom_series(beta, m - 1, _TAYLOR_TERMS)
    powers = c[:, None] ** (beta - (m - 1) - np.arange(_TAYLOR_TERMS))[None, :]
    K = math.exp(gammaln(m) + gammaln(alpha + 1) - gammaln(alpha + m))
    return K * np.sum(H * coef[None, :] * powers, axis=1)


def _taylor_means(Q: np.ndarray, alpha: float, augmented: bool = False):
    """Mean of p^alpha for B-spline knots ``Q`` (rows), by expanding x^beta at the midrange.

    Valid when every knot is within ``_TAYLOR_RADIUS`` times the centre of it.
    With ``augmented`` also returns, for each i, the mean for the knots with
    Q[:, i] doubled; the midrange is unchanged, so h_r(y ∪ {y_i}) follows
    from h_r(y) by the recurrence G_r = h_r + y_i G_{r-1}.
    """
    N, m = Q.shape
    c = 0.5 * (Q.max(axis=1) + Q.min(axis=1))
    out = np.zeros(N)
    aug = np.zeros((N, m))
    live = c > 0
    if live.any():
        c = c[live]
        Y = Q[live] - c[:, None]
        H = _complete_homogeneous(Y, _TAYLOR_TERMS - 1)
        out[live] = _taylor_sum(H, c, m, alpha)
        if augmented:
            G = np.empty((len(c), m, _TAYLOR_TERMS))
            G[:, :, 0] = 1.0
            for r in range(1, _TAYLOR_TERMS):
                G[:, :, r] = H[:, None, r] + Y * G[:, :, r - 1]
            for i in range(m):
                aug[live, i] = _taylor_sum(G[:, i, :], c, m + 1, alpha)
    return (out, aug) if augmented else out


def _direct_means(P: np.ndarray, alpha: float):
    """Means of p^alpha (d+1 knots) and the barycentric moments, by the divided-difference formula.

    Returns (mean, w, cond) where ``w[:, i]`` is the mean of λ_i p^alpha and
    ``cond`` estimates the cancellation in the alternating sums.
    """
    N, m = P.shape
    d = m - 1
    diff = P[:, :, None] - P[:, None, :]
    eye = np.eye(m, dtype=bool)
    diff[:, eye] = 1.0
    Pi = np.prod(diff, axis=2)
    inv = np.where(eye[None], 0.0, 1.0 / diff)
    # mean of p^alpha: d! Γ(α+1)/Γ(α+d+1) · [p_0..p_d] x^{α+d}
    beta = alpha + d
    t0 = P ** beta / Pi
    K0 = math.exp(gammaln(d + 1) + gammaln(alpha + 1) - gammaln(alpha + d + 1))
    mean = K0 * t0.sum(axis=1)
    cond = K0 * np.abs(t0).sum(axis=1) / np.maximum(np.abs(mean), 1e-300)
    # mean of λ_i p^alpha = (1/(α+1)) ∂/∂p_i of the mean of p^{α+1}
    b1 = alpha + 1 + d
    t1 = P ** b1 / Pi  # f(p_j)/Π_j
    own = b1 * P ** (b1 - 1) / Pi - t1 * inv.sum(axis=2)  # j = i term
    cross = np.einsum("nj,nji->ni", t1, inv)  # Σ_{j≠i} f(p_j)/(Π_j (p_j - p_i))
    K1 = math.exp(gammaln(d + 1) + gammaln(alpha + 2) - gammaln(alpha + d + 2))
    w = K1 / (alpha + 1) * (own + cross)
    scale1 = K1 / (alpha + 1) * (np.abs(own) + np.abs(np.einsum("nj,nji->ni", np.abs(t1), np.abs(inv))))
    with np.errstate(over="ignore"):  # inf marks the row ill-conditioned
        cond = np.maximum(cond, np.max(scale1 / np.maximum(np.abs(w), 1e-300), axis=1))
    return mean, w, cond


def power_integrals(S: np.ndarray, vals: np.ndarray, alpha: float):
    """Exact ``∫_S p^alpha`` and ``∫_S x p^alpha`` for p affine on each simplex.

    ``S`` is ``(N, d+1, n)`` (full-dimensional, d == n) and ``vals`` the
    ``(N, d+1)`` vertex values of p (clamped at 0).  Returns (I0 (N,), I1 (N, n)).

    Integer powers use the complete-homogeneous closed form.  Otherwise the
    simplex mean of p^alpha is a divided difference of x^{alpha+d} at the
    vertex values: clustered values are handled by a Taylor expansion at
    their midrange, well separated ones by the explicit formula, and the few
    rows where neither is accurate by the piecewise B-spline routine.
    """
    S = np.asarray(S, dtype=float)
    vals = np.clip(np.asarray(vals, dtype=float), 0.0, None)
    if S.shape[0] == 0:
        return np.zeros(0), np.zeros((0, S.shape[-1]))
    m = round(alpha)
    if abs(alpha - m) < 1e-12 and m >= 0:
        return _integer_power(S, vals, int(m))
    vol = volumes(S)
    N, d1 = vals.shape
    mean = np.empty(N)
    w = np.empty((N, d1))
    hi, lo = vals.max(axis=1), vals.min(axis=1)
    mid = 0.5 * (hi + lo)
    near = (hi - lo) <= 2 * _TAYLOR_RADIUS * mid
    if near.any():
        mean[near], aug = _taylor_means(vals[near], alpha, augmented=True)
        w[near] = aug / d1
    far = np.nonzero(~near)[0]
    if len(far):
        with np.errstate(divide="ignore", invalid="ignore"):
            mf, wf, cond = _direct_means(vals[far], alpha)
        good = np.isfinite(cond) & (cond < _COND_LIMIT) & np.all(np.isfinite(wf), axis=1)
        mean[far[good]] = mf[good]
        w[far[good]] = wf[good]
        for k in far[~good]:
            p = vals[k]
            mean[k] = bspline_power_mean(p, alpha)
            w[k] = [bspline_power_mean(np.append(p, p[i]), alpha) / d1 for i in range(d1)]
    I0 = vol * mean
    I1 = vol[:, None] * np.einsum("ni,nik->nk", w, S)
    return I0, I1


@lru_cache(maxsize=None)
def conical_rule(d: int, q: int):
    """Stroud conical product rule on the unit simplex: (barycentric pts, weights).

    Exact for polynomials of degree 2q-1; weights sum to 1 (normalised volume).
    """
    if d == 0:
        return np.ones((1, 1)), np.ones(1)
    xs, ws = [], []
    for j in range(1, d + 1):
        a = d - j
        x, w = roots_jacobi(q, a, 0.0)
        xs.append((x + 1.0) / 2.0)
        ws.append(w / 2.0 ** (a + 1))
    grids = np.meshgrid(*xs, indexing="ij")
    wgrid = np.ones_like(grids[0])
    for j, w in enumerate(ws):
        shape = [1] * d
        shape[j] = q
        wgrid = wgrid * w.reshape(shape)
    u = np.stack([g.reshape(-1) for g in grids], axis=1)
    lam = np.zeros((u.shape[0], d + 1))
    rest = np.ones(u.shape[0])
    for j in range(d):
        lam[:, j + 1] = rest * u[:, j]
        rest = rest * (1.0 - u[:, j])
    lam[:, 0] = rest
    w = wgrid.reshape(-1) * math.factorial(d)
    return lam, w


def _bisect_longest(S, vals):
    best, pair = -1.0, (0, 1)
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            L = np.sum((S[i] - S[j]) ** 2)
            if L > best:
                best, pair = L, (i, j)
    i, j = pair
    mid, mv = 0.5 * (S[i] + S[j]), 0.5 * (vals[i] + vals[j])
    A, B = S.copy(), S.copy()
    av, bv = vals.copy(), vals.copy()
    A[j], av[j] = mid, mv
    B[i], bv[i] = mid, mv
    return [(A, av), (B, bv)]


def gauss_integrals(S, vals, alpha: float, q: int = 4, q_check: int = 6, rtol: float = 1e-8):
    """Quadrature route for the same integrals as :func:`power_integrals`.

    Conical Gauss rule with ``q`` points per axis (degree 2q-1 exact); when the
    ``q`` and ``q_check`` rules disagree by more than ``rtol`` the simplex is
    split once into 2^d pieces by repeated longest-edge bisection.
    """
    S = np.asarray(S, dtype=float)
    vals = np.clip(np.asarray(vals, dtype=float), 0.0, None)
    d = S.shape[1] - 1

    def rule(Sk, vk, qq):
        lam, w = conical_rule(d, qq)
        vol = volumes(Sk[None])[0]
        pv = np.clip(lam @ vk, 0.0, None) ** alpha
        pts = lam @ Sk
        return vol * np.sum(w * pv), vol * (w * pv) @ pts

    I0 = np.zeros(len(S))
    I1 = np.zeros((len(S), S.shape[-1]))
    for k in range(len(S)):
        a0, a1 = rule(S[k], vals[k], q)
        b0, b1 = rule(S[k], vals[k], q_check)
        if abs(a0 - b0) > rtol * max(abs(b0), 1e-300):
            pieces = [(S[k], vals[k])]
            for _ in range(d):
                pieces = [c for p in pieces for c in _bisect_longest(*p)]
            b0, b1 = 0.0, np.zeros(S.shape[-1])
            for Sp, vp in pieces:
                c0, c1 = rule(Sp, vp, q_check)
                b0 += c0
                b1 = b1 + c1
        I0[k], I1[k] = b0, b1
    return I0, I1
