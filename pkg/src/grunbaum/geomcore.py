"""Linear subspaces of R^n stored as orthonormal frames.

Points and directions are plain 1-D numpy arrays.  A :class:`Subspace` holds a
``(k, n)`` array whose rows are orthonormal; ``k = 0`` is allowed and denotes
the zero subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-10
MEMBERSHIP_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when vectors and subspaces live in different ambient spaces."""


def as_vector(x, n: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise DimensionError("vector must have dimension >= 1")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if n is not None and v.size != n:
        raise DimensionError(f"expected a vector in R^{n}, got R^{v.size}")
    return v


@dataclass(frozen=True, eq=False)
class Subspace:
    """A k-dimensional linear subspace of R^n with an orthonormal basis."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float).reshape(-1, self.ambient_dim)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def orthonormality_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.basis @ self.basis.T - np.eye(self.dim))))

    def __repr__(self) -> str:
        return f"Subspace(n={self.ambient_dim}, k={self.dim})"

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n))

    @classmethod
    def coordinate(cls, n: int, axes) -> "Subspace":
        """Span of the standard basis vectors with the given (0-based) indices."""
        return cls(n, np.eye(n)[list(axes)])


def _mgs(vectors: np.ndarray, start: np.ndarray | None = None) -> np.ndarray:
    # modified Gram-Schmidt, two passes per vector
    n = vectors.shape[1]
    out = [] if start is None else list(start)
    for v in vectors:
        w = v.astype(float).copy()
        scale = np.linalg.norm(w)
        if scale == 0.0:
            continue
        for _ in range(2):
            for q in out:
                w -= np.dot(q, w) * q
        norm = np.linalg.norm(w)
        if norm < RANK_TOL * max(scale, 1.0) or norm < RANK_TOL:
            continue
        out.append(w / norm)
    if not out:
        return np.zeros((0, n))
    return np.array(out)


def orthonormalize(spanning) -> Subspace:
    """Orthonormal frame of the span of ``spanning``; dependent vectors are dropped."""
    vecs = np.asarray(spanning, dtype=float)
    if vecs.size == 0:
        raise ValueError("cannot orthonormalize an empty list of vectors")
    vecs = np.atleast_2d(vecs)
    basis = _mgs(vecs)
    if basis.shape[0] == 0:
        raise ValueError("all spanning vectors are numerically zero")
    return Subspace(vecs.shape[1], basis)


def complement(E: Subspace) -> Subspace:
    """Orthogonal complement of ``E`` (possibly the zero subspace)."""
    n = E.ambient_dim
    if E.dim == n:
        return Subspace(n, np.zeros((0, n)))
    if E.dim == 0:
        return Subspace.full(n)
    full = _mgs(np.eye(n), start=E.basis)
    return Subspace(n, full[E.dim:])


def _check(x: np.ndarray, E: Subspace) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != E.ambient_dim:
        raise DimensionError(f"point in R^{x.shape[-1]} vs subspace of R^{E.ambient_dim}")
    return x


def project_point(x, E: Subspace) -> np.ndarray:
    """Orthogonal projection onto ``E``; accepts a single point or an (m, n) array."""
    x = _check(x, E)
    return (x @ E.basis.T) @ E.basis


def coords_in(x, E: Subspace, check: bool = True) -> np.ndarray:
    """Coordinates of ``x`` (which must lie in ``E``) with respect to E's basis."""
    x = _check(x, E)
    c = x @ E.basis.T
    if check:
        resid = np.linalg.norm(x - c @ E.basis, axis=-1)
        scale = np.maximum(1.0, np.linalg.norm(x, axis=-1))
        if np.any(resid > MEMBERSHIP_TOL * scale):
            raise ValueError(f"point not in subspace (residual {float(np.max(resid)):.3g})")
    return c


def lift(c, E: Subspace) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape[-1] != E.dim:
        raise DimensionError(f"expected {E.dim} coordinates, got {c.shape[-1]}")
    return c @ E.basis


def span_with(theta, E: Subspace) -> Subspace:
    """span(E, theta); unchanged when theta already lies in E."""
    theta = as_vector(theta, E.ambient_dim)
    return Subspace(E.ambient_dim, _mgs(theta[None, :], start=E.basis))


def same_subspace(E: Subspace, F: Subspace, tol: float = 1e-10) -> bool:
    if E.ambient_dim != F.ambient_dim or E.dim != F.dim:
        return False
    return bool(np.max(np.abs(E.projector - F.projector)) < tol)


def random_subspace(n: int, k: int, rng: np.random.Generator) -> Subspace:
    """Haar-distributed k-frame in R^n (QR of a Gaussian matrix)."""
    if k == 0:
        return Subspace(n, np.zeros((0, n)))
    q, r = np.linalg.qr(rng.standard_normal((n, k)))
    q = q * np.sign(np.diag(r))
    return Subspace(n, q.T)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("zero vector has no direction")
    return v / nrm
