"""Dense Hermitian linear algebra.

Operators are plain ``complex128`` ndarrays.  Functions that need a
Hermitian or positive semidefinite argument validate it on entry and work on
the symmetrized copy ``(H + H^+)/2``.

Bipartite composite index: ``i = a * d_B + b`` (A is the slow index), which is
what ``np.kron(A, B)`` produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import NumericalError, ValidationError

HERMITIAN_ATOL = 1e-10
PSD_RTOL = 1e-10
SUPPORT_CUTOFF = 1e-12
MAX_DIM = 4096


def as_hermitian(h, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate ``h`` as a square Hermitian matrix and return it symmetrized."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValidationError("matrix has non-finite entries")
    asym = np.max(np.abs(h - h.conj().T))
    if asym > atol:
        raise ValidationError(f"matrix is not Hermitian (max asymmetry {asym:.3g} > {atol:g})")
    return np.ascontiguousarray(0.5 * (h + h.conj().T))


def as_psd(p, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate ``p`` as positive semidefinite (relative tolerance on the spectrum)."""
    p = as_hermitian(p, atol)
    w = np.linalg.eigvalsh(p)
    if w[0] < -PSD_RTOL * max(w[-1], 1.0):
        raise ValidationError(f"matrix is not positive semidefinite (smallest eigenvalue {w[0]:.3g})")
    return p


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    h = as_hermitian(h)
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver failed: {exc}") from exc
    return w, u


def support_threshold(eigenvalues: np.ndarray) -> float:
    return SUPPORT_CUTOFF * max(float(eigenvalues[-1]), 1.0)


def matrix_power(p, exponent: float) -> np.ndarray:
    """``p ** exponent`` computed on the support of ``p``.

    Eigenvalues ``<= 1e-12 * max(lambda_max, 1)`` count as kernel and map to
    zero, so negative exponents give the generalized (pseudo-) inverse power.
    """
    if not np.isfinite(exponent):
        raise ValidationError("exponent must be finite")
    p = as_psd(p)
    return _kernels.herm_power(p, float(exponent), SUPPORT_CUTOFF)


def tensor(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product ``a (x) b`` with ``a`` as the slow index."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[0] * b.shape[0] > max_dim:
        raise ValidationError(f"tensor dimension {a.shape[0] * b.shape[0]} exceeds max {max_dim}")
    return np.kron(a, b)


def partial_trace(op, dims: Sequence[int], keep) -> np.ndarray:
    """Partial trace keeping the subsystems named by ``keep``.

    ``dims`` lists the factor dimensions in index order (slowest first).
    ``keep`` is ``"A"``/``"B"`` for the bipartite case, a single factor
    position, or a sequence of positions.
    """
    op = np.asarray(op, dtype=np.complex128)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != op.shape[0] or op.shape[0] != op.shape[1]:
        raise ValidationError(f"dims {dims} do not match operator shape {op.shape}")
    if isinstance(keep, str):
        labels = {"A": 0, "B": 1, "C": 2}
        if keep not in labels or labels[keep] >= len(dims):
            raise ValidationError(f"unknown subsystem label {keep!r}")
        keep = (labels[keep],)
    elif np.isscalar(keep):
        keep = (int(keep),)
    keep = tuple(sorted(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValidationError(f"subsystem index out of range: {keep}")
    n = len(dims)
    t = op.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # trace the highest positions first so earlier axis numbers stay valid
    for i in sorted(traced, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + m)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def trace_distance(a, b) -> float:
    """``(1/2) ||a - b||_1`` for Hermitian ``a`` and ``b``."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(_kernels.trace_norm_half(a - b))


def fidelity(rho, sigma) -> float:
    """Root fidelity ``||sqrt(rho) sqrt(sigma)||_1`` (no normalization assumed)."""
    rho = as_psd(rho)
    sigma = as_psd(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    a = _kernels.herm_power(rho, 0.5, SUPPORT_CUTOFF) @ _kernels.herm_power(sigma, 0.5, SUPPORT_CUTOFF)
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def jordan_decomposition(delta) -> tuple[np.ndarray, np.ndarray]:
    """Split Hermitian ``delta`` into orthogonal parts with ``delta = pos - neg``."""
    w, u = eig_hermitian(delta)
    pos = (u * np.clip(w, 0.0, None)) @ u.conj().T
    neg = (u * np.clip(-w, 0.0, None)) @ u.conj().T
    return pos, neg


@dataclass(frozen=True)
class Purification:
    """Pure vector on (original system) x C with index ``i * d_C + c``."""

    vector: np.ndarray
    d_C: int

    @property
    def dim(self) -> int:
        return self.vector.shape[0] // self.d_C

    @property
    def matrix(self) -> np.ndarray:
        """The vector reshaped to ``(dim, d_C)``; ``M M^+`` is the purified operator."""
        return self.vector.reshape(self.dim, self.d_C)

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def reduced(self) -> np.ndarray:
        m = self.matrix
        return m @ m.conj().T

    def complement(self) -> np.ndarray:
        """Operator on C obtained by tracing out the original system."""
        m = self.matrix
        return (m.T @ m.conj())


def purify(rho) -> Purification:
    """Spectral purification with ``d_C`` equal to the numerical rank of ``rho``."""
    w, u = eig_hermitian(as_psd(rho))
    order = np.argsort(w)[::-1]
    w, u = w[order], u[:, order]
    keep = w > support_threshold(np.sort(w))
    if not np.any(keep):
        raise ValidationError("cannot purify the zero operator")
    m = u[:, keep] * np.sqrt(w[keep])
    vec = m.reshape(-1)
    vec = vec / np.linalg.norm(vec)
    return Purification(vector=np.ascontiguousarray(vec), d_C=int(np.count_nonzero(keep)))


def close_purifications(rho, sigma) -> tuple[Purification, Purification]:
    """Uhlmann-optimal purifications on a shared purifying space of full dimension.

    ``rho`` is purified as ``sqrt(rho)``; ``sigma`` as ``sqrt(sigma) V`` with
    ``V`` the unitary from the polar decomposition of ``sqrt(sigma) sqrt(rho)``,
    so the overlap ``<psi_rho|psi_sigma>`` equals ``F(rho, sigma) >= 0``.
    """
    rho = as_psd(rho)
    sigma = as_psd(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    n = rho.shape[0]
    sr = _kernels.herm_power(rho, 0.5, SUPPORT_CUTOFF)
    ss = _kernels.herm_power(sigma, 0.5, SUPPORT_CUTOFF)
    # sqrt(sigma) sqrt(rho) = X S Y^+ ; choosing V = X Y^+ makes tr(sqrt(rho) sqrt(sigma) V)^+ = sum S
    x, _, yh = np.linalg.svd(ss @ sr)
    v = x @ yh
    # vector entries M[i, c]; overlap = tr(M_rho^+ M_sigma)
    m_rho = sr
    m_sigma = ss @ v
    pr = Purification(vector=m_rho.reshape(-1) / np.linalg.norm(m_rho), d_C=n)
    ps = Purification(vector=m_sigma.reshape(-1) / np.linalg.norm(m_sigma), d_C=n)
    return pr, ps


def overlap(a: Purification, b: Purification) -> complex:
    return complex(np.vdot(a.vector, b.vector))
