"""Finite-dimensional trace-class operator arithmetic.

Operators are plain complex numpy matrices. Density operators (states) are
Hermitian, positive semidefinite, unit-trace matrices; helpers here validate
them and split arbitrary operators into their four positive parts
A = (w1+ s1+ - w1- s1-) + i (w2+ s2+ - w2- s2-), with mutually orthogonal
signed parts and normalized states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default validation tolerances. Dimensions stay <= 64, so double-precision
# eigensolver error is several orders of magnitude below these.
TOL_HERM = 1e-9
TOL_POS = 1e-9
TOL_TRACE = 1e-9


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix of dim >= 2 with finite entries."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ValueError("operator dimension must be >= 2")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("operator entries must be finite")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a, tol: float = TOL_HERM) -> bool:
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_positive(a, tol: float = TOL_POS) -> bool:
    """True iff `a` is Hermitian within tol and its minimum eigenvalue >= -tol."""
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol):
        return False
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return bool(w.min() >= -tol)


def trace_norm(a) -> float:
    """Sum of singular values, ||a||_1."""
    a = np.asarray(a, dtype=complex)
    return float(np.linalg.svd(a, compute_uv=False).sum())


def purity(rho) -> float:
    """tr(rho^2); equals 1 exactly on pure states, 1/d on the maximally mixed."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def state_residuals(rho) -> dict:
    """Hermiticity / positivity / trace residuals of a candidate state."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return {
        "herm": herm,
        "neg": float(max(0.0, -w.min())),
        "trace": float(abs(np.trace(rho) - 1.0)),
    }


def is_density(rho, tol_herm: float = TOL_HERM, tol_pos: float = TOL_POS,
               tol_trace: float = TOL_TRACE) -> bool:
    r = state_residuals(rho)
    return r["herm"] <= tol_herm and r["neg"] <= tol_pos and r["trace"] <= tol_trace


def require_density(rho, **tols) -> np.ndarray:
    rho = as_operator(rho)
    if not is_density(rho, **tols):
        raise ValueError(f"not a density operator: residuals {state_residuals(rho)}")
    return rho


@dataclass(frozen=True)
class OperatorDecomposition:
    """Four-positive-parts split of a trace class operator.

    original = herm + 1j * skew, with herm/skew Hermitian;
    herm = weights[0]*states[0] - weights[1]*states[1],
    skew = weights[2]*states[2] - weights[3]*states[3].
    A zero part carries weight 0 and the zero matrix as its "state".
    """

    herm: np.ndarray
    skew: np.ndarray
    weights: np.ndarray   # (4,) nonnegative: [H+, H-, K+, K-]
    states: np.ndarray    # (4, d, d)

    def reconstruct(self) -> np.ndarray:
        h = self.weights[0] * self.states[0] - self.weights[1] * self.states[1]
        k = self.weights[2] * self.states[2] - self.weights[3] * self.states[3]
        return h + 1j * k


def _split_signed(h: np.ndarray, tol: float):
    """Split Hermitian h into (w+, s+, w-, s-) with s± states or zero.

    Eigenvalues with |lambda| <= tol are assigned to neither part.
    """
    w, v = np.linalg.eigh(h)
    d = h.shape[0]
    parts = []
    for sign in (+1, -1):
        sel = sign * w > tol
        if np.any(sel):
            vals = sign * w[sel]
            vecs = v[:, sel]
            pos = (vecs * vals) @ vecs.conj().T
            weight = float(vals.sum())
            parts.append((weight, pos / weight))
        else:
            parts.append((0.0, np.zeros((d, d), dtype=complex)))
    (wp, sp), (wm, sm) = parts
    return wp, sp, wm, sm


def decompose(a, tol: float = TOL_POS) -> OperatorDecomposition:
    """Split A into Hermitian/skew parts, each into orthogonal positive parts."""
    a = as_operator(a)
    try:
        herm = (a + a.conj().T) / 2
        skew = -1j * (a - a.conj().T) / 2
        whp, shp, whm, shm = _split_signed(herm, tol)
        wkp, skp, wkm, skm = _split_signed(skew, tol)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numerical failure
        raise ValueError(f"eigendecomposition failed for dim {a.shape[0]}: {exc}") from exc
    return OperatorDecomposition(
        herm=herm,
        skew=skew,
        weights=np.array([whp, whm, wkp, wkm]),
        states=np.stack([shp, shm, skp, skm]),
    )
