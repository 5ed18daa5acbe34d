"""Superoperators on trace class operators and their numerical classification.

A superoperator is stored as a matrix acting on column-stacked (Fortran-order)
vectorized operators. Antilinear maps such as A -> W conj(A) W* are antilinear
in the vectorization, so they carry an `antilinear` flag and their matrix acts
on the vectorization of conj(A); everything else about the storage is shared.

Classification distinguishes exact checks (trace preservation, complete
positivity via the Choi matrix) from sampled one-sided certificates
(positivity / pureness preservation on random pure states); sampled fields
carry the `_sampled` suffix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import is_density, purity, state_residuals, trace_norm
from .sampling import rand_pure, rng_for

# Scale-free cutoff: Choi rank one means the second eigenvalue is below
# CHOI_RANK1_CUT times the largest.
CHOI_RANK1_CUT = 1e-8


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(a, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape((dim, dim), order="F")


@dataclass(frozen=True)
class Superoperator:
    """Linear (or flagged-antilinear) map on d_in x d_in operators.

    matrix has shape (dim_out**2, dim_in**2) and acts on vec(A), or on
    vec(conj(A)) when `antilinear` is set.
    """

    dim_in: int
    dim_out: int
    matrix: np.ndarray
    antilinear: bool = False

    @property
    def dim(self) -> int:
        if self.dim_in != self.dim_out:
            raise ValueError("map is not square; use dim_in/dim_out")
        return self.dim_in

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return apply(self, a)

    def hs_adjoint(self) -> "Superoperator":
        """Hilbert-Schmidt adjoint (conjugate transpose of the matrix).

        For adjoint-preserving maps this realizes the Banach adjoint under
        the trace pairing on Hermitian operators.
        """
        return Superoperator(self.dim_out, self.dim_in, self.matrix.conj().T, self.antilinear)


def apply(phi: Superoperator, a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (phi.dim_in, phi.dim_in):
        raise ValueError(f"operator shape {a.shape} does not match map input dim {phi.dim_in}")
    v = vec(a.conj()) if phi.antilinear else vec(a)
    return unvec(phi.matrix @ v, phi.dim_out)


def compose(outer: Superoperator, inner: Superoperator) -> Superoperator:
    if outer.antilinear or inner.antilinear:
        raise ValueError("composition is implemented for linear maps only")
    if outer.dim_in != inner.dim_out:
        raise ValueError("dimension mismatch in composition")
    return Superoperator(inner.dim_in, outer.dim_out, outer.matrix @ inner.matrix)


# --------------------------------------------------------------------------
# Constructors for the named map classes
# --------------------------------------------------------------------------

def identity_channel(dim: int) -> Superoperator:
    return Superoperator(dim, dim, np.eye(dim * dim, dtype=complex))


def _require_isometry(t: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2 or t.shape[0] < t.shape[1]:
        raise ValueError(f"isometry must be tall or square, got shape {t.shape}")
    gram = t.conj().T @ t
    if np.max(np.abs(gram - np.eye(t.shape[1]))) > tol:
        raise ValueError("matrix is not an isometry (T*T != I)")
    return t


def conjugation_channel(u: np.ndarray) -> Superoperator:
    """A -> U A U* for unitary U."""
    u = _require_isometry(u)
    if u.shape[0] != u.shape[1]:
        raise ValueError("conjugation channel needs a unitary (square) matrix")
    d = u.shape[0]
    return Superoperator(d, d, np.kron(u.conj(), u))


def antiunitary_channel(w: np.ndarray) -> Superoperator:
    """A -> W conj(A) W* with entrywise conjugation; the map is antilinear."""
    w = _require_isometry(w)
    if w.shape[0] != w.shape[1]:
        raise ValueError("antiunitary channel needs a unitary (square) matrix")
    d = w.shape[0]
    return Superoperator(d, d, np.kron(w.conj(), w), antilinear=True)


def collapse_channel(rho0: np.ndarray) -> Superoperator:
    """A -> tr(A) rho0 for a fixed state rho0."""
    rho0 = np.asarray(rho0, dtype=complex)
    if not is_density(rho0):
        raise ValueError("collapse target must be a valid density operator")
    d = rho0.shape[0]
    return Superoperator(d, d, np.outer(vec(rho0), vec(np.eye(d))))


def isometry_mixture_channel(isometries, probs, tol: float = 1e-10) -> Superoperator:
    """A -> sum_k p_k T_k A T_k* for isometries with pairwise orthogonal ranges.

    Each entry of `isometries` is (matrix, is_antilinear). Antilinear entries
    contribute T_k conj(A) T_k*; mixing linear and antilinear isometries would
    produce a map that is neither, so homogeneous flags are required.
    """
    mats = []
    flags = []
    for t, anti in isometries:
        mats.append(_require_isometry(t, tol))
        flags.append(bool(anti))
    if len(set(flags)) > 1:
        raise ValueError("cannot mix linear and antilinear isometries in one map")
    probs = np.asarray(probs, dtype=float)
    if len(mats) != probs.size:
        raise ValueError("need one probability per isometry")
    if np.any(probs <= 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("probs must be strictly positive and sum to 1")
    d_in = mats[0].shape[1]
    d_out = mats[0].shape[0]
    for t in mats:
        if t.shape != (d_out, d_in):
            raise ValueError("all isometries must share the same shape")
    for k in range(len(mats)):
        for l in range(k + 1, len(mats)):
            if np.max(np.abs(mats[k].conj().T @ mats[l])) > tol:
                raise ValueError(f"ranges of isometries {k} and {l} are not orthogonal")
    m = sum(p * np.kron(t.conj(), t) for p, t in zip(probs, mats))
    return Superoperator(d_in, d_out, m, antilinear=flags[0])


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------

def choi_matrix(phi: Superoperator) -> np.ndarray:
    """Choi matrix sum_ij E_ij (x) Lambda(E_ij) of the stored linear action.

    For antilinear maps the stored matrix acts on conjugated coordinates and
    Lambda is that conjugate-coordinate linear map, so a rank-one positive
    Choi matrix still certifies a (anti)unitary symmetry.
    """
    d_in, d_out = phi.dim_in, phi.dim_out
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i in range(d_in):
        for k in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[i, k] = 1.0
            out = unvec(phi.matrix @ vec(e), d_out)
            j[i * d_out:(i + 1) * d_out, k * d_out:(k + 1) * d_out] = out
    return j


@dataclass
class MapClassification:
    is_trace_preserving: bool
    is_positive_sampled: bool
    is_completely_positive: bool
    is_pureness_preserving_sampled: bool
    is_symmetry: bool
    is_collapse: bool
    witness: np.ndarray | None = None
    collapse_target: np.ndarray | None = None
    recovered_unitary: np.ndarray | None = None
    margins: dict = field(default_factory=dict)


def _symmetry_data(phi: Superoperator, tol: float):
    """(is_symmetry, margins, recovered U) via the Choi spectrum."""
    j = choi_matrix(phi)
    herm_res = float(np.max(np.abs(j - j.conj().T)))
    w, v = np.linalg.eigh((j + j.conj().T) / 2)
    cp = herm_res <= tol * max(1.0, abs(w).max()) and w.min() >= -tol * max(1.0, w.max())
    rank1 = w[-2] <= CHOI_RANK1_CUT * w[-1] if w.size >= 2 else True
    recovered = None
    if cp and rank1 and phi.dim_in == phi.dim_out:
        u = np.sqrt(w[-1]) * v[:, -1].reshape(phi.dim_in, phi.dim_out).T
        k = np.unravel_index(np.argmax(np.abs(u)), u.shape)
        u = u * (np.abs(u[k]) / u[k])  # fix the free phase
        recovered = u
    margins = {
        "choi_herm_residual": herm_res,
        "choi_min_eig": float(w.min()),
        "choi_second_over_top": float(w[-2] / w[-1]) if w[-1] > 0 else 0.0,
    }
    return cp, rank1, margins, recovered


def classify(phi: Superoperator, samples: int = 200, seed: int = 0,
             tol: float = 1e-9) -> MapClassification:
    """Classify a map: trace preservation and CP exactly, the rest sampled.

    Positivity and pureness preservation are one-sided certificates obtained
    on `samples` random pure states. Symmetry detection requires a square,
    trace-preserving map whose Choi matrix is positive with rank one; the
    implementing (anti)unitary is recovered from the top Choi eigenvector.
    Collapse detection compares the matrix against tr(.)rho0 exactly.
    """
    rng = rng_for(seed, "classify")
    d_in, d_out = phi.dim_in, phi.dim_out

    tr_in = vec(np.eye(d_in))
    tr_out = vec(np.eye(d_out))
    tp_residual = float(np.max(np.abs(tr_out @ phi.matrix - tr_in)))
    is_tp = tp_residual <= tol

    trace_of_identity = float((tr_out @ phi.matrix @ tr_in).real)
    trace_sign = 1 if trace_of_identity >= 0 else -1

    min_out_eig = np.inf
    min_purity = np.inf
    positive = True
    for _ in range(samples):
        out = apply(phi, rand_pure(d_in, rng))
        r = state_residuals(out)
        if r["herm"] > tol:
            positive = False
        herm_out = (out + out.conj().T) / 2
        eigs = np.linalg.eigvalsh(herm_out)
        min_out_eig = min(min_out_eig, float(eigs.min()))
        min_purity = min(min_purity, purity(herm_out))
    positive = positive and min_out_eig >= -tol
    pureness = positive and min_purity >= 1.0 - max(tol, 1e-9)

    cp, rank1, choi_margins, recovered = _symmetry_data(phi, tol)
    is_symmetry = bool(is_tp and cp and rank1 and d_in == d_out and trace_sign > 0)

    # Collapse: matrix equals |vec(rho0)><vec(I)| for rho0 = Phi(I/d).
    rho0 = apply(phi, np.eye(d_in, dtype=complex) / d_in)
    collapse_residual = float(np.max(np.abs(phi.matrix - np.outer(vec(rho0), tr_in))))
    is_collapse = collapse_residual <= tol * max(1.0, float(np.max(np.abs(phi.matrix))))
    collapse_target = rho0 if is_collapse and is_density(rho0) else None
    is_collapse = is_collapse and collapse_target is not None

    # Dichotomy witness: Hermitian A with ||A||_1 = 1 but ||Phi(A)||_1 < 1.
    witness = None
    witness_norm = 1.0
    if not is_symmetry and is_tp and positive:
        for _ in range(min(samples, 50)):
            a = rand_pure(d_in, rng) - rand_pure(d_in, rng)
            n = trace_norm(a)
            if n < 1e-12:
                continue
            a = a / n
            out_norm = trace_norm(apply(phi, a))
            if out_norm < witness_norm:
                witness_norm = out_norm
                witness = a
        if witness_norm >= 1.0 - 1e-6:
            witness = None

    margins = {
        "tp_residual": tp_residual,
        "trace_of_identity": trace_of_identity,
        "min_output_eig_sampled": float(min_out_eig),
        "min_output_purity_sampled": float(min_purity),
        "collapse_residual": collapse_residual,
        "witness_output_norm": float(witness_norm),
        "trace_sign": trace_sign,
        **choi_margins,
    }
    return MapClassification(
        is_trace_preserving=is_tp,
        is_positive_sampled=bool(positive),
        is_completely_positive=bool(cp),
        is_pureness_preserving_sampled=bool(pureness),
        is_symmetry=is_symmetry,
        is_collapse=bool(is_collapse),
        witness=witness,
        collapse_target=collapse_target,
        recovered_unitary=recovered,
        margins=margins,
    )
