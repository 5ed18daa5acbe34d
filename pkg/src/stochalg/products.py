"""Binary state-preserving operations on states and their point geometry.

A product is stored as a bilinear evaluator on operators (the canonical
extension of the convex-bilinear operation on states) plus a descriptor that
records how it was built. Partial maps curry one argument into a
superoperator, which channel classification then sorts into bijective /
pureness-preserving / collapsing / generic points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import channels as ch
from .channels import Superoperator, apply, classify, unvec, vec
from .operators import maximally_mixed, state_residuals, trace_norm
from .sampling import rand_density, rand_pure, rng_for

TENSOR_DIM_LIMIT = 6


class ProductValidationError(ValueError):
    """Raised when a candidate bilinear map fails state preservation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class StochasticProduct:
    dim: int
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    descriptor: dict = field(default_factory=dict)

    def __call__(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        if a.shape != (self.dim, self.dim) or b.shape != (self.dim, self.dim):
            raise ValueError("operand shape does not match product dimension")
        return self.evaluate(a, b)

    def tensor(self) -> np.ndarray:
        """Explicit rank-3 tensor T[k,i,j]: vec(a o b) = T . vec(a) vec(b).

        Materialized only for dim <= 6 (d**6 entries).
        """
        if self.dim > TENSOR_DIM_LIMIT:
            raise ValueError(f"tensor materialization limited to dim <= {TENSOR_DIM_LIMIT}")
        d2 = self.dim * self.dim
        t = np.zeros((d2, d2, d2), dtype=complex)
        basis = [unvec(e, self.dim) for e in np.eye(d2)]
        for i, ei in enumerate(basis):
            for j, ej in enumerate(basis):
                t[:, i, j] = vec(self.evaluate(ei, ej))
        return t


def _sampled_state_check(evaluate, dim, samples, seed, tol=1e-8):
    """Return a violating (rho, sigma) pair, or None if all samples pass."""
    rng = rng_for(seed, "state-preservation")
    for k in range(samples):
        rho = rand_pure(dim, rng) if k % 2 else rand_density(dim, rng)
        sigma = rand_pure(dim, rng) if k % 3 else rand_density(dim, rng)
        r = state_residuals(evaluate(rho, sigma))
        if max(r.values()) > tol:
            return rho, sigma
    return None


def from_bilinear(tensor_or_evaluator, dim: int | None = None, samples: int = 40,
                  seed: int = 0, tol: float = 1e-8) -> StochasticProduct:
    """Wrap a bilinear map, rejecting it if sampled state preservation fails."""
    if callable(tensor_or_evaluator):
        if dim is None:
            raise ValueError("dim is required for a callable evaluator")
        evaluate = tensor_or_evaluator
        descriptor = {"kind": "callable"}
    else:
        t = np.asarray(tensor_or_evaluator, dtype=complex)
        d2 = t.shape[0]
        dim = int(round(np.sqrt(d2)))
        if t.shape != (d2, d2, d2) or dim * dim != d2:
            raise ValueError(f"tensor must be (d^2, d^2, d^2), got {t.shape}")

        def evaluate(a, b, _t=t, _d=dim):
            return unvec(np.einsum("kij,i,j->k", _t, vec(a), vec(b)), _d)

        descriptor = {"kind": "tensor"}
    witness = _sampled_state_check(evaluate, dim, samples, seed, tol)
    if witness is not None:
        raise ProductValidationError(
            "bilinear map is not state-preserving on sampled states", witness=witness)
    return StochasticProduct(dim, evaluate, descriptor)


# --------------------------------------------------------------------------
# The example product families
# --------------------------------------------------------------------------

def _require_stochastic_map(phi: Superoperator, label: str, seed: int = 0):
    cls = classify(phi, samples=40, seed=seed)
    if not (cls.is_trace_preserving and cls.is_positive_sampled):
        raise ValueError(f"{label} is not a stochastic map "
                         f"(tp={cls.is_trace_preserving}, pos={cls.is_positive_sampled})")


def mixture_product(phi: Superoperator, psi: Superoperator,
                    alpha: float) -> StochasticProduct:
    """a o b = alpha Phi(a) tr(b) + (1 - alpha) tr(a) Psi(b) on states.

    The trace factors realize the canonical bilinear extension of
    (rho, sigma) -> alpha Phi(rho) + (1 - alpha) Psi(sigma).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must sit in [0, 1]")
    if phi.dim != psi.dim:
        raise ValueError("maps must share a dimension")
    _require_stochastic_map(phi, "phi")
    _require_stochastic_map(psi, "psi")

    def evaluate(a, b):
        return alpha * np.trace(b) * apply(phi, a) + (1 - alpha) * np.trace(a) * apply(psi, b)

    return StochasticProduct(phi.dim, evaluate, {"kind": "mixture", "alpha": alpha})


def povm_product(effects, channels) -> StochasticProduct:
    """a o b = sum_k tr(a E_k) Phi_k(b) for a discrete POVM {E_k}."""
    effects = [np.asarray(e, dtype=complex) for e in effects]
    if len(effects) != len(channels):
        raise ValueError("need one channel per effect")
    dim = effects[0].shape[0]
    total = sum(effects)
    if np.max(np.abs(total - np.eye(dim))) > 1e-10:
        raise ValueError("effects do not sum to the identity")
    for k, e in enumerate(effects):
        w = np.linalg.eigvalsh((e + e.conj().T) / 2)
        if np.max(np.abs(e - e.conj().T)) > 1e-10 or w.min() < -1e-10:
            raise ValueError(f"effect {k} is not positive semidefinite")
    for k, c in enumerate(channels):
        _require_stochastic_map(c, f"channel {k}", seed=k)

    def evaluate(a, b):
        out = np.zeros((dim, dim), dtype=complex)
        for e, c in zip(effects, channels):
            out += np.trace(a @ e) * apply(c, b)
        return out

    return StochasticProduct(dim, evaluate, {"kind": "povm", "n_effects": len(effects)})


def partial_trace(x: np.ndarray, dim: int, dim_aux: int) -> np.ndarray:
    """Trace out the second (auxiliary) tensor factor."""
    return np.einsum("iaja->ij", x.reshape(dim, dim_aux, dim, dim_aux))


def partial_trace_product(theta: Superoperator, dim: int, dim_aux: int) -> StochasticProduct:
    """a o b = tr_aux(Theta(a (x) b)) for a joint channel Theta."""
    if theta.dim_in != dim * dim or theta.dim_out != dim * dim_aux:
        raise ValueError(
            f"joint channel dims {theta.dim_in}->{theta.dim_out} do not match "
            f"{dim * dim}->{dim * dim_aux}")
    _require_stochastic_map(theta, "joint channel")

    def evaluate(a, b):
        return partial_trace(apply(theta, np.kron(a, b)), dim, dim_aux)

    return StochasticProduct(dim, evaluate, {"kind": "partial_trace", "dim_aux": dim_aux})


# --------------------------------------------------------------------------
# Partial maps and point classification
# --------------------------------------------------------------------------

def left_map(p: StochasticProduct, rho) -> Superoperator:
    """The superoperator sigma -> rho o sigma."""
    d = p.dim
    cols = [vec(p.evaluate(np.asarray(rho, dtype=complex), unvec(e, d)))
            for e in np.eye(d * d)]
    return Superoperator(d, d, np.array(cols).T)


def right_map(p: StochasticProduct, sigma) -> Superoperator:
    """The superoperator rho -> rho o sigma."""
    d = p.dim
    cols = [vec(p.evaluate(unvec(e, d), np.asarray(sigma, dtype=complex)))
            for e in np.eye(d * d)]
    return Superoperator(d, d, np.array(cols).T)


@dataclass(frozen=True)
class PartialMaps:
    left: Callable[[np.ndarray], Superoperator]
    right: Callable[[np.ndarray], Superoperator]


def partial_maps(p: StochasticProduct, check: bool = True, seed: int = 0) -> PartialMaps:
    """Both curried map families; optionally spot-check their consistency."""
    if check:
        rng = rng_for(seed, "partial-maps")
        for _ in range(3):
            rho, sigma = rand_density(p.dim, rng), rand_density(p.dim, rng)
            lhs = apply(left_map(p, rho), sigma)
            rhs = apply(right_map(p, sigma), rho)
            if np.max(np.abs(lhs - rhs)) > 1e-12:
                raise ValueError("left/right partial maps disagree; product is not bilinear")
    return PartialMaps(left=lambda rho: left_map(p, rho),
                       right=lambda sigma: right_map(p, sigma))


@dataclass
class PointClassification:
    kind: str               # bijective | injective_pureness_preserving | collapsing | generic
    side: str
    evidence: dict
    map_classification: ch.MapClassification


def classify_point(p: StochasticProduct, rho, side: str = "left",
                   samples: int = 200, seed: int = 0) -> PointClassification:
    """Sort a state by the behaviour of its partial map (sampled certificate)."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    phi = left_map(p, rho) if side == "left" else right_map(p, rho)
    cls = classify(phi, samples=samples, seed=seed)
    if cls.is_symmetry:
        kind = "bijective"
    elif cls.is_collapse:
        kind = "collapsing"
    elif cls.is_pureness_preserving_sampled:
        kind = "injective_pureness_preserving"
    else:
        kind = "generic"
    return PointClassification(kind=kind, side=side, evidence=dict(cls.margins),
                               map_classification=cls)


def same_level_set(p: StochasticProduct, rho, sigma, side: str = "left",
                   tol: float = 1e-10) -> bool:
    """Pairwise level-set membership: do the two partial maps coincide?"""
    f = left_map if side == "left" else right_map
    return bool(np.max(np.abs(f(p, rho).matrix - f(p, sigma).matrix)) <= tol)


def check_covariance(p: StochasticProduct, rep_u, rep_v=None, side: str = "left",
                     n_pairs: int = 5, seed: int = 0, tol: float = 1e-10) -> dict:
    """Max residual of the covariance identity over group elements and pairs.

    Left:  (U_g rho U_g*) o sigma = V_g (rho o sigma) V_g*
    Right: rho o (U_g sigma U_g*) = V_g (rho o sigma) V_g*
    """
    rep_v = rep_u if rep_v is None else rep_v
    if rep_u.dim != p.dim:
        raise ValueError("representation dimension does not match the product")
    rng = rng_for(seed, "covariance", side)
    worst = 0.0
    for _ in range(n_pairs):
        rho, sigma = rand_density(p.dim, rng), rand_density(p.dim, rng)
        base = p.evaluate(rho, sigma)
        for ug, vg in zip(rep_u.matrices, rep_v.matrices):
            transported = vg @ base @ vg.conj().T
            if side == "left":
                moved = p.evaluate(ug @ rho @ ug.conj().T, sigma)
            else:
                moved = p.evaluate(rho, ug @ sigma @ ug.conj().T)
            worst = max(worst, trace_norm(moved - transported))
    return {"side": side, "max_residual": float(worst), "tolerance": tol,
            "passed": bool(worst <= tol)}


def maximally_mixed_collapse_residual(p: StochasticProduct, samples: int = 10,
                                      seed: int = 0) -> float:
    """Max of || (I/n) o sigma - I/n ||_1 over sampled states."""
    rng = rng_for(seed, "mms")
    mms = maximally_mixed(p.dim)
    worst = 0.0
    for _ in range(samples):
        sigma = rand_density(p.dim, rng)
        worst = max(worst, trace_norm(p.evaluate(mms, sigma) - mms))
    return float(worst)
