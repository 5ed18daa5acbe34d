"""Groups, projective representations, measures and square-integrability data.

Two families of representations are built in:

* the discrete Weyl-Heisenberg (shift/clock) representation of Z_d x Z_d,
  exact for every d >= 2;
* spin-j Wigner-D matrices of SU(2) sampled on a product quadrature grid
  (Gauss-Legendre in cos(beta), uniform in alpha and gamma) whose weights
  integrate products of up to four matrix coefficients exactly.

All stored Haar weights are rescaled so the orthogonality-relation constant
equals one; the raw constant is kept in `meta`. User-supplied representation
tables are accepted and verified rather than constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .operators import is_density

REP_TOL = 1e-10


# --------------------------------------------------------------------------
# Finite groups
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    order: int
    cayley: np.ndarray      # (order, order) int indices, cayley[g, h] = g*h
    inverse: np.ndarray     # (order,) int
    identity: int
    is_abelian: bool

    def mul(self, g: int, h: int) -> int:
        return int(self.cayley[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])


def group_from_cayley(cayley, check_assoc_limit: int = 64,
                      rng: np.random.Generator | None = None) -> FiniteGroup:
    """Build a group from a Cayley table, validating the group axioms.

    Associativity is checked on all triples up to `check_assoc_limit` order
    and on random triples above it.
    """
    cayley = np.asarray(cayley, dtype=int)
    n = cayley.shape[0]
    if cayley.shape != (n, n):
        raise ValueError("cayley table must be square")
    if cayley.min() < 0 or cayley.max() >= n:
        raise ValueError("cayley entries out of range")
    ref = np.arange(n)
    if not np.all(np.sort(cayley, axis=1) == ref[None, :]):
        raise ValueError("cayley table is not a Latin square (rows)")
    if not np.all(np.sort(cayley, axis=0) == ref[:, None]):
        raise ValueError("cayley table is not a Latin square (columns)")

    identity = None
    for e in range(n):
        if np.all(cayley[e] == ref) and np.all(cayley[:, e] == ref):
            identity = e
            break
    if identity is None:
        raise ValueError("cayley table has no two-sided identity")

    if n <= check_assoc_limit:
        left = cayley[cayley]                      # [a,b,c] = (a*b)*c
        right = cayley[np.arange(n)[:, None, None], cayley[None, :, :]]  # a*(b*c)
        if not np.all(left == right):
            raise ValueError("cayley table is not associative")
    else:
        rng = rng or np.random.default_rng(0)
        for _ in range(2000):
            a, b, c = rng.integers(0, n, size=3)
            if cayley[cayley[a, b], c] != cayley[a, cayley[b, c]]:
                raise ValueError("cayley table is not associative (sampled)")

    inverse = np.empty(n, dtype=int)
    for g in range(n):
        inverse[g] = np.nonzero(cayley[g] == identity)[0][0]
    is_abelian = bool(np.all(cayley == cayley.T))
    return FiniteGroup(n, cayley, inverse, identity, is_abelian)


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return group_from_cayley((idx[:, None] + idx[None, :]) % n)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(1, np.zeros((1, 1), dtype=int), np.zeros(1, dtype=int), 0, True)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Direct product; element (a, b) gets index a * g2.order + b."""
    n1, n2 = g1.order, g2.order
    a = np.arange(n1)
    b = np.arange(n2)
    cay = (g1.cayley[a[:, None, None, None], a[None, None, :, None]] * n2
           + g2.cayley[b[None, :, None, None], b[None, None, None, :]])
    return group_from_cayley(cay.reshape(n1 * n2, n1 * n2))


# --------------------------------------------------------------------------
# Measures
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupMeasure:
    """Finite complex measure: one weight per group element (or node)."""

    weights: np.ndarray
    kind: str = "complex"   # "probability" | "complex"

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=complex))
        if self.kind == "probability":
            w = self.weights
            if np.max(np.abs(w.imag)) > 1e-12 or w.real.min() < -1e-12 \
                    or abs(w.real.sum() - 1.0) > 1e-12:
                raise ValueError("probability measure needs real nonnegative weights summing to 1")

    @property
    def mass(self) -> complex:
        return complex(self.weights.sum())

    @property
    def total_variation(self) -> float:
        return float(np.abs(self.weights).sum())


def dirac_measure(group: FiniteGroup, g: int | None = None) -> GroupMeasure:
    w = np.zeros(group.order)
    w[group.identity if g is None else g] = 1.0
    return GroupMeasure(w, "probability")


def uniform_measure(group: FiniteGroup) -> GroupMeasure:
    return GroupMeasure(np.full(group.order, 1.0 / group.order), "probability")


def random_probability_measure(group: FiniteGroup, rng: np.random.Generator) -> GroupMeasure:
    w = rng.random(group.order)
    return GroupMeasure(w / w.sum(), "probability")


def convolve(mu: GroupMeasure, nu: GroupMeasure, group: FiniteGroup) -> GroupMeasure:
    """(mu * nu)(k) = sum over pairs g h = k of mu(g) nu(h)."""
    out = np.zeros(group.order, dtype=complex)
    np.add.at(out, group.cayley, np.outer(mu.weights, nu.weights))
    kind = "probability" if mu.kind == nu.kind == "probability" else "complex"
    return GroupMeasure(out.real if kind == "probability" else out, kind)


def translate(nu: GroupMeasure, group: FiniteGroup, g: int, side: str) -> GroupMeasure:
    """Left translate nu^g(E) = nu(g^-1 E); right translate nu_g(E) = nu(E g)."""
    out = np.zeros(group.order, dtype=complex)
    if side == "left":
        np.add.at(out, group.cayley[g], nu.weights)          # mass at h -> g h
    elif side == "right":
        np.add.at(out, group.cayley[:, group.inv(g)], nu.weights)  # mass at h -> h g^-1
    else:
        raise ValueError("side must be 'left' or 'right'")
    if nu.kind == "probability":
        return GroupMeasure(out.real, "probability")
    return GroupMeasure(out, "complex")


@dataclass(frozen=True)
class MatrixMeasure:
    """Measure supported on explicitly given unitaries (for quadrature groups).

    Translates act by matrix multiplication; conjugation makes the projective
    phase irrelevant, so no node bookkeeping is needed.
    """

    weights: np.ndarray
    unitaries: np.ndarray   # (k, d, d)
    kind: str = "complex"

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=complex))
        object.__setattr__(self, "unitaries", np.asarray(self.unitaries, dtype=complex))

    @property
    def mass(self) -> complex:
        return complex(self.weights.sum())

    @property
    def total_variation(self) -> float:
        return float(np.abs(self.weights).sum())

    def left_translate(self, vg: np.ndarray) -> "MatrixMeasure":
        return MatrixMeasure(self.weights, vg @ self.unitaries, self.kind)

    def right_translate(self, vg: np.ndarray) -> "MatrixMeasure":
        return MatrixMeasure(self.weights, self.unitaries @ vg.conj().T, self.kind)


def dirac_matrix_measure(dim: int) -> MatrixMeasure:
    return MatrixMeasure(np.ones(1), np.eye(dim, dtype=complex)[None, :, :], "probability")


# --------------------------------------------------------------------------
# Projective representations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SU2Quadrature:
    """Quadrature grid on SU(2): Euler-angle nodes with probability weights."""

    nodes: np.ndarray       # (N, 3) triples (alpha, beta, gamma)
    weights: np.ndarray     # (N,) probability weights
    spin_j: float
    is_abelian: bool = False

    @property
    def order(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True)
class ProjectiveRep:
    """Unitary matrices per group element (or quadrature node).

    haar_weights are normalized so the square-integrability constant is 1;
    the raw constant under the probability normalization sits in meta.
    multiplier is None for quadrature groups (nodes do not close under the
    group product; matrix products stand in where needed).
    """

    group: FiniteGroup | SU2Quadrature
    dim: int
    matrices: np.ndarray            # (N, dim, dim)
    haar_weights: np.ndarray        # (N,)
    multiplier: np.ndarray | None = None
    c_u: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def is_finite(self) -> bool:
        return isinstance(self.group, FiniteGroup)

    @property
    def is_abelian(self) -> bool:
        return self.group.is_abelian

    def matrix(self, g: int) -> np.ndarray:
        return self.matrices[g]


def compute_multiplier(group: FiniteGroup, matrices: np.ndarray) -> np.ndarray:
    """m(g, h) in U(gh) = m(g, h) U(g) U(h), via tr((U(g)U(h))* U(gh)) / d."""
    d = matrices.shape[1]
    prod = np.einsum("gij,hjk->ghik", matrices, matrices)
    return np.einsum("ghij,ghij->gh", prod.conj(), matrices[group.cayley]) / d


def validate_rep(rep: ProjectiveRep, tol: float = REP_TOL) -> None:
    u = rep.matrices
    eye = np.eye(rep.dim)
    unit_res = np.max(np.abs(np.einsum("gij,gkj->gik", u, u.conj()) - eye))
    if unit_res > tol:
        raise ValueError(f"matrices not unitary (residual {unit_res:.2e})")
    if rep.is_finite:
        m = rep.multiplier
        if m is None:
            raise ValueError("finite-group rep needs a multiplier table")
        if np.max(np.abs(np.abs(m) - 1.0)) > tol:
            raise ValueError("multiplier is not a phase")
        g = rep.group
        rel = u[g.cayley] - m[..., None, None] * np.einsum("gij,hjk->ghik", u, u)
        if np.max(np.abs(rel)) > tol:
            raise ValueError("U(gh) != m(g,h) U(g) U(h)")
        # cocycle identity m(g,h) m(gh,k) = m(g,hk) m(h,k)
        gh = g.cayley
        lhs = m[:, :, None] * m[gh, :]
        rhs = m[np.arange(g.order)[:, None, None], gh[None, :, :]] * m[None, :, :]
        if np.max(np.abs(lhs - rhs)) > 1e-8:
            raise ValueError("multiplier violates the cocycle identity")


def verify_orthogonality(rep: ProjectiveRep, trials: int = 8, seed: int = 0) -> float:
    """Max residual of sum_g w_g <eta, U_g phi><U_g psi, chi> - <eta, chi><psi, phi>."""
    rng = np.random.default_rng(seed)
    u, w = rep.matrices, rep.haar_weights
    worst = 0.0
    for _ in range(trials):
        eta, chi, psi, phi = (x / np.linalg.norm(x) for x in
                              (rng.standard_normal((4, rep.dim))
                               + 1j * rng.standard_normal((4, rep.dim))))
        a = np.einsum("i,gij,j->g", eta.conj(), u, phi)
        b = np.einsum("i,gij,j->g", chi.conj(), u, psi).conj()
        lhs = np.sum(w * a * b)
        rhs = rep.c_u * np.vdot(eta, chi) * np.vdot(psi, phi)
        worst = max(worst, abs(lhs - rhs))
    return float(worst)


def twirl(rep: ProjectiveRep, b: np.ndarray,
          measure: GroupMeasure | MatrixMeasure | None = None) -> np.ndarray:
    """Group average sum_g w_g U_g B U_g*; defaults to the Haar weights."""
    b = np.asarray(b, dtype=complex)
    if isinstance(measure, MatrixMeasure):
        return np.einsum("g,gij,jk,glk->il", measure.weights, measure.unitaries,
                         b, measure.unitaries.conj())
    w = rep.haar_weights if measure is None else measure.weights
    return np.einsum("g,gij,jk,glk->il", w, rep.matrices, b, rep.matrices.conj())


def measure_of_state_pair(rep: ProjectiveRep, a, t) -> GroupMeasure:
    """Weights w(g) = haar(g) tr(a U_g t U_g*); a probability measure for states."""
    a = np.asarray(a, dtype=complex)
    t = np.asarray(t, dtype=complex)
    conj_t = np.einsum("gij,jk,glk->gil", rep.matrices, t, rep.matrices.conj())
    w = rep.haar_weights * np.einsum("ij,gji->g", a, conj_t)
    if is_density(a) and is_density(t):
        return GroupMeasure(w.real, "probability")
    return GroupMeasure(w, "complex")


# --------------------------------------------------------------------------
# Discrete Weyl-Heisenberg representation of Z_d x Z_d
# --------------------------------------------------------------------------

@lru_cache(maxsize=32)
def weyl_heisenberg_rep(d: int) -> ProjectiveRep:
    """Shift/clock displacement operators U(q, p) = tau^{qp} X^q Z^p on C^d.

    The centering phase tau (tau^2 = omega) makes U(g)* = m(g, g^-1) U(g^-1)
    hold with the stored multiplier. Haar weight 1/d per element gives
    square-integrability constant 1 (total mass d).
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    group = direct_product(cyclic_group(d), cyclic_group(d))
    omega = np.exp(2j * np.pi / d)
    tau = np.exp(1j * np.pi * (d + 1) / d)
    x = np.zeros((d, d), dtype=complex)
    x[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
    z = np.diag(omega ** np.arange(d))
    xpow = [np.linalg.matrix_power(x, q) for q in range(d)]
    zpow = [np.linalg.matrix_power(z, p) for p in range(d)]
    mats = np.stack([tau ** (q * p) * xpow[q] @ zpow[p]
                     for q in range(d) for p in range(d)])
    rep = ProjectiveRep(
        group=group,
        dim=d,
        matrices=mats,
        haar_weights=np.full(d * d, 1.0 / d),
        multiplier=compute_multiplier(group, mats),
        meta={"kind": "weyl", "c_raw_probability": 1.0 / d},
    )
    validate_rep(rep)
    # irreducibility: the Haar twirl must send every A to tr(A) I (c_u = 1)
    probe = np.arange(d * d, dtype=complex).reshape(d, d) + 1j
    res = np.max(np.abs(twirl(rep, probe) - np.trace(probe) * np.eye(d)))
    if res > 1e-8:
        raise ValueError("Weyl-Heisenberg construction failed the twirl identity")
    return rep


# --------------------------------------------------------------------------
# SU(2) quadrature representation
# --------------------------------------------------------------------------

def spin_operators(j: float):
    """(J_z, J_y) for spin j in the descending-m basis."""
    n = int(round(2 * j)) + 1
    m = j - np.arange(n)
    jz = np.diag(m.astype(complex))
    c = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jplus = np.zeros((n, n), dtype=complex)
    jplus[np.arange(n - 1), np.arange(1, n)] = c
    jy = (jplus - jplus.conj().T) / 2j
    return jz, jy


def wigner_d_matrix(j: float, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Wigner D^j(alpha, beta, gamma) = e^{-i a Jz} e^{-i b Jy} e^{-i c Jz}."""
    jz, jy = spin_operators(j)
    m = np.real(np.diag(jz))
    w, v = np.linalg.eigh(jy)
    dbeta = (v * np.exp(-1j * beta * w)) @ v.conj().T
    return np.exp(-1j * alpha * m)[:, None] * dbeta * np.exp(-1j * gamma * m)[None, :]


@lru_cache(maxsize=32)
def su2_quadrature_rep(j: float, n_beta: int | None = None,
                       n_alpha: int | None = None) -> ProjectiveRep:
    """Spin-j representation on a Haar quadrature grid with c_u = 1.

    Default node counts integrate products of four matrix coefficients
    exactly: n_alpha = 4j + 2 uniform points in alpha and gamma, and
    n_beta = 2*ceil(2j) + 2 Gauss-Legendre points in cos(beta).
    """
    two_j = int(round(2 * j))
    if abs(2 * j - two_j) > 1e-12 or two_j < 1:
        raise ValueError("spin must be a half-integer with dimension 2j+1 >= 2")
    j = two_j / 2.0
    n = two_j + 1
    if n > 8:
        raise ValueError("spin too large for the desk-scale quadrature (2j+1 <= 8)")
    n_beta = n_beta if n_beta is not None else 2 * int(np.ceil(2 * j)) + 2
    n_alpha = n_alpha if n_alpha is not None else 2 * two_j + 2
    if n_beta < n or n_alpha < n:
        raise ValueError("quadrature order too small for this spin")

    xs, wx = np.polynomial.legendre.leggauss(n_beta)
    betas = np.arccos(xs)
    alphas = 2 * np.pi * np.arange(n_alpha) / n_alpha
    gammas = alphas.copy()

    jz, jy = spin_operators(j)
    m = np.real(np.diag(jz))
    wy, vy = np.linalg.eigh(jy)
    dbetas = np.einsum("ik,bk,jk->bij", vy, np.exp(-1j * betas[:, None] * wy), vy.conj())
    pa = np.exp(-1j * np.outer(alphas, m))     # (n_alpha, n)
    pg = np.exp(-1j * np.outer(gammas, m))

    mats = np.einsum("ai,bij,cj->abcij", pa, dbetas, pg).reshape(-1, n, n)
    nodes = np.stack(np.meshgrid(alphas, betas, gammas, indexing="ij"),
                     axis=-1).reshape(-1, 3)
    wq = (np.ones(n_alpha)[:, None, None] / n_alpha
          * (wx / 2)[None, :, None]
          * (np.ones(n_alpha)[None, None, :] / n_alpha)).reshape(-1)

    group = SU2Quadrature(nodes=nodes, weights=wq, spin_j=j)
    rep = ProjectiveRep(
        group=group,
        dim=n,
        matrices=mats,
        haar_weights=wq * n,
        multiplier=None,
        meta={"kind": "su2", "spin_j": j, "n_beta": n_beta, "n_alpha": n_alpha,
              "c_raw_probability": 1.0 / n},
    )
    # D-moment orthogonality under the probability weights, up to degree 2j
    moments = np.einsum("g,gij,gkl->ijkl", wq, mats, mats.conj()).reshape(n * n, n * n)
    res = np.max(np.abs(moments - np.eye(n * n) / n))
    if res > 1e-8:
        raise ValueError(f"quadrature fails D-matrix orthogonality (residual {res:.2e})")
    return rep


def su2_element(rep: ProjectiveRep, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Representation matrix at an arbitrary (not necessarily node) element."""
    if not isinstance(rep.group, SU2Quadrature):
        raise ValueError("su2_element needs an SU(2) quadrature representation")
    return wigner_d_matrix(rep.group.spin_j, alpha, beta, gamma)


# --------------------------------------------------------------------------
# User-supplied and derived representations
# --------------------------------------------------------------------------

def rep_from_matrices(group: FiniteGroup, matrices, verify: bool = True,
                      tol: float = REP_TOL) -> ProjectiveRep:
    """Wrap user-supplied unitaries as a projective rep with c_u rescaled to 1.

    The square-integrability constant under probability weights is measured
    from the orthogonality relations; with `verify` the residual must clear
    `tol`, which rules out reducible tables.
    """
    matrices = np.asarray(matrices, dtype=complex)
    n = group.order
    d = matrices.shape[1]
    mult = compute_multiplier(group, matrices)
    # an irreducible rep of a finite group has c = 1/d under probability
    # weights; scaling by d enforces c_u = 1 (verification below catches
    # reducible tables, for which no constant exists at all)
    rep = ProjectiveRep(group, d, matrices, np.full(n, d / n), mult,
                        meta={"kind": "table", "c_raw_probability": 1.0 / d})
    validate_rep(rep, tol)
    if verify:
        res = verify_orthogonality(rep, trials=6, seed=1)
        if res > 1e-6:
            raise ValueError(
                f"orthogonality residual {res:.2e}: representation is not "
                "square integrable (likely reducible)")
    return rep


def conjugate_rep(rep: ProjectiveRep) -> ProjectiveRep:
    """Entrywise-conjugated representation (same group, conjugate multiplier)."""
    mult = None if rep.multiplier is None else rep.multiplier.conj()
    return ProjectiveRep(rep.group, rep.dim, rep.matrices.conj(), rep.haar_weights,
                         mult, rep.c_u, {**rep.meta, "conjugated": True})


def direct_sum_rep(rep: ProjectiveRep) -> ProjectiveRep:
    """U + U on doubled dimension: deliberately reducible (for negative tests)."""
    if not rep.is_finite:
        raise ValueError("direct sum is provided for finite groups only")
    n, d = rep.matrices.shape[0], rep.dim
    mats = np.zeros((n, 2 * d, 2 * d), dtype=complex)
    mats[:, :d, :d] = rep.matrices
    mats[:, d:, d:] = rep.matrices
    return ProjectiveRep(rep.group, 2 * d, mats, rep.haar_weights,
                         rep.multiplier, rep.c_u, {**rep.meta, "reducible": True})
