"""Group-twirled products of trace class operators and their verifiers.

The product generated by representations (U, V), a fiducial operator T and a
measure nu is the double group average

    <a, T, b> = sum_g sum_h haar(g) nu(h) tr(a U_g T U_g*) V_{gh} b V_{gh}*

with Haar weights normalized so the square-integrability constant is 1.
Because conjugation cancels the projective phases, V_{gh} b V_{gh}* equals
V_g (V_h b V_h*) V_g*, so the evaluation twirls b by nu first and then runs a
single weighted sweep over the Haar nodes. This is algebraically identical to
convolving the state-pair measure with nu and never needs group products,
which also makes quadrature groups (whose nodes do not close) exact.

With U = V, a fiducial state and a probability measure, the product is an
associative state-preserving operation; every identity it satisfies has a
verifier here returning the worst sampled residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import Superoperator, vec
from .groups import (GroupMeasure, MatrixMeasure, ProjectiveRep, convolve,
                     dirac_matrix_measure, dirac_measure, translate)
from .operators import is_density, state_residuals, trace_norm
from .products import StochasticProduct
from .sampling import rand_density, rand_operator, rand_pure, rng_for


def measure_mass(nu) -> complex:
    return complex(np.sum(nu.weights))


def measure_total_variation(nu) -> float:
    return float(np.sum(np.abs(nu.weights)))


def is_probability(nu) -> bool:
    return getattr(nu, "kind", None) == "probability"


@dataclass(frozen=True)
class TwirledContext:
    """Tetrad (U, V; T, nu); V defaults to U and nu to the Dirac measure."""

    rep_u: ProjectiveRep
    rep_v: ProjectiveRep | None = None
    fiducial: np.ndarray | None = None
    nu: GroupMeasure | MatrixMeasure | None = None
    _fid_conj: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rep_v = self.rep_u if self.rep_v is None else self.rep_v
        if rep_v.dim != self.rep_u.dim:
            raise ValueError("U and V must act on the same dimension")
        fid = (np.eye(self.rep_u.dim, dtype=complex) / self.rep_u.dim
               if self.fiducial is None else np.asarray(self.fiducial, dtype=complex))
        if fid.shape != (self.rep_u.dim, self.rep_u.dim):
            raise ValueError("fiducial dimension does not match the representation")
        nu = self.nu
        if nu is None:
            nu = (dirac_measure(self.rep_u.group) if self.rep_u.is_finite
                  else dirac_matrix_measure(self.rep_u.dim))
        if isinstance(nu, GroupMeasure) and nu.weights.size != self.rep_u.matrices.shape[0]:
            raise ValueError("measure weight count does not match the group")
        object.__setattr__(self, "rep_v", rep_v)
        object.__setattr__(self, "fiducial", fid)
        object.__setattr__(self, "nu", nu)
        u = self.rep_u.matrices
        # flattened stack of U_g T U_g*, laid out for tr(a .) as a dot product
        fid_conj = np.einsum("gij,jk,glk->gil", u, fid, u.conj())
        object.__setattr__(self, "_fid_conj",
                           np.ascontiguousarray(fid_conj.reshape(u.shape[0], -1)))

    @property
    def dim(self) -> int:
        return self.rep_u.dim

    @property
    def is_stochastic(self) -> bool:
        return (self.rep_v is self.rep_u or np.shares_memory(self.rep_v.matrices,
                                                             self.rep_u.matrices)) \
            and is_density(self.fiducial) and is_probability(self.nu)

    def with_fiducial(self, fid) -> "TwirledContext":
        return TwirledContext(self.rep_u, self.rep_v, fid, self.nu)

    def with_nu(self, nu) -> "TwirledContext":
        return TwirledContext(self.rep_u, self.rep_v, self.fiducial, nu)


def _weighted_conj_sum(w: np.ndarray, u: np.ndarray, b: np.ndarray) -> np.ndarray:
    """sum_g w_g U_g b U_g* via batched matmul (fast path for small dims)."""
    c = (u @ b) * w[:, None, None]
    return np.tensordot(c, u.conj(), axes=([0, 2], [0, 2]))


def twirl_with_measure(rep: ProjectiveRep, nu, b: np.ndarray) -> np.ndarray:
    """sum_h nu(h) V_h b V_h*, resolving index measures against rep matrices."""
    if isinstance(nu, MatrixMeasure):
        return _weighted_conj_sum(nu.weights, nu.unitaries, np.asarray(b, dtype=complex))
    return _weighted_conj_sum(nu.weights, rep.matrices, np.asarray(b, dtype=complex))


def triple_product(ctx: TwirledContext, a, b) -> np.ndarray:
    """<a, T, b> evaluated by the nu-twirl-then-Haar-sweep form."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = ctx.dim
    if a.shape != (d, d) or b.shape != (d, d):
        raise ValueError("operand dimensions do not match the context")
    b_nu = twirl_with_measure(ctx.rep_v, ctx.nu, b)
    # tr(a U_g T U_g*) for all g in one matvec against the flattened stack
    w = ctx.rep_u.haar_weights * (ctx._fid_conj @ a.T.ravel())
    return _weighted_conj_sum(w, ctx.rep_v.matrices, b_nu)


def as_matrix_measure(rep: ProjectiveRep, nu) -> MatrixMeasure:
    if isinstance(nu, MatrixMeasure):
        return nu
    return MatrixMeasure(nu.weights, rep.matrices, nu.kind)


def _translate_nu(ctx: TwirledContext, g_matrix: np.ndarray, g_index: int | None,
                  side: str):
    """nu^g (left) or nu_g (right); index route on finite groups, else matrices."""
    if isinstance(ctx.nu, GroupMeasure) and ctx.rep_u.is_finite and g_index is not None:
        return translate(ctx.nu, ctx.rep_u.group, g_index, side)
    mm = as_matrix_measure(ctx.rep_v, ctx.nu)
    return mm.left_translate(g_matrix) if side == "left" else mm.right_translate(g_matrix)


# --------------------------------------------------------------------------
# Verifiers
# --------------------------------------------------------------------------

def verify_stochasticity(ctx: TwirledContext, pairs: int = 200, seed: int = 0) -> dict:
    """Worst Hermiticity / negativity / trace residuals of rho o sigma."""
    rng = rng_for(seed, "stochasticity")
    worst = {"herm": 0.0, "neg": 0.0, "trace": 0.0}
    for k in range(pairs):
        rho = rand_pure(ctx.dim, rng) if k % 2 else rand_density(ctx.dim, rng)
        sigma = rand_pure(ctx.dim, rng) if k % 3 else rand_density(ctx.dim, rng)
        r = state_residuals(triple_product(ctx, rho, sigma))
        for key in worst:
            worst[key] = max(worst[key], r[key])
    return worst


def verify_associativity(ctx: TwirledContext, triples: int = 50, seed: int = 0) -> float:
    """max || <<A,T,B>,T,C> - <A,T,<B,T,C>> ||_1 over sampled operator triples."""
    rng = rng_for(seed, "associativity")
    worst = 0.0
    for k in range(triples):
        if k % 2:
            a, b, c = (rand_density(ctx.dim, rng) for _ in range(3))
        else:
            a, b, c = (rand_operator(ctx.dim, rng) for _ in range(3))
        lhs = triple_product(ctx, triple_product(ctx, a, b), c)
        rhs = triple_product(ctx, a, triple_product(ctx, b, c))
        worst = max(worst, trace_norm(lhs - rhs))
    return float(worst)


def verify_commutativity(ctx: TwirledContext, pairs: int = 50, seed: int = 0) -> float:
    """max || <A,T,B> - <B,T,A> ||_1 over sampled operator pairs."""
    rng = rng_for(seed, "commutativity")
    worst = 0.0
    for k in range(pairs):
        gen = rand_density if k % 2 else rand_operator
        a, b = gen(ctx.dim, rng), gen(ctx.dim, rng)
        worst = max(worst, trace_norm(triple_product(ctx, a, b)
                                      - triple_product(ctx, b, a)))
    return float(worst)


def verify_trace_and_norm(ctx: TwirledContext, samples: int = 100, seed: int = 0,
                          vary_fiducial: bool = False) -> dict:
    """Trace identity and Banach norm bound on random complex operators.

    tr<A,T,B> = nu(G) tr(A) tr(T) tr(B);  ||<A,T,B>||_1 <= |nu| ||A|| ||T|| ||B||.
    With `vary_fiducial` each sample also draws a fresh complex T, so all
    three slots of the triple are exercised.
    """
    rng = rng_for(seed, "trace-norm")
    mass = measure_mass(ctx.nu)
    tv = measure_total_variation(ctx.nu)
    max_tr = 0.0
    max_ratio = 0.0
    for _ in range(samples):
        sctx = ctx.with_fiducial(rand_operator(ctx.dim, rng)) if vary_fiducial else ctx
        a, b = rand_operator(ctx.dim, rng), rand_operator(ctx.dim, rng)
        out = triple_product(sctx, a, b)
        max_tr = max(max_tr, abs(np.trace(out) - mass * np.trace(a)
                                 * np.trace(sctx.fiducial) * np.trace(b)))
        bound = tv * trace_norm(a) * trace_norm(sctx.fiducial) * trace_norm(b)
        if bound > 0:
            max_ratio = max(max_ratio, trace_norm(out) / bound)
    return {"max_trace_residual": float(max_tr), "max_norm_ratio": float(max_ratio)}


def _covariance_elements(ctx: TwirledContext, n_quadrature: int, rng):
    """(g_matrix, g_index) pairs: all elements when finite, sampled nodes else."""
    if ctx.rep_u.is_finite:
        return [(ctx.rep_u.matrices[g], g) for g in range(ctx.rep_u.group.order)]
    idx = rng.choice(ctx.rep_u.matrices.shape[0], size=n_quadrature, replace=False)
    return [(ctx.rep_u.matrices[g], None) for g in idx]


def verify_covariance(ctx: TwirledContext, pairs: int = 10, seed: int = 0,
                      n_quadrature: int = 8) -> dict:
    """Residuals of the covariance / translate identities.

    left_covariance:    V_g <A,T,B> V_g* = <U_g A U_g*, T, B>
    fiducial_translate: <A, U_g^-1 T U_g^-1*, B>_nu = <A, T, B>_{nu^g}
    argument_translate: <A, T, V_g^-1 B V_g^-1*>_nu = <A, T, B>_{nu_g}
    dirac_exchange:     <A, U_g T U_g*, B>_delta = <A, T, V_g^-1 B V_g^-1*>_delta
    """
    rng = rng_for(seed, "covariance")
    elements = _covariance_elements(ctx, n_quadrature, rng)
    samples = [(rand_density(ctx.dim, rng), rand_density(ctx.dim, rng))
               for _ in range(pairs)]
    dirac = (dirac_measure(ctx.rep_u.group) if ctx.rep_u.is_finite
             else dirac_matrix_measure(ctx.dim))
    ctx_dirac = ctx.with_nu(dirac)
    res = {"left_covariance": 0.0, "fiducial_translate": 0.0,
           "argument_translate": 0.0, "dirac_exchange": 0.0}
    for ug, gi in elements:
        vg = ctx.rep_v.matrices[gi] if gi is not None else ug
        ctx_fid_left = ctx.with_fiducial(ug.conj().T @ ctx.fiducial @ ug)
        ctx_nu_left = ctx.with_nu(_translate_nu(ctx, vg, gi, "left"))
        ctx_nu_right = ctx.with_nu(_translate_nu(ctx, vg, gi, "right"))
        ctx_dirac_fid = ctx_dirac.with_fiducial(ug @ ctx.fiducial @ ug.conj().T)
        for a, b in samples:
            base = triple_product(ctx, a, b)
            res["left_covariance"] = max(res["left_covariance"], trace_norm(
                vg @ base @ vg.conj().T
                - triple_product(ctx, ug @ a @ ug.conj().T, b)))
            res["fiducial_translate"] = max(res["fiducial_translate"], trace_norm(
                triple_product(ctx_fid_left, a, b) - triple_product(ctx_nu_left, a, b)))
            res["argument_translate"] = max(res["argument_translate"], trace_norm(
                triple_product(ctx, a, vg.conj().T @ b @ vg)
                - triple_product(ctx_nu_right, a, b)))
            res["dirac_exchange"] = max(res["dirac_exchange"], trace_norm(
                triple_product(ctx_dirac_fid, a, b)
                - triple_product(ctx_dirac, a, vg.conj().T @ b @ vg)))
    return res


def verify_abelian_symmetries(ctx: TwirledContext, pairs: int = 5, seed: int = 0) -> float:
    """Extra identities available when the group is abelian and V = U.

    moved left argument = moved right argument = left-translated nu
    = inverse-conjugated fiducial, all against (U_g rho U_g*) o sigma.
    """
    if not ctx.rep_u.is_abelian:
        raise ValueError("abelian symmetry checks need an abelian group")
    rng = rng_for(seed, "abelian")
    worst = 0.0
    elements = _covariance_elements(ctx, 4, rng)
    samples = [(rand_density(ctx.dim, rng), rand_density(ctx.dim, rng))
               for _ in range(pairs)]
    for ug, gi in elements:
        ctx_nu = ctx.with_nu(_translate_nu(ctx, ug, gi, "left"))
        ctx_fid = ctx.with_fiducial(ug.conj().T @ ctx.fiducial @ ug)
        for a, b in samples:
            moved = triple_product(ctx, ug @ a @ ug.conj().T, b)
            worst = max(worst, trace_norm(
                moved - triple_product(ctx, a, ug @ b @ ug.conj().T)))
            worst = max(worst, trace_norm(moved - triple_product(ctx_nu, a, b)))
            worst = max(worst, trace_norm(moved - triple_product(ctx_fid, a, b)))
    return float(worst)


# --------------------------------------------------------------------------
# Products, observables and instruments derived from a context
# --------------------------------------------------------------------------

def as_stochastic_product(ctx: TwirledContext) -> StochasticProduct:
    """Expose the stochastic context as a product usable by `products`."""
    if not ctx.is_stochastic:
        raise ValueError("context is not stochastic "
                         "(needs V = U, a fiducial state and a probability measure)")
    meta = dict(ctx.rep_u.meta)
    return StochasticProduct(ctx.dim, lambda a, b: triple_product(ctx, a, b),
                             {"kind": "twirled", "rep": meta})


def twirl_superoperator(rep: ProjectiveRep, measure) -> Superoperator:
    """Twirling channel A -> sum_g mu(g) U_g A U_g* as a superoperator matrix."""
    if isinstance(measure, MatrixMeasure):
        w, u = measure.weights, measure.unitaries
    else:
        w, u = measure.weights, rep.matrices
    # column stacking: vec(U A U*) = (conj(U) kron U) vec(A)
    m = np.einsum("g,gac,gbd->abcd", w, u.conj(), u).reshape(rep.dim ** 2, rep.dim ** 2)
    return Superoperator(rep.dim, rep.dim, m)


def left_map_reference(ctx: TwirledContext, rho) -> Superoperator:
    """Left partial map at rho as the twirling operator of mu_{rho,T} * nu.

    Finite groups only; this is the measure-convolution route, kept as an
    independent cross-check of the evaluation order in `triple_product`.
    """
    from .groups import measure_of_state_pair
    if not (ctx.rep_u.is_finite and isinstance(ctx.nu, GroupMeasure)):
        raise ValueError("reference route needs a finite group and an indexed measure")
    mu = measure_of_state_pair(ctx.rep_u, rho, ctx.fiducial)
    return twirl_superoperator(ctx.rep_v, convolve(mu, ctx.nu, ctx.rep_u.group))


def covariant_povm(rep: ProjectiveRep, fiducial, subset=None) -> np.ndarray:
    """Effect sum_{g in subset} haar(g) U_g T U_g*; the full group gives I."""
    fid = np.asarray(fiducial, dtype=complex)
    mask = np.ones(rep.matrices.shape[0], dtype=bool) if subset is None \
        else np.asarray(subset, dtype=bool)
    w = rep.haar_weights * mask
    return np.einsum("g,gij,jk,glk->il", w, rep.matrices, fid, rep.matrices.conj())


def instrument_apply(rep: ProjectiveRep, fiducial, sigma, a, subset=None) -> np.ndarray:
    """Covariant-instrument operation sum_{g in E} haar(g) tr(a U_g T U_g*) U_g sigma U_g*."""
    fid = np.asarray(fiducial, dtype=complex)
    a = np.asarray(a, dtype=complex)
    mask = np.ones(rep.matrices.shape[0], dtype=bool) if subset is None \
        else np.asarray(subset, dtype=bool)
    u = rep.matrices
    fid_conj = np.einsum("gij,jk,glk->gil", u, fid, u.conj())
    w = rep.haar_weights * mask * np.einsum("ij,gji->g", a, fid_conj)
    return np.einsum("g,gij,jk,glk->il", w, u, np.asarray(sigma, dtype=complex), u.conj())


def instrument_channel(rep: ProjectiveRep, fiducial, sigma, subset=None) -> Superoperator:
    """The instrument operation as a superoperator in its state argument a."""
    from .channels import unvec
    d = rep.dim
    cols = [vec(instrument_apply(rep, fiducial, sigma, unvec(e, d), subset))
            for e in np.eye(d * d)]
    return Superoperator(d, d, np.array(cols).T)
