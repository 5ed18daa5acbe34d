import numpy as np
import pytest

from stochalg.channels import (apply, collapse_channel, conjugation_channel,
                               identity_channel, unvec)
from stochalg.groups import weyl_heisenberg_rep
from stochalg.operators import maximally_mixed, trace_norm
from stochalg.products import (PointClassification, ProductValidationError,
                               check_covariance, classify_point, from_bilinear,
                               left_map, maximally_mixed_collapse_residual,
                               mixture_product, partial_maps, partial_trace,
                               partial_trace_product, povm_product, right_map,
                               same_level_set)
from stochalg.sampling import (rand_density, rand_hermitian, rand_operator,
                               rand_unitary)
from stochalg.twirled import TwirledContext, as_stochastic_product

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


# --------------------------------------------------------------------------
# from_bilinear
# --------------------------------------------------------------------------

def test_from_bilinear_accepts_left_constant_product():
    # canonical extension of (rho, sigma) -> sigma is tr(a) b
    p = from_bilinear(lambda a, b: np.trace(a) * b, dim=2)
    rho, sigma = np.diag([1.0, 0.0]), np.diag([0.3, 0.7])
    np.testing.assert_allclose(p(rho, sigma), sigma)


def test_from_bilinear_accepts_convex_average():
    p = from_bilinear(lambda a, b: (np.trace(b) * a + np.trace(a) * b) / 2, dim=3)
    assert p.descriptor["kind"] == "callable"


def test_from_bilinear_rejects_operator_composition():
    with pytest.raises(ProductValidationError) as exc:
        from_bilinear(lambda a, b: a @ b, dim=2)
    rho, sigma = exc.value.witness
    assert rho.shape == (2, 2) and sigma.shape == (2, 2)


def test_from_bilinear_tensor_route(rng):
    p0 = from_bilinear(lambda a, b: np.trace(a) * b, dim=2)
    t = p0.tensor()
    p1 = from_bilinear(t)
    a, b = rand_operator(2, rng), rand_operator(2, rng)
    np.testing.assert_allclose(p0(a, b), p1(a, b), atol=1e-12)


# --------------------------------------------------------------------------
# mixture products
# --------------------------------------------------------------------------

def test_mixture_alpha_one_is_right_constant(rng):
    u = rand_unitary(2, rng)
    p = mixture_product(conjugation_channel(u), identity_channel(2), 1.0)
    rho = rand_density(2, rng)
    out1 = p(rho, rand_density(2, rng))
    out2 = p(rho, rand_density(2, rng))
    np.testing.assert_allclose(out1, out2, atol=1e-12)
    np.testing.assert_allclose(out1, u @ rho @ u.conj().T, atol=1e-12)


def test_mixture_half_identity_is_average(rng):
    p = mixture_product(identity_channel(3), identity_channel(3), 0.5)
    rho, sigma = rand_density(3, rng), rand_density(3, rng)
    np.testing.assert_allclose(p(rho, sigma), (rho + sigma) / 2, atol=1e-12)


def test_mixture_is_banach_contractive(rng):
    p = mixture_product(conjugation_channel(rand_unitary(3, rng)),
                        collapse_channel(rand_density(3, rng)), 0.4)
    for _ in range(100):
        a, b = rand_operator(3, rng), rand_operator(3, rng)
        assert trace_norm(p(a, b)) <= trace_norm(a) * trace_norm(b) + 1e-9


# --------------------------------------------------------------------------
# POVM products
# --------------------------------------------------------------------------

def test_povm_single_effect_reduces_to_left_constant(rng):
    u = rand_unitary(2, rng)
    p = povm_product([np.eye(2)], [conjugation_channel(u)])
    rho, sigma = rand_density(2, rng), rand_density(2, rng)
    np.testing.assert_allclose(p(rho, sigma), u @ sigma @ u.conj().T, atol=1e-12)


def _two_effect_product(d, rng, phi=None, psi=None):
    e = np.diag([1.0] + [0.0] * (d - 1)).astype(complex)
    phi = phi if phi is not None else conjugation_channel(rand_unitary(d, rng))
    psi = psi if psi is not None else conjugation_channel(rand_unitary(d, rng))
    return e, povm_product([e, np.eye(d) - e], [phi, psi])


def test_povm_two_effect_matches_formula(rng):
    d = 3
    u, v = rand_unitary(d, rng), rand_unitary(d, rng)
    e, p = _two_effect_product(d, rng, conjugation_channel(u), conjugation_channel(v))
    rho, sigma = rand_density(d, rng), rand_density(d, rng)
    w = np.trace(rho @ e).real
    expected = w * u @ sigma @ u.conj().T + (1 - w) * v @ sigma @ v.conj().T
    np.testing.assert_allclose(p(rho, sigma), expected, atol=1e-12)


def test_povm_requires_valid_povm(rng):
    with pytest.raises(ValueError, match="identity"):
        povm_product([np.eye(2) * 0.5], [identity_channel(2)])
    with pytest.raises(ValueError, match="positive"):
        povm_product([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])],
                     [identity_channel(2), identity_channel(2)])


def test_two_effects_cannot_be_informationally_complete(rng):
    """n = 2 < d^2 effects leave the right partial map a nontrivial kernel."""
    e, p = _two_effect_product(2, rng)
    sigma = rand_density(2, rng)
    r = right_map(p, sigma)
    # a traceless Hermitian A with tr(A E) = 0 sits in the kernel
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    assert abs(np.trace(a @ e)) < 1e-12 and abs(np.trace(a)) < 1e-12
    assert np.max(np.abs(apply(r, a))) <= 1e-12
    assert np.linalg.matrix_rank(r.matrix, tol=1e-10) < 4


# --------------------------------------------------------------------------
# partial-trace products
# --------------------------------------------------------------------------

def test_partial_trace_identity_channel(rng):
    p = partial_trace_product(identity_channel(4), dim=2, dim_aux=2)
    rho, sigma = rand_density(2, rng), rand_density(2, rng)
    np.testing.assert_allclose(p(rho, sigma), rho, atol=1e-12)


def test_partial_trace_swap_channel(rng):
    swap = np.eye(4)[[0, 2, 1, 3]].astype(complex)
    p = partial_trace_product(conjugation_channel(swap), dim=2, dim_aux=2)
    rho, sigma = rand_density(2, rng), rand_density(2, rng)
    np.testing.assert_allclose(p(rho, sigma), sigma, atol=1e-12)


def test_partial_trace_cnot_against_contraction_oracle(rng):
    p = partial_trace_product(conjugation_channel(CNOT), dim=2, dim_aux=2)
    for rho, sigma in [(PLUS, PLUS), (rand_density(2, rng), rand_density(2, rng))]:
        # independent oracle: dense tensor contraction, no vectorization
        joint = CNOT @ np.kron(rho, sigma) @ CNOT.conj().T
        expected = joint.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
        np.testing.assert_allclose(p(rho, sigma), expected, atol=1e-12)
    np.testing.assert_allclose(p(PLUS, PLUS), PLUS, atol=1e-12)


def test_partial_trace_helper():
    x = np.kron(np.diag([1.0, 2.0]), np.eye(3))
    np.testing.assert_allclose(partial_trace(x, 2, 3), np.diag([3.0, 6.0]))


# --------------------------------------------------------------------------
# partial maps
# --------------------------------------------------------------------------

def test_partial_maps_mixture_formula(rng):
    p = mixture_product(identity_channel(2), identity_channel(2), 0.5)
    rho = rand_density(2, rng)
    lm = left_map(p, rho)
    for e in np.eye(4):
        a = unvec(e, 2)
        np.testing.assert_allclose(apply(lm, a), (np.trace(a) * rho + a) / 2,
                                   atol=1e-12)


def test_partial_maps_consistency_and_left_constant(rng):
    p = from_bilinear(lambda a, b: np.trace(a) * b, dim=2)
    pm = partial_maps(p)
    r1, r2 = rand_density(2, rng), rand_density(2, rng)
    np.testing.assert_allclose(pm.left(r1).matrix, pm.left(r2).matrix, atol=1e-12)
    sigma = rand_density(2, rng)
    np.testing.assert_allclose(apply(pm.left(r1), sigma),
                               apply(pm.right(sigma), r1), atol=1e-12)


# --------------------------------------------------------------------------
# point classification
# --------------------------------------------------------------------------

def test_bijective_point_for_effect_certain_state(rng):
    d = 3
    u = rand_unitary(d, rng)
    e, p = _two_effect_product(d, rng, phi=conjugation_channel(u))
    rho = np.diag([1.0] + [0.0] * (d - 1)).astype(complex)   # tr(rho E) = 1
    point = classify_point(p, rho, "left", samples=60, seed=0)
    assert point.kind == "bijective"


def test_collapsing_point_for_twirled_maximally_mixed(rng):
    ctx = TwirledContext(weyl_heisenberg_rep(3), fiducial=rand_density(3, rng))
    p = as_stochastic_product(ctx)
    point = classify_point(p, maximally_mixed(3), "left", samples=60, seed=0)
    assert point.kind == "collapsing"
    np.testing.assert_allclose(point.map_classification.collapse_target,
                               maximally_mixed(3), atol=1e-10)
    # right side collapses to the same channel (commutative product)
    point_r = classify_point(p, maximally_mixed(3), "right", samples=60, seed=0)
    assert point_r.kind == "collapsing"
    np.testing.assert_allclose(point_r.map_classification.collapse_target,
                               point.map_classification.collapse_target, atol=1e-10)


def test_left_constant_unitary_product_is_left_bijective_everywhere(rng):
    u = rand_unitary(3, rng)
    p = mixture_product(identity_channel(3), conjugation_channel(u), 0.0)
    for _ in range(3):
        point = classify_point(p, rand_density(3, rng), "left", samples=40, seed=1)
        assert point.kind == "bijective"
        rec = point.map_classification.recovered_unitary
        np.testing.assert_allclose(np.abs(rec.conj().T @ u), np.eye(3), atol=1e-8)
    # every state shares the single left level set
    assert same_level_set(p, rand_density(3, rng), rand_density(3, rng), "left")


def test_generic_point_for_strict_mixture(rng):
    d = 2
    u, v = rand_unitary(d, rng), rand_unitary(d, rng)
    e, p = _two_effect_product(d, rng, conjugation_channel(u), conjugation_channel(v))
    rho = rand_density(d, rng)          # full rank: 0 < tr(rho E) < 1
    point = classify_point(p, rho, "left", samples=60, seed=0)
    assert point.kind == "generic"
    assert isinstance(point, PointClassification)


def test_level_set_membership(rng):
    d = 3
    e, p = _two_effect_product(d, rng)
    in1 = np.diag([1.0, 0, 0]).astype(complex)
    in2 = np.diag([1.0, 0, 0]).astype(complex)   # same effect-1 certainty
    other = np.diag([0, 1.0, 0]).astype(complex)
    assert same_level_set(p, in1, in2, "left")
    assert not same_level_set(p, in1, other, "left")


# --------------------------------------------------------------------------
# covariance of products
# --------------------------------------------------------------------------

def test_covariance_trivial_group_passes(rng):
    from stochalg.groups import ProjectiveRep, trivial_group
    rep = ProjectiveRep(trivial_group(), 2, np.eye(2, dtype=complex)[None],
                        np.ones(1), np.ones((1, 1), dtype=complex))
    p = mixture_product(identity_channel(2), identity_channel(2), 0.5)
    report = check_covariance(p, rep, n_pairs=3, seed=0)
    assert report["passed"]


def test_twirled_product_is_left_covariant(rng):
    rep = weyl_heisenberg_rep(3)
    ctx = TwirledContext(rep, fiducial=rand_density(3, rng))
    p = as_stochastic_product(ctx)
    for side in ("left", "right"):   # right covariance holds too: abelian group
        report = check_covariance(p, rep, side=side, n_pairs=3, seed=1, tol=1e-10)
        assert report["passed"], report


def test_noncommuting_mixture_fails_covariance(rng):
    rep = weyl_heisenberg_rep(2)
    u0 = np.diag([1.0, 1j])           # does not commute with the shift X
    p = mixture_product(conjugation_channel(u0), identity_channel(2), 0.7)
    report = check_covariance(p, rep, n_pairs=3, seed=2, tol=1e-10)
    assert not report["passed"]
    assert report["max_residual"] > 1e-3


# --------------------------------------------------------------------------
# bilinear-map invariants
# --------------------------------------------------------------------------

def _constructed_products(rng):
    yield mixture_product(conjugation_channel(rand_unitary(3, rng)),
                          identity_channel(3), 0.3)
    e = np.diag([1.0, 0.5, 0.0]).astype(complex)
    yield povm_product([e, np.eye(3) - e],
                       [identity_channel(3),
                        conjugation_channel(rand_unitary(3, rng))])
    yield as_stochastic_product(
        TwirledContext(weyl_heisenberg_rep(3), fiducial=rand_density(3, rng)))


def test_trace_multiplicativity_and_norm_bounds(rng):
    for p in _constructed_products(rng):
        for _ in range(30):
            a, b = rand_operator(3, rng), rand_operator(3, rng)
            out = p(a, b)
            assert abs(np.trace(out) - np.trace(a) * np.trace(b)) <= 1e-10
            assert trace_norm(out) <= 2 * trace_norm(a) * trace_norm(b) + 1e-9
            ah, bh = rand_hermitian(3, rng), rand_hermitian(3, rng)
            assert trace_norm(p(ah, bh)) <= trace_norm(ah) * trace_norm(bh) + 1e-9


def test_joint_lipschitz_bound(rng):
    for p in _constructed_products(rng):
        for _ in range(10):
            r1, r2 = rand_density(3, rng), rand_density(3, rng)
            s1, s2 = rand_density(3, rng), rand_density(3, rng)
            lhs = trace_norm(p(r1, s1) - p(r2, s2))
            assert lhs <= 2 * (trace_norm(r1 - r2) + trace_norm(s1 - s2)) + 1e-9


def test_state_outputs_are_states(rng):
    from stochalg.operators import is_density
    for p in _constructed_products(rng):
        for _ in range(20):
            assert is_density(p(rand_density(3, rng), rand_density(3, rng)))


def test_maximally_mixed_is_fixed_under_covariant_products(rng):
    """Irreducible covariance forces I/n o sigma = I/n."""
    ctx = TwirledContext(weyl_heisenberg_rep(4), fiducial=rand_density(4, rng))
    p = as_stochastic_product(ctx)
    assert maximally_mixed_collapse_residual(p, samples=10, seed=3) <= 1e-10


def test_collapsing_point_rank_constraints(rng):
    """With the maximally mixed fiducial every state is a two-sided collapsing
    point; the shared collapse channel has image rank equal to the point rank."""
    d = 3
    ctx = TwirledContext(weyl_heisenberg_rep(d), fiducial=maximally_mixed(d))
    p = as_stochastic_product(ctx)
    rho = rand_density(d, rng)          # full rank, like I/n
    for side in ("left", "right"):
        point = classify_point(p, rho, side, samples=40, seed=4)
        assert point.kind == "collapsing"
        target = point.map_classification.collapse_target
        np.testing.assert_allclose(target, maximally_mixed(d), atol=1e-10)
        assert np.linalg.matrix_rank(target, tol=1e-10) \
            == np.linalg.matrix_rank(rho, tol=1e-10)
