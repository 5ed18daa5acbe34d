"""Verification suites: named bundles of identity checks over configured contexts.

A run config is a plain JSON-able dict:

    {
      "schema": 1,
      "seed": 1234,                          # mandatory
      "suites": ["orthogonality", ...],      # names from SUITES
      "contexts": [context descriptors],
      "samples": {...},                      # optional sample-count overrides
      "phase_space": {"points": 256, "extent": 12.0, "triples": 20},
      "tolerances": {...}                    # optional tolerance overrides
    }

Context descriptors extend the serialized form with symbolic fiducials
("random_pure", "random_mixed", "maximally_mixed") and measures
("random_probability"), resolved deterministically from the run seed.
Reports carry no timings, so identical configs give identical bytes.
"""

from __future__ import annotations

import numpy as np

from . import channels as ch
from . import products as pr
from . import twirled as tw
from .groups import (GroupMeasure, dirac_matrix_measure, dirac_measure,
                     random_probability_measure, uniform_measure,
                     verify_orthogonality)
from .operators import maximally_mixed, trace_norm
from .phasespace import (GaussianState, PhaseSpaceGrid, fock_wigner, gaussian_oracle,
                         gaussian_wigner, grid_moments, husimi_kano, marginal,
                         quantum_convolution_char, quantum_convolution_wigner)
from .sampling import rand_density, rand_operator, rand_pure, rand_unitary, rng_for
from .serialize import rep_from_dict, measure_from_dict, operator_from_dict
from .twirled import TwirledContext, triple_product


class ConfigError(ValueError):
    """Invalid run configuration (unknown suite, bad descriptor, missing seed)."""


DEFAULT_TOLERANCES = {
    "stochasticity": 1e-9,
    "stochasticity_quadrature": 1e-6,
    "associativity_finite": 1e-10,
    "associativity_quadrature": 1e-6,
    "commutativity": 1e-10,
    "noncommutativity_floor": 1e-3,
    "trace_identity": 1e-10,
    "norm_ratio_excess": 1e-9,
    "covariance_finite": 1e-10,
    "covariance_quadrature": 1e-6,
    "collapse": 1e-10,
    "orthogonality_finite": 1e-12,
    "orthogonality_quadrature": 1e-8,
    "map_norm": 1e-9,
    "phase_space_rel": 1e-6,
    "phase_space_mean": 1e-6,
    "phase_space_cov": 1e-5,
    "phase_space_mass": 1e-8,
    "husimi_negativity": 1e-9,
}

DEFAULT_SAMPLES = {
    "pairs": 200,
    "triples": 50,
    "trace_norm": 100,
    "covariance_pairs": 10,
    "taxonomy_dims": [2, 3, 4],
}


def _check(name, context, residual, tolerance, larger_is_better=False) -> dict:
    residual = float(residual)
    passed = residual >= tolerance if larger_is_better else residual <= tolerance
    return {"name": name, "context": context, "residual": residual,
            "tolerance": float(tolerance), "passed": bool(passed)}


def _context_label(desc: dict) -> str:
    rep = desc.get("rep", {}) if isinstance(desc, dict) else {}
    if rep.get("kind") == "weyl":
        head = f"weyl-d{rep.get('dim', '?')}"
    elif rep.get("kind") == "su2":
        head = f"su2-j{rep.get('two_j', '?')}/2"
    else:
        head = rep.get("kind", "rep")
    fid = desc.get("fiducial", {"kind": "maximally_mixed"})
    nu = desc.get("nu", {"kind": "dirac"})
    fk = fid.get("kind", "operator") if isinstance(fid, dict) else "operator"
    return f"{head}|fid:{fk}|nu:{nu.get('kind', 'weights')}"


def build_context(desc: dict, seed: int, index: int) -> TwirledContext:
    """Resolve a (possibly symbolic) context descriptor into a TwirledContext."""
    try:
        return _build_context(desc, seed, index)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad context descriptor: {exc}") from exc


def _build_context(desc: dict, seed: int, index: int) -> TwirledContext:
    rep = rep_from_dict(desc["rep"])
    rng = rng_for(seed, "context", index)

    fid_desc = desc.get("fiducial", {"kind": "maximally_mixed"})
    kind = fid_desc.get("kind", "operator")
    if kind == "maximally_mixed":
        fid = maximally_mixed(rep.dim)
    elif kind == "random_pure":
        fid = rand_pure(rep.dim, rng)
    elif kind == "random_mixed":
        fid = rand_density(rep.dim, rng)
    elif kind == "operator":
        fid = operator_from_dict(fid_desc["value"])
    else:
        raise ConfigError(f"unknown fiducial kind {kind!r}")

    nu_desc = desc.get("nu", {"kind": "dirac"})
    nkind = nu_desc.get("kind", "weights")
    if "weights_re" in nu_desc:
        nu = measure_from_dict(nu_desc)
    elif nkind == "dirac":
        nu = dirac_measure(rep.group) if rep.is_finite else dirac_matrix_measure(rep.dim)
    elif nkind == "uniform":
        nu = uniform_measure(rep.group) if rep.is_finite \
            else GroupMeasure(rep.group.weights, "probability")
    elif nkind == "random_probability":
        if not rep.is_finite:
            raise ConfigError("random_probability measures are finite-group only")
        nu = random_probability_measure(rep.group, rng)
    else:
        raise ConfigError(f"unknown measure kind {nkind!r}")
    return TwirledContext(rep, fiducial=fid, nu=nu)


def _contexts(config) -> list[tuple[str, TwirledContext]]:
    seed = config["seed"]
    out = []
    for i, desc in enumerate(config.get("contexts", [])):
        out.append((_context_label(desc), build_context(desc, seed, i)))
    if not out:
        raise ConfigError("this suite needs at least one context")
    return out


def _tol(config, key) -> float:
    return float(config.get("tolerances", {}).get(key, DEFAULT_TOLERANCES[key]))


def _n(config, key):
    return config.get("samples", {}).get(key, DEFAULT_SAMPLES[key])


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------

def suite_orthogonality(config) -> list[dict]:
    checks = []
    seen = set()
    for label, ctx in _contexts(config):
        rep_label = label.split("|")[0]
        if rep_label in seen:
            continue
        seen.add(rep_label)
        tol = _tol(config, "orthogonality_finite" if ctx.rep_u.is_finite
                   else "orthogonality_quadrature")
        res = verify_orthogonality(ctx.rep_u, trials=8, seed=config["seed"])
        checks.append(_check("orthogonality_relations", rep_label, res, tol))
    return checks


def suite_twirled_core(config) -> list[dict]:
    pairs = _n(config, "pairs")
    checks = []
    for label, ctx in _contexts(config):
        tol = _tol(config, "stochasticity" if ctx.rep_u.is_finite
                   else "stochasticity_quadrature")
        res = tw.verify_stochasticity(ctx, pairs=pairs, seed=config["seed"])
        for key in ("herm", "neg", "trace"):
            checks.append(_check(f"state_output_{key}", label, res[key], tol))
    return checks


def suite_associativity(config) -> list[dict]:
    triples = _n(config, "triples")
    checks = []
    for label, ctx in _contexts(config):
        tol = _tol(config, "associativity_finite" if ctx.rep_u.is_finite
                   else "associativity_quadrature")
        res = tw.verify_associativity(ctx, triples=triples, seed=config["seed"])
        checks.append(_check("associativity", label, res, tol))
    return checks


def suite_commutativity(config) -> list[dict]:
    checks = []
    for label, ctx in _contexts(config):
        res = tw.verify_commutativity(ctx, pairs=_n(config, "triples"),
                                      seed=config["seed"])
        if ctx.rep_u.is_abelian:
            checks.append(_check("commutativity", label, res,
                                 _tol(config, "commutativity")))
        else:
            checks.append(_check("noncommutativity_counterexample", label, res,
                                 _tol(config, "noncommutativity_floor"),
                                 larger_is_better=True))
    return checks


def suite_trace_norm(config) -> list[dict]:
    samples = _n(config, "trace_norm")
    checks = []
    for i, (label, ctx) in enumerate(_contexts(config)):
        res = tw.verify_trace_and_norm(ctx, samples=samples, seed=config["seed"])
        checks.append(_check("trace_identity", label, res["max_trace_residual"],
                             _tol(config, "trace_identity")))
        checks.append(_check("norm_ratio", label, res["max_norm_ratio"],
                             1.0 + _tol(config, "norm_ratio_excess")))
        if ctx.rep_u.is_finite:
            # complex-measure variant of the same context, varying all three
            # operators of the triple
            rng = rng_for(config["seed"], "complex-nu", i)
            w = (rng.random(ctx.rep_u.group.order) - 0.5
                 + 1j * (rng.random(ctx.rep_u.group.order) - 0.5))
            w *= 2.0 / np.abs(w).sum()
            cctx = TwirledContext(ctx.rep_u, fiducial=rand_operator(ctx.dim, rng),
                                  nu=GroupMeasure(w, "complex"))
            res = tw.verify_trace_and_norm(cctx, samples=samples, seed=config["seed"],
                                           vary_fiducial=True)
            checks.append(_check("trace_identity_complex_nu", label,
                                 res["max_trace_residual"], _tol(config, "trace_identity")))
            checks.append(_check("norm_ratio_complex_nu", label, res["max_norm_ratio"],
                                 1.0 + _tol(config, "norm_ratio_excess")))
    return checks


def suite_covariance(config) -> list[dict]:
    pairs = _n(config, "covariance_pairs")
    checks = []
    for label, ctx in _contexts(config):
        tol = _tol(config, "covariance_finite" if ctx.rep_u.is_finite
                   else "covariance_quadrature")
        res = tw.verify_covariance(ctx, pairs=pairs, seed=config["seed"])
        for key, val in res.items():
            checks.append(_check(key, label, val, tol))
        if ctx.rep_u.is_abelian:
            extra = tw.verify_abelian_symmetries(ctx, pairs=min(pairs, 5),
                                                 seed=config["seed"])
            checks.append(_check("abelian_symmetries", label, extra, tol))
    return checks


def suite_collapse(config) -> list[dict]:
    tol = _tol(config, "collapse")
    checks = []
    for label, ctx in _contexts(config):
        if not ctx.rep_u.is_finite:
            continue
        rng = rng_for(config["seed"], "collapse", label)
        mms = maximally_mixed(ctx.dim)
        rho, sigma = rand_density(ctx.dim, rng), rand_density(ctx.dim, rng)
        checks.append(_check("fiducial_mms_collapse", label, trace_norm(
            triple_product(ctx.with_fiducial(mms), rho, sigma) - mms), tol))
        checks.append(_check("left_mms_collapse", label, trace_norm(
            triple_product(ctx, mms, sigma) - mms), tol))
        checks.append(_check("right_mms_collapse", label, trace_norm(
            triple_product(ctx, rho, mms) - mms), tol))
        checks.append(_check("uniform_nu_collapse", label, trace_norm(
            triple_product(ctx.with_nu(uniform_measure(ctx.rep_u.group)), rho, sigma)
            - mms), tol))
        if ctx.is_stochastic:
            point = pr.classify_point(tw.as_stochastic_product(ctx), mms, "left",
                                      samples=50, seed=config["seed"])
            ok = point.kind == "collapsing" and point.map_classification.collapse_target \
                is not None
            target_res = trace_norm(point.map_classification.collapse_target - mms) \
                if ok else np.inf
            checks.append(_check("mms_classified_collapsing", label, target_res, tol))
    return checks


def suite_map_taxonomy(config) -> list[dict]:
    """Named map classes behave as classified: the finite-dimensional dichotomy."""
    tol = _tol(config, "map_norm")
    checks = []
    for d in _n(config, "taxonomy_dims"):
        rng = rng_for(config["seed"], "taxonomy", d)
        label = f"dim-{d}"

        # stochastic maps attain trace norm 1 exactly on states
        u = rand_unitary(d, rng)
        conj_u = ch.conjugation_channel(u)
        collapse = ch.collapse_channel(rand_pure(d, rng))
        worst = 0.0
        for _ in range(20):
            rho = rand_density(d, rng)
            for phi in (conj_u, collapse):
                worst = max(worst, abs(trace_norm(ch.apply(phi, rho)) - 1.0))
        checks.append(_check("stochastic_norm_attained", label, worst, tol))

        # pureness-preserving dichotomy: symmetry vs pure collapse
        cls_u = ch.classify(conj_u, samples=60, seed=config["seed"])
        cls_w = ch.classify(ch.antiunitary_channel(rand_unitary(d, rng)),
                            samples=60, seed=config["seed"])
        cls_c = ch.classify(collapse, samples=60, seed=config["seed"])
        dichotomy_ok = (cls_u.is_symmetry and not cls_u.is_collapse
                        and cls_w.is_symmetry and not cls_w.is_collapse
                        and cls_c.is_collapse and not cls_c.is_symmetry
                        and cls_c.is_pureness_preserving_sampled
                        and cls_c.witness is not None)
        checks.append(_check("pureness_dichotomy", label, 0.0 if dichotomy_ok else 1.0,
                             0.5))

        # two-isometry mixture: trace-norm isometric but not pureness-preserving
        t1 = np.zeros((2 * d, d), dtype=complex)
        t2 = np.zeros((2 * d, d), dtype=complex)
        t1[:d], t2[d:] = rand_unitary(d, rng), rand_unitary(d, rng)
        mix = ch.isometry_mixture_channel([(t1, False), (t2, False)], [0.5, 0.5])
        worst = 0.0
        for _ in range(50):
            a = rand_operator(d, rng)
            a = a + a.conj().T
            worst = max(worst, abs(trace_norm(ch.apply(mix, a)) - trace_norm(a)))
        cls_mix = ch.classify(mix, samples=60, seed=config["seed"])
        checks.append(_check("isometry_mixture_norm", label, worst, tol))
        mix_ok = (cls_mix.is_trace_preserving
                  and not cls_mix.is_pureness_preserving_sampled
                  and not cls_mix.is_symmetry)
        checks.append(_check("isometry_mixture_not_pureness", label,
                             0.0 if mix_ok else 1.0, 0.5))
    return checks


def suite_phase_space(config) -> list[dict]:
    ps_cfg = config.get("phase_space", {})
    grid = PhaseSpaceGrid(int(ps_cfg.get("points", 256)),
                          float(ps_cfg.get("extent", 12.0)))
    n_triples = int(ps_cfg.get("triples", 20))
    rng = rng_for(config["seed"], "phase-space")
    label = f"grid-{grid.points}x{grid.points}-L{grid.extent:g}"
    checks = []

    def random_gaussian():
        theta = rng.uniform(0, 2 * np.pi)
        c, s = np.cos(theta), np.sin(theta)
        r = np.array([[c, -s], [s, c]])
        cov = r @ np.diag(rng.uniform(0.5, 0.85, size=2)) @ r.T
        return GaussianState(rng.uniform(-0.8, 0.8, size=2), cov)

    worst_rel = worst_mean = worst_cov = worst_mass = worst_comm = 0.0
    for _ in range(n_triples):
        g_rho, g_fid, g_sig = (random_gaussian() for _ in range(3))
        s_rho, s_fid, s_sig = (gaussian_wigner(grid, g) for g in (g_rho, g_fid, g_sig))
        out_char = quantum_convolution_char(s_rho, s_fid, s_sig)
        out_wig = quantum_convolution_wigner(s_rho, s_fid, s_sig)
        scale = np.max(np.abs(out_wig.wigner))
        worst_rel = max(worst_rel,
                        np.max(np.abs(out_char.wigner - out_wig.wigner)) / scale)
        oracle = gaussian_oracle(g_rho, g_fid, g_sig)
        for out in (out_char, out_wig):
            mean, cov = grid_moments(grid, out.wigner)
            worst_mean = max(worst_mean, np.max(np.abs(mean - oracle.mean)))
            worst_cov = max(worst_cov, np.max(np.abs(cov - oracle.cov)))
            worst_mass = max(worst_mass, abs(out.norm_mass() - 1.0))
        swapped = quantum_convolution_wigner(s_sig, s_fid, s_rho)
        worst_comm = max(worst_comm,
                         np.max(np.abs(swapped.wigner - out_wig.wigner)) / scale)

    checks.append(_check("char_vs_wigner_relative", label, worst_rel,
                         _tol(config, "phase_space_rel")))
    checks.append(_check("gaussian_mean_sum_rule", label, worst_mean,
                         _tol(config, "phase_space_mean") * grid.extent))
    checks.append(_check("gaussian_cov_sum_rule", label, worst_cov,
                         _tol(config, "phase_space_cov")))
    checks.append(_check("output_normalization", label, worst_mass,
                         _tol(config, "phase_space_mass")))
    checks.append(_check("commutativity_wigner_form", label, worst_comm,
                         _tol(config, "phase_space_rel")))

    fock1 = fock_wigner(grid, 1)
    hk = husimi_kano(fock1)
    checks.append(_check("husimi_fock1_nonnegative", label, max(0.0, -hk.min()),
                         _tol(config, "husimi_negativity")))
    checks.append(_check("husimi_fock1_mass", label,
                         abs(hk.sum() * grid.dx ** 2 - 1.0),
                         _tol(config, "phase_space_mass")))
    checks.append(_check("fock1_marginal_nonnegative", label,
                         max(0.0, -marginal(grid, fock1.wigner).min()), 1e-8))
    return checks


SUITES = {
    "orthogonality": suite_orthogonality,
    "twirled-core": suite_twirled_core,
    "associativity": suite_associativity,
    "commutativity": suite_commutativity,
    "trace-norm": suite_trace_norm,
    "covariance": suite_covariance,
    "collapse": suite_collapse,
    "map-taxonomy": suite_map_taxonomy,
    "phase-space": suite_phase_space,
}


def validate_config(config: dict) -> dict:
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    if "seed" not in config:
        raise ConfigError("config must carry a seed")
    try:
        config["seed"] = int(config["seed"])
    except (TypeError, ValueError):
        raise ConfigError("seed must be an integer")
    suites = config.get("suites", [])
    if not suites:
        raise ConfigError("config selects no suites")
    for name in suites:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    return config


def run_config(config: dict) -> dict:
    """Execute the selected suites; returns {"summary": ..., "reports": {...}}."""
    config = validate_config(config)
    reports = {}
    import time
    timings = {}
    for name in config["suites"]:
        t0 = time.perf_counter()
        checks = SUITES[name](config)
        timings[name] = time.perf_counter() - t0
        reports[name] = {
            "schema": 1,
            "suite": name,
            "seed": config["seed"],
            "passed": all(c["passed"] for c in checks),
            "checks": checks,
        }
    summary = {
        "schema": 1,
        "seed": config["seed"],
        "passed": all(r["passed"] for r in reports.values()),
        "suites": {name: r["passed"] for name, r in reports.items()},
    }
    return {"summary": summary, "reports": reports, "timings": timings}


def acceptance_config(seed: int = 20240611) -> dict:
    """The full acceptance sweep: every Weyl dimension 2..6 with all fiducial
    and measure kinds, SU(2) spins 1/2 and 1, every suite, stated tolerances."""
    contexts = []
    for d in (2, 3, 4, 5, 6):
        for fid in ("random_pure", "maximally_mixed", "random_mixed"):
            for nu in ("dirac", "uniform", "random_probability"):
                contexts.append({"rep": {"kind": "weyl", "dim": d},
                                 "fiducial": {"kind": fid}, "nu": {"kind": nu}})
    for two_j in (1, 2):
        contexts.append({"rep": {"kind": "su2", "two_j": two_j},
                         "fiducial": {"kind": "random_mixed"}, "nu": {"kind": "dirac"}})
    return {
        "schema": 1,
        "seed": seed,
        "suites": list(SUITES),
        "contexts": contexts,
        "samples": dict(DEFAULT_SAMPLES),
        "phase_space": {"points": 256, "extent": 12.0, "triples": 20},
    }


# --------------------------------------------------------------------------
# Demo tables
# --------------------------------------------------------------------------

def demo_tables(config: dict) -> dict:
    """Deterministic CSVs: residual-vs-dimension, collapse checks, a Husimi slice."""
    if "seed" not in config:
        raise ConfigError("config must carry a seed")
    seed = int(config["seed"])

    rows = ["dim,associativity_residual"]
    for d in (2, 3, 4, 5, 6):
        ctx = build_context({"rep": {"kind": "weyl", "dim": d},
                             "fiducial": {"kind": "random_mixed"},
                             "nu": {"kind": "random_probability"}}, seed, d)
        rows.append(f"{d},{tw.verify_associativity(ctx, triples=10, seed=seed):.3e}")
    assoc_csv = "\n".join(rows) + "\n"

    rows = ["dim,fiducial_mms_residual,passed"]
    for d in (2, 3, 4, 5, 6):
        ctx = build_context({"rep": {"kind": "weyl", "dim": d},
                             "fiducial": {"kind": "maximally_mixed"},
                             "nu": {"kind": "dirac"}}, seed, d)
        rng = rng_for(seed, "demo-collapse", d)
        res = trace_norm(triple_product(ctx, rand_density(d, rng), rand_density(d, rng))
                         - maximally_mixed(d))
        rows.append(f"{d},{res:.3e},{str(res <= 1e-10).lower()}")
    collapse_csv = "\n".join(rows) + "\n"

    grid = PhaseSpaceGrid(256, 12.0)
    hk = husimi_kano(fock_wigner(grid, 1))
    c = grid.points // 2
    rows = ["q,husimi_fock1"]
    for i in range(c, min(c + 64, grid.points)):
        rows.append(f"{grid.axis()[i]:.6f},{hk[i, c]:.9e}")
    husimi_csv = "\n".join(rows) + "\n"

    return {
        "associativity_vs_dim.csv": assoc_csv,
        "collapse_fiducial_mms.csv": collapse_csv,
        "husimi_fock1_slice.csv": husimi_csv,
    }
