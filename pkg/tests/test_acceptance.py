"""Acceptance gate: every stated criterion at its stated tolerance.

Runs the full context sweep once (Weyl dimensions 2..6 with all fiducial and
measure kinds, SU(2) spins 1/2 and 1) through the same suite registry the CLI
uses, then checks each criterion and prints one PASS/FAIL line per criterion
(visible with `pytest -s`).
"""

import pytest

from stochalg.serialize import canonical_json
from stochalg.suites import acceptance_config, run_config

SEED = 20240611


@pytest.fixture(scope="module")
def sweep():
    return run_config(acceptance_config(SEED))


def _criterion(num, label, passed, detail=""):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {num:2d}: {label}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert passed, line


def _suite_checks(sweep, suite, name_filter=None, context_filter=None):
    checks = sweep["reports"][suite]["checks"]
    if name_filter:
        checks = [c for c in checks if name_filter(c["name"])]
    if context_filter:
        checks = [c for c in checks if context_filter(c["context"])]
    assert checks, f"no checks matched in suite {suite}"
    return checks


def _worst(checks):
    return max(c["residual"] for c in checks)


def test_criterion_1_twirled_stochasticity(sweep):
    checks = _suite_checks(sweep, "twirled-core",
                           context_filter=lambda c: c.startswith("weyl"))
    assert len(checks) == 45 * 3          # 45 Weyl contexts, three residuals each
    ok = all(c["passed"] and c["tolerance"] <= 1e-9 for c in checks)
    runtime = sweep["timings"]["twirled-core"]
    _criterion(1, "twirled outputs are valid states (1e-9)",
               ok and runtime <= 60.0,
               f"worst {_worst(checks):.1e}, {runtime:.1f}s")


def test_criterion_2_associativity(sweep):
    finite = _suite_checks(sweep, "associativity",
                           context_filter=lambda c: c.startswith("weyl"))
    quad = _suite_checks(sweep, "associativity",
                         context_filter=lambda c: c.startswith("su2"))
    ok = all(c["passed"] and c["tolerance"] <= 1e-10 for c in finite) \
        and all(c["passed"] and c["tolerance"] <= 1e-6 for c in quad)
    runtime = sweep["timings"]["associativity"]
    _criterion(2, "associativity (1e-10 finite, 1e-6 quadrature)",
               ok and runtime <= 60.0,
               f"worst finite {_worst(finite):.1e}, su2 {_worst(quad):.1e}, "
               f"{runtime:.1f}s")


def test_criterion_3_commutativity(sweep):
    abelian = _suite_checks(sweep, "commutativity",
                            name_filter=lambda n: n == "commutativity")
    counter = _suite_checks(sweep, "commutativity",
                            name_filter=lambda n: n == "noncommutativity_counterexample")
    ok = all(c["passed"] and c["tolerance"] <= 1e-10 for c in abelian) \
        and all(c["passed"] and c["residual"] > 1e-3 for c in counter)
    _criterion(3, "commutativity on abelian contexts + SU(2) counterexample",
               ok, f"worst abelian {_worst(abelian):.1e}, "
                   f"su2 residual {min(c['residual'] for c in counter):.1e}")


def test_criterion_4_trace_and_norm_laws(sweep):
    traces = _suite_checks(sweep, "trace-norm",
                           name_filter=lambda n: n.startswith("trace_identity"))
    norms = _suite_checks(sweep, "trace-norm",
                          name_filter=lambda n: n.startswith("norm_ratio"))
    complex_nu = [c for c in traces + norms if c["name"].endswith("complex_nu")]
    ok = all(c["passed"] for c in traces + norms) and len(complex_nu) > 0
    _criterion(4, "trace identity (1e-10) and Banach norm bound (incl. complex nu)",
               ok, f"worst trace {_worst(traces):.1e}")


def test_criterion_5_covariance(sweep):
    finite = _suite_checks(sweep, "covariance",
                           context_filter=lambda c: c.startswith("weyl"))
    names = {c["name"] for c in finite}
    ok = {"left_covariance", "fiducial_translate", "argument_translate",
          "dirac_exchange"} <= names
    ok = ok and all(c["passed"] and c["tolerance"] <= 1e-10 for c in finite)
    _criterion(5, "covariance/equivariance identities (1e-10, all elements)",
               ok, f"worst {_worst(finite):.1e}")


def test_criterion_6_collapse_relations(sweep):
    checks = _suite_checks(sweep, "collapse")
    classified = [c for c in checks if c["name"] == "mms_classified_collapsing"]
    ok = all(c["passed"] and c["tolerance"] <= 1e-10 for c in checks) and classified
    _criterion(6, "maximally-mixed collapse relations and point classification",
               ok, f"worst {_worst(checks):.1e}")


def test_criterion_7_orthogonality(sweep):
    finite = _suite_checks(sweep, "orthogonality",
                           context_filter=lambda c: c.startswith("weyl"))
    quad = _suite_checks(sweep, "orthogonality",
                         context_filter=lambda c: c.startswith("su2"))
    ok = all(c["passed"] and c["tolerance"] <= 1e-12 for c in finite) \
        and all(c["passed"] and c["tolerance"] <= 1e-8 for c in quad)
    _criterion(7, "orthogonality relations with unit constant",
               ok, f"worst finite {_worst(finite):.1e}, su2 {_worst(quad):.1e}")


def test_criterion_8_map_taxonomy(sweep):
    checks = _suite_checks(sweep, "map-taxonomy")
    names = {c["name"] for c in checks}
    ok = {"stochastic_norm_attained", "pureness_dichotomy",
          "isometry_mixture_norm", "isometry_mixture_not_pureness"} <= names
    ok = ok and all(c["passed"] for c in checks)
    _criterion(8, "map taxonomy: norm attainment, dichotomy, isometric mixtures", ok)


def test_criterion_9_phase_space(sweep):
    checks = _suite_checks(sweep, "phase-space")
    by_name = {c["name"]: c for c in checks}
    ok = (by_name["char_vs_wigner_relative"]["tolerance"] <= 1e-6
          and by_name["husimi_fock1_nonnegative"]["tolerance"] <= 1e-9
          and all(c["passed"] for c in checks))
    runtime = sweep["timings"]["phase-space"]
    _criterion(9, "phase-space convolution cross-checks (256^2 grid)",
               ok and runtime <= 120.0,
               f"rel {by_name['char_vs_wigner_relative']['residual']:.1e}, "
               f"{runtime:.1f}s")


def test_criterion_10_determinism(sweep):
    again = run_config(acceptance_config(SEED))
    same = all(canonical_json(sweep["reports"][name]) == canonical_json(again["reports"][name])
               for name in sweep["reports"])
    same = same and canonical_json(sweep["summary"]) == canonical_json(again["summary"])
    _criterion(10, "identical seed gives byte-identical reports", same)


def test_acceptance_summary(sweep):
    assert sweep["summary"]["passed"], sweep["summary"]
