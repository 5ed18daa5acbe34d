"""JSON schemas for operators, maps, measures, groups, products and reports.

Numbers round-trip through Python floats (exact for finite doubles). Reports
are rendered with sorted keys and fixed separators so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import MapClassification, Superoperator
from .groups import (FiniteGroup, GroupMeasure, ProjectiveRep, dirac_measure,
                     group_from_cayley, rep_from_matrices, su2_quadrature_rep,
                     uniform_measure, weyl_heisenberg_rep)
from .phasespace import PhaseSpaceGrid, PhaseSpaceState
from .twirled import TwirledContext


def operator_to_dict(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def operator_from_dict(d: dict) -> np.ndarray:
    a = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    if a.shape != (d["dim"], d["dim"]):
        raise ValueError("operator payload shape does not match dim")
    return a


def superop_to_dict(phi: Superoperator) -> dict:
    return {
        "dim": phi.dim_in,
        "dim_out": phi.dim_out,
        "matrix_re": phi.matrix.real.tolist(),
        "matrix_im": phi.matrix.imag.tolist(),
        "antilinear": bool(phi.antilinear),
    }


def superop_from_dict(d: dict) -> Superoperator:
    m = np.asarray(d["matrix_re"], dtype=float) + 1j * np.asarray(d["matrix_im"], dtype=float)
    dim_in = int(d["dim"])
    dim_out = int(d.get("dim_out", dim_in))
    if m.shape != (dim_out * dim_out, dim_in * dim_in):
        raise ValueError("superoperator matrix shape does not match dims")
    return Superoperator(dim_in, dim_out, m, bool(d.get("antilinear", False)))


def classification_to_dict(cls: MapClassification) -> dict:
    out = {
        "is_trace_preserving": cls.is_trace_preserving,
        "is_positive_sampled": cls.is_positive_sampled,
        "is_completely_positive": cls.is_completely_positive,
        "is_pureness_preserving_sampled": cls.is_pureness_preserving_sampled,
        "is_symmetry": cls.is_symmetry,
        "is_collapse": cls.is_collapse,
        "margins": {k: float(v) for k, v in cls.margins.items()},
    }
    if cls.witness is not None:
        out["witness"] = operator_to_dict(cls.witness)
    if cls.collapse_target is not None:
        out["collapse_target"] = operator_to_dict(cls.collapse_target)
    return out


def measure_to_dict(nu: GroupMeasure) -> dict:
    return {
        "kind": nu.kind,
        "weights_re": nu.weights.real.tolist(),
        "weights_im": nu.weights.imag.tolist(),
    }


def measure_from_dict(d: dict) -> GroupMeasure:
    w = np.asarray(d["weights_re"], dtype=float) + 1j * np.asarray(d["weights_im"], dtype=float)
    if d["kind"] == "probability":
        return GroupMeasure(w.real, "probability")
    return GroupMeasure(w, "complex")


def group_to_dict(g: FiniteGroup) -> dict:
    return {"order": g.order, "cayley": g.cayley.tolist()}


def group_from_dict(d: dict) -> FiniteGroup:
    return group_from_cayley(np.asarray(d["cayley"], dtype=int))


def group_from_file(path) -> FiniteGroup:
    """Load a user-supplied group from a JSON file holding a Cayley table."""
    with open(path) as fh:
        return group_from_dict(json.load(fh))


def rep_to_dict(rep: ProjectiveRep) -> dict:
    meta = rep.meta or {}
    if meta.get("kind") == "weyl":
        return {"kind": "weyl", "dim": rep.dim}
    if meta.get("kind") == "su2":
        return {"kind": "su2", "two_j": int(round(2 * meta["spin_j"])),
                "n_beta": meta["n_beta"], "n_alpha": meta["n_alpha"]}
    if not rep.is_finite:
        raise ValueError("cannot serialize a quadrature rep without su2 metadata")
    return {
        "kind": "table",
        "cayley": rep.group.cayley.tolist(),
        "matrices": [operator_to_dict(m) for m in rep.matrices],
    }


def rep_from_dict(d: dict) -> ProjectiveRep:
    kind = d["kind"]
    if kind == "weyl":
        return weyl_heisenberg_rep(int(d["dim"]))
    if kind == "su2":
        return su2_quadrature_rep(d["two_j"] / 2.0, d.get("n_beta"), d.get("n_alpha"))
    if kind == "table":
        group = group_from_cayley(np.asarray(d["cayley"], dtype=int))
        mats = np.stack([operator_from_dict(m) for m in d["matrices"]])
        return rep_from_matrices(group, mats)
    raise ValueError(f"unknown representation kind {kind!r}")


def nu_from_dict(d: dict, rep: ProjectiveRep) -> GroupMeasure:
    if "weights_re" in d:      # concrete weights; kind is probability/complex
        return measure_from_dict(d)
    kind = d.get("kind", "dirac")
    if kind == "dirac":
        if rep.is_finite:
            return dirac_measure(rep.group)
        from .groups import dirac_matrix_measure
        return dirac_matrix_measure(rep.dim)
    if kind == "uniform":
        if rep.is_finite:
            return uniform_measure(rep.group)
        return GroupMeasure(rep.group.weights, "probability")
    raise ValueError(f"unknown measure kind {kind!r}")


def context_to_dict(ctx: TwirledContext) -> dict:
    out = {
        "rep": rep_to_dict(ctx.rep_u),
        "fiducial": operator_to_dict(ctx.fiducial),
    }
    if isinstance(ctx.nu, GroupMeasure):
        out["nu"] = measure_to_dict(ctx.nu)
    else:
        out["nu"] = {"kind": "dirac"}
    return out


def context_from_dict(d: dict) -> TwirledContext:
    rep = rep_from_dict(d["rep"])
    fid = operator_from_dict(d["fiducial"]) if "fiducial" in d else None
    nu = nu_from_dict(d["nu"], rep) if "nu" in d else None
    return TwirledContext(rep, fiducial=fid, nu=nu)


# --------------------------------------------------------------------------
# Product descriptors (tagged unions)
# --------------------------------------------------------------------------

def product_from_descriptor(d: dict):
    from . import products as pr
    from .twirled import as_stochastic_product
    kind = d["kind"]
    if kind == "mixture":
        return pr.mixture_product(superop_from_dict(d["phi"]),
                                  superop_from_dict(d["psi"]), float(d["alpha"]))
    if kind == "povm":
        effects = [operator_from_dict(e) for e in d["effects"]]
        channels = [superop_from_dict(c) for c in d["channels"]]
        return pr.povm_product(effects, channels)
    if kind == "partial_trace":
        return pr.partial_trace_product(superop_from_dict(d["theta"]),
                                        int(d["dim"]), int(d["dim_aux"]))
    if kind == "twirled":
        return as_stochastic_product(context_from_dict(d["context"]))
    if kind == "tensor":
        dim = int(d["dim"])
        t = (np.asarray(d["re"], dtype=float)
             + 1j * np.asarray(d["im"], dtype=float)).reshape(dim * dim, dim * dim, dim * dim)
        return pr.from_bilinear(t)
    raise ValueError(f"unknown product kind {kind!r}")


# --------------------------------------------------------------------------
# Grid states and reports
# --------------------------------------------------------------------------

def save_phase_space_state(path, state: PhaseSpaceState, representation: str = "wigner"):
    """Binary arrays plus a JSON header describing the grid and content."""
    header = json.dumps({
        "schema": 1,
        "points": state.grid.points,
        "extent": state.grid.extent,
        "representation": representation,
    })
    arrays = {"header": np.frombuffer(header.encode(), dtype=np.uint8)}
    if representation == "wigner":
        arrays["wigner"] = state.wigner
    elif representation == "char":
        arrays["char"] = state.char_fn
    else:
        raise ValueError("representation must be 'wigner' or 'char'")
    np.savez(path, **arrays)


def load_phase_space_state(path) -> PhaseSpaceState:
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        grid = PhaseSpaceGrid(int(header["points"]), float(header["extent"]))
        if header["representation"] == "wigner":
            return PhaseSpaceState(grid, data["wigner"])
        from .phasespace import state_from_char
        return state_from_char(grid, data["char"])


def canonical_json(obj) -> str:
    """Deterministic rendering: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"
