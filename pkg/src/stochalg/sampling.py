"""Seeded random generators for states, unitaries and trace class operators."""

from __future__ import annotations

import numpy as np


def rng_for(seed, *labels) -> np.random.Generator:
    """Deterministic generator derived from a seed and string labels.

    Labels are folded into the seed sequence so independent checks get
    independent streams regardless of execution order.
    """
    keys = [int.from_bytes(str(lab).encode(), "little") % (2**32) for lab in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(keys)))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state (rank-one projector)."""
    psi = complex_gaussian(rng, dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def rand_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-construction random mixed state G G* / tr(G G*)."""
    rank = dim if rank is None else rank
    g = complex_gaussian(rng, (dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def rand_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fixing."""
    q, r = np.linalg.qr(complex_gaussian(rng, (dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_operator(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Generic complex trace class operator (entries ~ CN(0,1))."""
    return complex_gaussian(rng, (dim, dim))


def rand_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = complex_gaussian(rng, (dim, dim))
    return (a + a.conj().T) / 2
