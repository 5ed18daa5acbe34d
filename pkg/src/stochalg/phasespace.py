"""Single-mode phase-space states: Wigner functions, characteristic functions,
quantum convolution by both defining routes, and Gaussian closed forms.

Conventions (hbar = 1): the vacuum Wigner function is (1/pi) exp(-(q^2+p^2)),
i.e. a Gaussian with covariance I/2. The characteristic function is the
symplectic Fourier transform

    chi(u, v) = integral W(x, y) exp(i (u y - v x)) dx dy,

sampled on the FFT-conjugate grid (spacing pi/L for a position grid of extent
[-L, L)). Products of characteristic functions realize the quantum
convolution; the same operation in the Wigner domain is the double
convolution W_rho * flip(W_T) * W_sigma, giving two independent routes that
the tests cross-validate.

FFT convolution is circular, so inputs whose mass touches the grid border are
rejected with a diagnostic rather than silently wrapped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import eval_laguerre


class GridSupportError(ValueError):
    """State support reaches the grid border; convolution would wrap."""


@dataclass(frozen=True)
class PhaseSpaceGrid:
    points: int
    extent: float           # position grid covers [-extent, extent)

    def __post_init__(self):
        n = self.points
        if n < 4 or n & (n - 1):
            raise ValueError("points_per_axis must be a power of two >= 4")
        if self.extent <= 0:
            raise ValueError("extent must be positive")

    @property
    def dx(self) -> float:
        return 2 * self.extent / self.points

    @property
    def dk(self) -> float:
        return np.pi / self.extent

    @property
    def freq_extent(self) -> float:
        return np.pi * self.points / (2 * self.extent)

    def axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.dx

    def freq_axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.dk

    def mesh(self):
        x = self.axis()
        return np.meshgrid(x, x, indexing="ij")

    def freq_mesh(self):
        u = self.freq_axis()
        return np.meshgrid(u, u, indexing="ij")


def _cfft(f: np.ndarray, axis: int) -> np.ndarray:
    """Centered DFT: sum_j f_j exp(-2 pi i (k - n/2)(j - n/2) / n)."""
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(f, axes=axis), axis=axis), axes=axis)


def _cifft(f: np.ndarray, axis: int) -> np.ndarray:
    """Centered inverse-sign DFT (unnormalized): sum_j f_j exp(+...)."""
    n = f.shape[axis]
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(f, axes=axis), axis=axis),
                           axes=axis) * n


def symplectic_fourier(grid: PhaseSpaceGrid, arr,
                       direction: str = "forward") -> np.ndarray:
    """chi(u, v) = sum W(x, y) e^{i(u y - v x)} dx^2, or its inverse.

    `arr` may be a raw array or a PhaseSpaceState (whose Wigner array is
    taken). The forward output lives on the frequency grid; `inverse` maps a
    characteristic-function array back to the position grid, with the
    1/(2 pi)^2 inversion factor.
    """
    if isinstance(arr, PhaseSpaceState):
        arr = arr.wigner
    arr = np.asarray(arr, dtype=complex)
    if direction == "forward":
        out = _cifft(arr, axis=1)       # e^{+i u y} over the y axis
        out = _cfft(out, axis=0)        # e^{-i v x} over the x axis
        return out.T * grid.dx ** 2     # index order (u, v)
    if direction == "inverse":
        out = _cfft(arr, axis=0)        # e^{-i u y} over the u axis -> y
        out = _cifft(out, axis=1)       # e^{+i v x} over the v axis -> x
        return out.T * grid.dk ** 2 / (4 * np.pi ** 2)
    raise ValueError("direction must be 'forward' or 'inverse'")


class PhaseSpaceState:
    """A state on a grid, held as a Wigner array with a cached char function."""

    def __init__(self, grid: PhaseSpaceGrid, wigner: np.ndarray,
                 char_fn: np.ndarray | None = None, check: bool = True):
        wigner = np.asarray(wigner)
        if wigner.shape != (grid.points, grid.points):
            raise ValueError("wigner array does not match the grid")
        self.grid = grid
        self.wigner = np.real_if_close(wigner, tol=1e6).real \
            if np.iscomplexobj(wigner) else wigner
        self._char = char_fn
        if check:
            mass = self.wigner.sum() * grid.dx ** 2
            if abs(mass - 1.0) > 1e-6:
                raise ValueError(f"Wigner function integrates to {mass}, not 1")

    @property
    def char_fn(self) -> np.ndarray:
        if self._char is None:
            self._char = symplectic_fourier(self.grid, self.wigner, "forward")
        return self._char

    def norm_mass(self) -> float:
        return float(self.wigner.sum() * self.grid.dx ** 2)


def state_from_wigner(grid: PhaseSpaceGrid, wigner: np.ndarray) -> PhaseSpaceState:
    return PhaseSpaceState(grid, wigner)


def state_from_char(grid: PhaseSpaceGrid, char_fn: np.ndarray) -> PhaseSpaceState:
    w = symplectic_fourier(grid, char_fn, "inverse")
    return PhaseSpaceState(grid, w.real, char_fn=np.asarray(char_fn, dtype=complex))


def check_support(state: PhaseSpaceState, border: int = 2, frac: float = 1e-9) -> None:
    """Reject states whose border band carries a non-negligible |W| fraction."""
    w = np.abs(state.wigner)
    total = w.sum()
    edge = w[:border, :].sum() + w[-border:, :].sum() \
        + w[:, :border].sum() + w[:, -border:].sum()
    if total == 0 or edge / total > frac:
        raise GridSupportError(
            f"border mass fraction {edge / total:.2e} exceeds {frac:.0e}; "
            "enlarge the grid extent (supports must sit 6 sigma inside)")


def convolve_arrays(grid: PhaseSpaceGrid, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Linear convolution (f * g)(z) = sum f(x) g(z - x) dx^2 on the centered grid."""
    n = grid.points
    full = fftconvolve(f, g, mode="full")
    return full[n // 2:n // 2 + n, n // 2:n // 2 + n] * grid.dx ** 2


def flip_centered(arr: np.ndarray) -> np.ndarray:
    """x -> -x on a centered even grid (the j=0 row/col wraps to itself)."""
    return np.roll(arr[::-1, ::-1], 1, axis=(0, 1))


# --------------------------------------------------------------------------
# Quantum convolution, both routes
# --------------------------------------------------------------------------

def _common_grid(*states: PhaseSpaceState) -> PhaseSpaceGrid:
    grid = states[0].grid
    for s in states[1:]:
        if s.grid != grid:
            raise ValueError("states live on different grids")
    return grid


def quantum_convolution_char(rho: PhaseSpaceState, fid: PhaseSpaceState,
                             sigma: PhaseSpaceState,
                             prob_char: np.ndarray | None = None) -> PhaseSpaceState:
    """Product state via chi_out = chi_prob . chi_rho . conj(chi_fid) . chi_sigma."""
    grid = _common_grid(rho, fid, sigma)
    for s in (rho, fid, sigma):
        check_support(s)
    chi = rho.char_fn * fid.char_fn.conj() * sigma.char_fn
    if prob_char is not None:
        prob_char = np.asarray(prob_char, dtype=complex)
        c = grid.points // 2
        if abs(prob_char[c, c] - 1.0) > 1e-8:
            raise ValueError("prob_char is not a classical characteristic function (chi(0) != 1)")
        chi = chi * prob_char
    return state_from_char(grid, chi)


def quantum_convolution_wigner(rho: PhaseSpaceState, fid: PhaseSpaceState,
                               sigma: PhaseSpaceState,
                               prob_density: np.ndarray | None = None) -> PhaseSpaceState:
    """Product state via W_out = (W_rho * flip(W_fid)) * W_sigma (FFT convolution)."""
    grid = _common_grid(rho, fid, sigma)
    for s in (rho, fid, sigma):
        check_support(s)
    inner = convolve_arrays(grid, rho.wigner, flip_centered(fid.wigner))
    out = convolve_arrays(grid, inner, sigma.wigner)
    if prob_density is not None:
        out = convolve_arrays(grid, out, np.asarray(prob_density, dtype=float))
    return PhaseSpaceState(grid, out)


def pair_distribution(rho: PhaseSpaceState, fid: PhaseSpaceState) -> np.ndarray:
    """(W_rho * flip(W_fid))(g): the outcome density of the covariant observable."""
    grid = _common_grid(rho, fid)
    check_support(rho)
    check_support(fid)
    return convolve_arrays(grid, rho.wigner, flip_centered(fid.wigner))


def husimi_kano(rho: PhaseSpaceState,
                fid_vacuum: "GaussianState | None" = None) -> np.ndarray:
    """Gaussian smoothing (1/pi) integral W(x') exp(-|x - x'|^2) dx'.

    The smoothing kernel is the (flipped) Wigner function of the fiducial
    Gaussian, the vacuum by default, so this is the pair distribution against
    that fiducial: a nonnegative probability density.
    """
    grid = rho.grid
    check_support(rho)
    gs = vacuum_gaussian() if fid_vacuum is None else fid_vacuum
    flipped = GaussianState(-gs.mean, gs.cov)
    return convolve_arrays(grid, rho.wigner, gaussian_wigner(grid, flipped).wigner)


# --------------------------------------------------------------------------
# Gaussian closed forms
# --------------------------------------------------------------------------

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float))
        if self.mean.shape != (2,) or self.cov.shape != (2, 2):
            raise ValueError("mean must be a 2-vector and cov a 2x2 matrix")
        if np.max(np.abs(self.cov - self.cov.T)) > 1e-12:
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(self.cov).min() < -1e-12:
            raise ValueError("covariance must be positive semidefinite")

    def is_admissible(self, tol: float = 1e-9) -> bool:
        """Quantum uncertainty: cov + (i/2) Omega >= 0."""
        m = self.cov.astype(complex) + 0.5j * OMEGA
        return bool(np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= -tol)


def vacuum_gaussian() -> GaussianState:
    return GaussianState(np.zeros(2), np.eye(2) / 2)


def gaussian_wigner(grid: PhaseSpaceGrid, gs: GaussianState) -> PhaseSpaceState:
    qq, pp = grid.mesh()
    dq, dp = qq - gs.mean[0], pp - gs.mean[1]
    prec = np.linalg.inv(gs.cov)
    quad = prec[0, 0] * dq ** 2 + 2 * prec[0, 1] * dq * dp + prec[1, 1] * dp ** 2
    w = np.exp(-quad / 2) / (2 * np.pi * np.sqrt(np.linalg.det(gs.cov)))
    return PhaseSpaceState(grid, w)


def gaussian_char(grid: PhaseSpaceGrid, gs: GaussianState) -> np.ndarray:
    """chi(u,v) = exp(i(u m_p - v m_q) - (cov_pp u^2 - 2 cov_qp u v + cov_qq v^2)/2)."""
    uu, vv = grid.freq_mesh()
    phase = uu * gs.mean[1] - vv * gs.mean[0]
    quad = (gs.cov[1, 1] * uu ** 2 - 2 * gs.cov[0, 1] * uu * vv + gs.cov[0, 0] * vv ** 2)
    return np.exp(1j * phase - quad / 2)


def gaussian_oracle(rho: GaussianState, fid: GaussianState, sigma: GaussianState,
                    prob: GaussianState | None = None) -> GaussianState:
    """Closed-form product Gaussian: means combine as rho - fid + sigma (+ prob),
    covariances add. The output of admissible inputs is asserted admissible."""
    mean = rho.mean - fid.mean + sigma.mean
    cov = rho.cov + fid.cov + sigma.cov
    if prob is not None:
        mean = mean + prob.mean
        cov = cov + prob.cov
    out = GaussianState(mean, cov)
    if rho.is_admissible() and fid.is_admissible() and sigma.is_admissible() \
            and not out.is_admissible():
        raise AssertionError("admissible inputs produced an inadmissible output")
    return out


def fock_wigner(grid: PhaseSpaceGrid, n: int) -> PhaseSpaceState:
    """Wigner function of the n-th number state, ((-1)^n/pi) L_n(2 r^2) e^{-r^2}."""
    if not 0 <= n <= 4:
        raise ValueError("number states are provided for n <= 4")
    qq, pp = grid.mesh()
    r2 = qq ** 2 + pp ** 2
    w = ((-1) ** n / np.pi) * eval_laguerre(n, 2 * r2) * np.exp(-r2)
    return PhaseSpaceState(grid, w)


def grid_moments(grid: PhaseSpaceGrid, w: np.ndarray):
    """(mean, cov) of a quasi-density on the grid (normalized by its mass)."""
    qq, pp = grid.mesh()
    mass = w.sum()
    mq = (w * qq).sum() / mass
    mp = (w * pp).sum() / mass
    dq, dp = qq - mq, pp - mp
    cov = np.array([
        [(w * dq * dq).sum(), (w * dq * dp).sum()],
        [(w * dp * dq).sum(), (w * dp * dp).sum()],
    ]) / mass
    return np.array([mq, mp]), cov


def marginal(grid: PhaseSpaceGrid, w: np.ndarray, axis: int = 1) -> np.ndarray:
    """Integrate out one axis; axis=1 gives the position marginal."""
    return w.sum(axis=axis) * grid.dx
