"""Tangential Fourier machinery and y-direction discrete calculus.

Fields live on a (mode, y-node) grid.  Mode ``k`` sits at ``xi = k / L_x``
in numpy FFT ordering, so axis 0 of every coefficient array follows
``numpy.fft.fftfreq``.  Coefficients approximate the continuous transform

    f_xi = integral of f(x) exp(-i x xi) dx

over the torus ``x in [-pi L_x, pi L_x)``, i.e. the forward transform carries
the quadrature weight ``dx = 2 pi L_x / n_modes``.

Products of fields are formed in physical space.  With the convention above
the transform of a product is

    (f g)_xi = (1 / 2 pi) * integral f_eta g_{xi - eta} d eta,

and on the discrete torus ``d eta = 1 / L_x``.  :func:`convolve` returns
exactly the transform of the physical product, so a raw double sum over
mode pairs carries the single factor ``1 / (2 pi L_x)``
(``Grid.conv_weight``).  All quadratic terms are dealiased with the 2/3 rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft
import scipy.linalg

from .errors import ConfigurationError

# worker count handed to scipy.fft; set from the CLI --threads flag
_FFT_WORKERS = 1


def set_workers(n: int) -> None:
    """Cap the number of threads used by the FFT backend."""
    global _FFT_WORKERS
    _FFT_WORKERS = max(1, int(n))


@dataclass(frozen=True)
class Grid:
    """Periodic x-torus times a uniform, truncated y-interval."""

    n_modes: int = 64
    L_x: float = 20.0
    n_y: int = 256
    y_max: float = 12.0

    def __post_init__(self):
        n = self.n_modes
        if n < 8 or n & (n - 1):
            raise ConfigurationError(f"n_modes must be a power of two >= 8, got {n}")
        if self.n_y < 16:
            raise ConfigurationError(f"n_y must be >= 16, got {self.n_y}")
        if self.y_max < 8:
            raise ConfigurationError(f"y_max must be >= 8, got {self.y_max}")
        if self.L_x <= 0:
            raise ConfigurationError("L_x must be positive")

    # -- tangential axis -------------------------------------------------

    @cached_property
    def k(self) -> np.ndarray:
        return np.fft.fftfreq(self.n_modes, 1.0 / self.n_modes)

    @cached_property
    def xi(self) -> np.ndarray:
        return self.k / self.L_x

    @cached_property
    def xi_odd(self) -> np.ndarray:
        """xi with the Nyquist entry zeroed, for symbols odd in xi."""
        out = self.xi.copy()
        out[self.n_modes // 2] = 0.0
        return out

    @property
    def dxi(self) -> float:
        return 1.0 / self.L_x

    @property
    def dx(self) -> float:
        return 2 * np.pi * self.L_x / self.n_modes

    @cached_property
    def x(self) -> np.ndarray:
        return -np.pi * self.L_x + self.dx * np.arange(self.n_modes)

    @property
    def k_keep(self) -> int:
        """Largest |k| retained by the 2/3 rule."""
        return (self.n_modes - 1) // 3

    @cached_property
    def keep(self) -> np.ndarray:
        return np.abs(self.k) <= self.k_keep

    @property
    def conv_weight(self) -> float:
        """Factor turning a raw sum over mode pairs into a product transform."""
        return 1.0 / (2 * np.pi * self.L_x)

    @cached_property
    def _shift(self) -> np.ndarray:
        # x_0 = -pi L_x contributes exp(i pi k) = (-1)^k to every coefficient
        return np.where(self.k.astype(int) % 2 == 0, 1.0, -1.0)

    # -- normal axis -----------------------------------------------------

    @cached_property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.y_max, self.n_y)

    @property
    def dy(self) -> float:
        return self.y_max / (self.n_y - 1)

    @cached_property
    def trap(self) -> np.ndarray:
        """Trapezoid weights on the y-grid."""
        w = np.full(self.n_y, self.dy)
        w[0] = w[-1] = 0.5 * self.dy
        return w

    def zeros(self) -> np.ndarray:
        return np.zeros((self.n_modes, self.n_y), dtype=complex)

    def zeros_surface(self) -> np.ndarray:
        return np.zeros(self.n_modes, dtype=complex)


# -- transforms ------------------------------------------------------------

def _check_rows(grid: Grid, a: np.ndarray) -> None:
    if a.shape[0] != grid.n_modes:
        raise ConfigurationError(
            f"leading dimension {a.shape[0]} does not match n_modes={grid.n_modes}")


def forward_transform(grid: Grid, samples: np.ndarray) -> np.ndarray:
    """Physical samples (x along axis 0) to Hermitian Fourier coefficients."""
    samples = np.asarray(samples, dtype=float)
    _check_rows(grid, samples)
    n = grid.n_modes
    half = scipy.fft.rfft(samples, axis=0, workers=_FFT_WORKERS)
    out = np.empty((n,) + samples.shape[1:], dtype=complex)
    out[: n // 2 + 1] = half
    # mirror so the negative modes are exact conjugates
    out[n // 2 + 1:] = np.conj(half[1: n // 2][::-1])
    shift = grid._shift.reshape((n,) + (1,) * (samples.ndim - 1))
    return out * (grid.dx * shift)


def inverse_transform(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Hermitian coefficients back to real samples.

    Only the non-negative modes are read, so the input is assumed Hermitian.
    """
    coeffs = np.asarray(coeffs)
    _check_rows(grid, coeffs)
    n = grid.n_modes
    shift = grid._shift.reshape((n,) + (1,) * (coeffs.ndim - 1))
    half = (coeffs * shift)[: n // 2 + 1] / grid.dx
    return scipy.fft.irfft(half, n=n, axis=0, workers=_FFT_WORKERS)


def hermitian_defect(f: np.ndarray) -> float:
    """max |f_{-k} - conj(f_k)| over all modes and y-nodes."""
    mirrored = np.roll(f[::-1], 1, axis=0)
    return float(np.max(np.abs(mirrored - np.conj(f)), initial=0.0))


def dealias(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Zero every mode outside the 2/3-rule band."""
    keep = grid.keep.reshape((grid.n_modes,) + (1,) * (np.ndim(f) - 1))
    return np.where(keep, f, 0.0)


# -- multipliers -----------------------------------------------------------

def symbol(grid: Grid, name: str, s: float = 0.0, tau: float = 0.0) -> np.ndarray:
    """Evaluate a Fourier symbol on the mode axis.

    ``name`` is one of ``"i_xi"``, ``"abs_xi"``, ``"i_xi_abs_xi"``,
    ``"bracket"`` (``<xi>^s``), ``"abs_pow"`` (``|xi|^s``) or ``"exp"``
    (``exp(tau |xi|)``).
    """
    xi = grid.xi
    if name == "i_xi":
        return 1j * grid.xi_odd
    if name == "abs_xi":
        return np.abs(xi)
    if name == "i_xi_abs_xi":
        return 1j * grid.xi_odd * np.abs(xi)
    if name == "bracket":
        return (1.0 + xi**2) ** (0.5 * s)
    if name == "abs_pow":
        return np.abs(xi) ** s
    if name == "exp":
        if tau < 0:
            raise ValueError("tau must be nonnegative")
        return np.exp(tau * np.abs(xi))
    raise ValueError(f"unknown symbol {name!r}")


def apply_multiplier(grid: Grid, f: np.ndarray, name: str, s: float = 0.0,
                     tau: float = 0.0) -> np.ndarray:
    m = symbol(grid, name, s=s, tau=tau)
    return f * m.reshape((grid.n_modes,) + (1,) * (np.ndim(f) - 1))


def hilbert(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Hilbert transform with symbol -i sgn(xi)."""
    m = -1j * np.sign(grid.xi_odd)
    return f * m.reshape((grid.n_modes,) + (1,) * (np.ndim(f) - 1))


# -- products --------------------------------------------------------------

def to_physical(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Dealias then return real physical samples."""
    return inverse_transform(grid, dealias(grid, f))


def from_physical(grid: Grid, samples: np.ndarray) -> np.ndarray:
    """Transform physical samples and truncate to the retained band."""
    return dealias(grid, forward_transform(grid, samples))


def convolve(grid: Grid, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Dealiased transform of the physical product of ``f`` and ``g``.

    Equal to ``grid.conv_weight * sum_m f_m g_{k-m}`` over retained modes.
    Surface spectra (1-D) broadcast against fields (2-D).
    """
    fp = to_physical(grid, f)
    gp = to_physical(grid, g)
    if fp.ndim != gp.ndim:
        if fp.ndim == 1:
            fp = fp[:, None]
        else:
            gp = gp[:, None]
    return from_physical(grid, fp * gp)


def convolve_direct(grid: Grid, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Brute-force O(N^2) convolution over retained modes (reference path)."""
    n = grid.n_modes
    kk = grid.k.astype(int)
    K = grid.k_keep
    f = dealias(grid, f)
    g = dealias(grid, g)
    shape = np.broadcast_shapes(f.shape, g.shape)
    out = np.zeros(shape, dtype=complex)
    for i in range(n):
        if abs(kk[i]) > K:
            continue
        acc = np.zeros(shape[1:], dtype=complex)
        for j in range(n):
            m = kk[j]
            rest = kk[i] - m
            if abs(m) > K or abs(rest) > K:
                continue
            acc = acc + f[j] * g[rest % n]
        out[i] = acc
    return out * grid.conv_weight


# -- y calculus ------------------------------------------------------------

def ddy(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Second-order first derivative along the last axis."""
    return np.gradient(f, grid.dy, axis=-1, edge_order=2)


def d2dy2(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Second-order second derivative along the last axis."""
    h2 = grid.dy**2
    out = np.empty_like(f)
    out[..., 1:-1] = (f[..., 2:] - 2 * f[..., 1:-1] + f[..., :-2]) / h2
    out[..., 0] = (2 * f[..., 0] - 5 * f[..., 1] + 4 * f[..., 2] - f[..., 3]) / h2
    out[..., -1] = (2 * f[..., -1] - 5 * f[..., -2] + 4 * f[..., -3] - f[..., -4]) / h2
    return out


def integrate_y(grid: Grid, f: np.ndarray, upper: str | None = None) -> np.ndarray:
    """Cumulative trapezoid integral from y=0.

    With ``upper="inf"`` the full-column value I_{y_max}[f] is returned,
    which stands in for the integral to infinity.
    """
    h = grid.dy
    if upper == "inf":
        return h * (np.sum(f, axis=-1) - 0.5 * (f[..., 0] + f[..., -1]))
    out = np.zeros_like(f)
    out[..., 1:] = np.cumsum(0.5 * h * (f[..., 1:] + f[..., :-1]), axis=-1)
    return out


def inner_y(grid: Grid, f: np.ndarray, g: np.ndarray, weight: np.ndarray | None = None):
    """Trapezoid sum of f * conj(g) * weight over y, per mode."""
    prod = f * np.conj(g)
    if weight is not None:
        prod = prod * weight
    return prod @ grid.trap


# -- compact second derivative ---------------------------------------------
#
# Fourth-order (Numerov) relation on interior nodes,
#     (L_{j-1} + 10 L_j + L_{j+1}) / 12 = (f_{j-1} - 2 f_j + f_{j+1}) / h^2,
# with L = 0 on both boundary rows.  The mass matrix is symmetric positive
# definite and shared by every mode, so one banded Cholesky factor serves
# all columns.

class CompactOperator:
    """Numerov mass matrix and the Crank-Nicolson pencil for one y-grid."""

    def __init__(self, grid: Grid, dt: float | None = None):
        self.n_int = grid.n_y - 2
        self.h2 = grid.dy**2
        self._mass = scipy.linalg.cholesky_banded(self._bands(1.0, 0.0))
        self.dt = dt
        if dt is not None:
            # (M - dt/2 D) is SPD because -D is
            self._pencil = scipy.linalg.cholesky_banded(self._bands(1.0, 0.5 * dt))

    def _bands(self, m: float, d: float) -> np.ndarray:
        """Upper banded storage of m*M - d*D on interior nodes."""
        ab = np.zeros((2, self.n_int))
        ab[0, 1:] = m / 12.0 - d / self.h2
        ab[1, :] = 10.0 * m / 12.0 + 2.0 * d / self.h2
        return ab

    @staticmethod
    def _apply(f: np.ndarray, diag: float, off: float) -> np.ndarray:
        """Tridiagonal product on the interior with zero boundary values."""
        out = diag * f[..., 1:-1]
        out += off * (f[..., :-2] + f[..., 2:])
        return out

    def mass(self, f: np.ndarray) -> np.ndarray:
        return self._apply(f, 10.0 / 12.0, 1.0 / 12.0)

    def second_difference(self, f: np.ndarray) -> np.ndarray:
        return self._apply(f, -2.0 / self.h2, 1.0 / self.h2)

    def _solve(self, factor, rhs: np.ndarray) -> np.ndarray:
        shape = rhs.shape
        flat = rhs.reshape(-1, shape[-1]).T
        sol = scipy.linalg.cho_solve_banded((factor, False), flat, check_finite=False)
        out = np.zeros(shape[:-1] + (shape[-1] + 2,), dtype=sol.dtype)
        out[..., 1:-1] = sol.T.reshape(shape)
        return out

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        """Fourth-order d2/dy2 with both boundary rows set to zero."""
        return self._solve(self._mass, self.second_difference(f))

    def cn_step(self, f: np.ndarray, forcing: np.ndarray) -> np.ndarray:
        """One Crank-Nicolson step of df/dt = Lf + forcing, Dirichlet rows zero."""
        dt = self.dt
        rhs = self.mass(f) + 0.5 * dt * self.second_difference(f)
        rhs += dt * self.mass(forcing)
        return self._solve(self._pencil, rhs)


_COMPACT_CACHE: dict = {}


def laplacian_compact(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Fourth-order compact second derivative (zero on boundary rows)."""
    key = (grid.n_y, grid.y_max)
    op = _COMPACT_CACHE.get(key)
    if op is None:
        op = _COMPACT_CACHE[key] = CompactOperator(grid)
    return op.laplacian(f)
