"""Fourier representation of periodic complex fields on [0, 2pi).

A field is stored by its Fourier coefficients c_n, n = -N..N, under the
convention

    v(x) = sum_{|n| <= N} c_n exp(i n x),    int_T |v|^2 dx = 2 pi sum |c_n|^2.

Nonlinear products are formed on a zero-padded uniform grid large enough
that the Galerkin truncation of the product is exact (no aliasing), and
all L^p quadratures use the same padded grids, which are exact for
trigonometric-polynomial integrands.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

TWO_PI = 2.0 * np.pi


def mode_numbers(bandwidth: int) -> np.ndarray:
    """Mode indices n = -N..N in storage order."""
    return np.arange(-bandwidth, bandwidth + 1)


@dataclass(frozen=True)
class SpectralState:
    """Immutable coefficient vector of a bandlimited periodic field.

    coeffs[j] is the coefficient of exp(i n x) with n = j - bandwidth.
    """

    bandwidth: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be >= 0")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (2 * self.bandwidth + 1,):
            raise ValueError(
                f"need {2 * self.bandwidth + 1} coefficients for bandwidth "
                f"{self.bandwidth}, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError("coefficients must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def modes(self) -> np.ndarray:
        return mode_numbers(self.bandwidth)

    def mode(self, n: int) -> complex:
        if abs(n) > self.bandwidth:
            return 0.0 + 0.0j
        return complex(self.coeffs[n + self.bandwidth])

    @classmethod
    def zeros(cls, bandwidth: int) -> "SpectralState":
        return cls(bandwidth, np.zeros(2 * bandwidth + 1, dtype=np.complex128))

    @classmethod
    def from_modes(cls, bandwidth: int, amplitudes: dict) -> "SpectralState":
        c = np.zeros(2 * bandwidth + 1, dtype=np.complex128)
        for n, a in amplitudes.items():
            if abs(n) > bandwidth:
                raise ValueError(f"mode {n} outside bandwidth {bandwidth}")
            c[n + bandwidth] = a
        return cls(bandwidth, c)

    def scaled(self, factor: complex) -> "SpectralState":
        return SpectralState(self.bandwidth, factor * self.coeffs)


@dataclass(frozen=True)
class PhysicalField:
    """Samples of a field at x_j = 2 pi j / M, j = 0..M-1."""

    grid_size: int
    samples: np.ndarray
    source_bandwidth: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape != (self.grid_size,):
            raise ValueError("samples length must equal grid_size")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)


def grid_points(grid_size: int) -> np.ndarray:
    return TWO_PI * np.arange(grid_size) / grid_size


def dealias_grid_size(bandwidth: int, degree: int = 6) -> int:
    """Smallest fast transform size with exact truncation of a product
    of `degree` factors of the given bandwidth (grid > degree * N)."""
    return next_fast_len(degree * bandwidth + 2)


def evaluate_on_grid(coeffs: np.ndarray, bandwidth: int, grid_size: int) -> np.ndarray:
    """Exact samples of sum c_n e^{inx} at x_j = 2 pi j / M.

    Vectorized over leading axes of `coeffs`.
    """
    if grid_size < 2 * bandwidth + 1:
        raise ValueError("grid too small to hold the spectrum")
    shape = coeffs.shape[:-1] + (grid_size,)
    buf = np.zeros(shape, dtype=np.complex128)
    n = mode_numbers(bandwidth)
    buf[..., n % grid_size] = coeffs
    return np.fft.ifft(buf, axis=-1) * grid_size


def coefficients_from_grid(samples: np.ndarray, target_bandwidth: int) -> np.ndarray:
    """Fourier coefficients |n| <= target from grid samples.

    Exact Galerkin truncation whenever the sampled field is a trigonometric
    polynomial of bandwidth <= (M - 1) / 2. Vectorized over leading axes.
    """
    grid_size = samples.shape[-1]
    if target_bandwidth > (grid_size - 1) // 2:
        raise ValueError(
            f"target bandwidth {target_bandwidth} not resolved by grid {grid_size}"
        )
    spec = np.fft.fft(samples, axis=-1) / grid_size
    n = mode_numbers(target_bandwidth)
    return spec[..., n % grid_size]


def to_physical(state: SpectralState, pad_factor: int = 6) -> PhysicalField:
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    m = next_fast_len(pad_factor * (2 * state.bandwidth + 1))
    vals = evaluate_on_grid(state.coeffs, state.bandwidth, m)
    return PhysicalField(m, vals, state.bandwidth)


def from_physical(field: PhysicalField, target_bandwidth: int) -> SpectralState:
    c = coefficients_from_grid(field.samples, target_bandwidth)
    return SpectralState(target_bandwidth, c)


def project(state: SpectralState, new_bandwidth: int) -> SpectralState:
    """Keep modes |n| <= new_bandwidth, returned at bandwidth new_bandwidth."""
    if new_bandwidth < 0:
        raise ValueError("bandwidth must be >= 0")
    n_keep = min(new_bandwidth, state.bandwidth)
    c = np.zeros(2 * new_bandwidth + 1, dtype=np.complex128)
    c[new_bandwidth - n_keep : new_bandwidth + n_keep + 1] = state.coeffs[
        state.bandwidth - n_keep : state.bandwidth + n_keep + 1
    ]
    return SpectralState(new_bandwidth, c)


def project_complement(state: SpectralState, bandwidth: int) -> SpectralState:
    """Zero out modes |n| <= bandwidth; keeps the original bandwidth."""
    c = state.coeffs.copy()
    n_kill = min(bandwidth, state.bandwidth)
    c[state.bandwidth - n_kill : state.bandwidth + n_kill + 1] = 0.0
    return SpectralState(state.bandwidth, c)


def derivative(state: SpectralState) -> SpectralState:
    return SpectralState(state.bandwidth, 1j * state.modes * state.coeffs)


def translate(state: SpectralState, a: float) -> SpectralState:
    """v(x) -> v(x - a), i.e. c_n -> c_n e^{-i n a}."""
    return SpectralState(state.bandwidth, state.coeffs * np.exp(-1j * state.modes * a))


def japanese_bracket(n: np.ndarray) -> np.ndarray:
    return np.sqrt(1.0 + np.asarray(n, dtype=float) ** 2)


def fl_norm(state: SpectralState, s: float, r: float) -> float:
    """Weighted-coefficient norm ( sum <n>^{s r} |c_n|^r )^{1/r}.

    <n> = (1 + n^2)^{1/2}; r = inf gives sup_n <n>^s |c_n|.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    w = japanese_bracket(state.modes) ** s
    terms = w * np.abs(state.coeffs)
    if np.isinf(r):
        return float(np.max(terms)) if terms.size else 0.0
    return float(np.sum(terms**r) ** (1.0 / r))


def l2_norm(state: SpectralState) -> float:
    return float(np.sqrt(TWO_PI * np.sum(np.abs(state.coeffs) ** 2)))


def lp_norm(state: SpectralState, p: float, pad_factor: int = 6) -> float:
    """L^p norm by padded-grid quadrature.

    Exact for even integer p up to the pad factor's degree; other p carry
    ordinary trapezoid quadrature error.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    field = to_physical(state, pad_factor)
    mean_pow = np.mean(np.abs(field.samples) ** p)
    return float((TWO_PI * mean_pow) ** (1.0 / p))


def multiply_truncated(
    factors: list[tuple[SpectralState, bool]], target_bandwidth: int
) -> SpectralState:
    """Pointwise product of factors (state, conjugate?) with exact truncation.

    The grid is sized so that folding of the full product spectrum cannot
    reach the retained band.
    """
    if not factors:
        raise ValueError("need at least one factor")
    n_max = max(st.bandwidth for st, _ in factors)
    total_band = sum(st.bandwidth for st, _ in factors)
    m = next_fast_len(total_band + target_bandwidth + 1)
    m = max(m, 2 * n_max + 1)
    prod = np.ones(m, dtype=np.complex128)
    for st, conj in factors:
        vals = evaluate_on_grid(st.coeffs, st.bandwidth, m)
        prod *= np.conj(vals) if conj else vals
    return SpectralState(target_bandwidth, coefficients_from_grid(prod, target_bandwidth))


# ---------------------------------------------------------------------------
# serialization

_BINARY_HEADER = struct.Struct("<q")  # bandwidth as little-endian int64


def state_to_json_dict(state: SpectralState) -> dict:
    return {
        "n": int(state.bandwidth),
        "re": state.coeffs.real.tolist(),
        "im": state.coeffs.imag.tolist(),
    }


def state_from_json_dict(record: dict) -> SpectralState:
    n = int(record["n"])
    c = np.asarray(record["re"], dtype=float) + 1j * np.asarray(record["im"], dtype=float)
    return SpectralState(n, c)


def save_state_json(state: SpectralState, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json_dict(state), fh)


def load_state_json(path) -> SpectralState:
    with open(path) as fh:
        return state_from_json_dict(json.load(fh))


def state_to_bytes(state: SpectralState) -> bytes:
    flat = np.empty((2 * state.bandwidth + 1, 2), dtype="<f8")
    flat[:, 0] = state.coeffs.real
    flat[:, 1] = state.coeffs.imag
    return _BINARY_HEADER.pack(state.bandwidth) + flat.tobytes()


def state_from_bytes(blob: bytes) -> SpectralState:
    (n,) = _BINARY_HEADER.unpack_from(blob, 0)
    flat = np.frombuffer(blob, dtype="<f8", offset=_BINARY_HEADER.size)
    flat = flat.reshape(2 * n + 1, 2)
    return SpectralState(int(n), flat[:, 0] + 1j * flat[:, 1])


def save_state_binary(state: SpectralState, path) -> None:
    with open(path, "wb") as fh:
        fh.write(state_to_bytes(state))


def load_state_binary(path) -> SpectralState:
    with open(path, "rb") as fh:
        return state_from_bytes(fh.read())
