"""Photoacoustic forward operator, split into a sparse time-of-flight part
and a transducer impulse-response convolution, plus a PSF-convolution
variant for widefield-microscopy-style data.

The PAT operator maps an absorber vector rho of length N to the stacked
recordings of M transducers, each T samples long, ordered transducer-major:
entry ``m * T + i`` is transducer m at time sample i. A point absorber at
distance r from a transducer contributes amplitude ``beta / (4 pi c_p) / r``
deposited at arrival time ``r / c0`` by two-tap linear interpolation, then
convolved with the time derivative of the transducer impulse response.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.fft
import scipy.signal
import scipy.sparse

from .geometry import ObjectGrid, Timebase, TransducerArray

# snap tolerance, in samples, for arrival times that should land on the grid
_SNAP = 1e-9


class ArrivalWindowError(ValueError):
    """An absorber/transducer pair whose arrival time falls outside the timebase."""

    def __init__(self, pixel: int, transducer: int, arrival_time: float, tb: Timebase):
        self.pixel = pixel
        self.transducer = transducer
        self.arrival_time = arrival_time
        super().__init__(
            f"arrival time {arrival_time:.6g} s for pixel {pixel} at transducer "
            f"{transducer} is outside the recording window "
            f"[{tb.t0:.6g}, {tb.t0 + tb.duration:.6g}] s"
        )


class OperatorGeometryError(ValueError):
    """A transducer closer to a grid point than one grid spacing (1/r blowup)."""


class MemoryBudgetError(ValueError):
    """Dense materialization would exceed the configured memory budget."""


class NyquistError(ValueError):
    """Impulse-response band extends beyond the timebase Nyquist frequency."""


@dataclass(frozen=True)
class MediumParams:
    """Acoustic/thermodynamic properties of the coupling medium.

    Defaults are water at room temperature: expansion coefficient
    2.07e-4 1/K, specific heat 4184 J/(kg K), speed of sound 1500 m/s.
    """

    beta: float = 2.07e-4
    c_p: float = 4184.0
    c0: float = 1500.0

    def __post_init__(self):
        if self.beta <= 0 or self.c_p <= 0 or self.c0 <= 0:
            raise ValueError("medium parameters must be strictly positive")

    @property
    def prefactor(self) -> float:
        """Pressure amplitude scale beta / (4 pi c_p)."""
        return self.beta / (4 * np.pi * self.c_p)


WATER = MediumParams()


@dataclass(frozen=True)
class EirModel:
    """Bandlimited transducer impulse response and its spectral derivative.

    The response is a Gaussian-windowed cosine, ``cos(2 pi f0 t) *
    exp(-t^2 / (2 sigma_t^2))`` with sigma_t chosen so the magnitude
    response has full width ``fwhm`` at half maximum. The time kernel is
    stored in wrap-around order on an FFT grid of length >= 2T - 1 with the
    peak at index 0, so convolution introduces no delay; kernel_spectrum is
    the spectrum of the kernel's time derivative (spectral differentiation).
    """

    f0: float
    fwhm: float
    timebase: Timebase
    fft_length: int
    kernel: np.ndarray
    kernel_spectrum: np.ndarray

    @property
    def sigma_t(self) -> float:
        return np.sqrt(2 * np.log(2)) / (np.pi * self.fwhm)

    def waveform(self, t) -> np.ndarray:
        """Closed-form impulse response at times t."""
        t = np.asarray(t, dtype=float)
        return np.cos(2 * np.pi * self.f0 * t) * np.exp(-(t**2) / (2 * self.sigma_t**2))

    def waveform_derivative(self, t) -> np.ndarray:
        """Closed-form time derivative of the impulse response at times t."""
        t = np.asarray(t, dtype=float)
        s2 = self.sigma_t**2
        w = 2 * np.pi * self.f0
        return (-w * np.sin(w * t) - (t / s2) * np.cos(w * t)) * np.exp(-(t**2) / (2 * s2))


def build_eir(f0: float, fwhm: float, tb: Timebase) -> EirModel:
    """Construct the impulse-response model on the timebase's FFT grid."""
    if f0 <= 0 or fwhm <= 0:
        raise ValueError(f"f0 and fwhm must be positive, got f0={f0:g}, fwhm={fwhm:g}")
    nyquist = 1.0 / (2 * tb.dt)
    if f0 + fwhm >= nyquist:
        raise NyquistError(
            f"impulse-response band f0 + fwhm = {f0 + fwhm:g} Hz reaches the "
            f"Nyquist frequency {nyquist:g} Hz of the timebase"
        )
    L = scipy.fft.next_fast_len(2 * tb.T - 1)
    offsets = np.arange(L)
    offsets = np.where(offsets > L // 2, offsets - L, offsets)
    tau = offsets * tb.dt
    sigma_t = np.sqrt(2 * np.log(2)) / (np.pi * fwhm)
    kernel = np.cos(2 * np.pi * f0 * tau) * np.exp(-(tau**2) / (2 * sigma_t**2))
    deriv = 1j * 2 * np.pi * scipy.fft.fftfreq(L, tb.dt)
    if L % 2 == 0:
        deriv[L // 2] = 0.0  # keep the derivative spectrum conjugate-symmetric
    spectrum = scipy.fft.fft(kernel) * deriv
    kernel.flags.writeable = False
    spectrum.flags.writeable = False
    return EirModel(
        f0=float(f0),
        fwhm=float(fwhm),
        timebase=tb,
        fft_length=L,
        kernel=kernel,
        kernel_spectrum=spectrum,
    )


@dataclass(frozen=True)
class SparseSignalOperator:
    """Sparse time-of-flight operator: absorbers -> raw transducer samples.

    At most two nonzeros per (transducer, pixel) pair; the pair's amplitude
    ``beta / (4 pi c_p) / r`` is split between the two samples bracketing the
    arrival time r / c0.
    """

    matrix: scipy.sparse.csr_matrix
    grid: ObjectGrid
    array: TransducerArray
    timebase: Timebase
    medium: MediumParams

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_sparse_signal_operator(
    grid: ObjectGrid,
    array: TransducerArray,
    tb: Timebase,
    medium: MediumParams = WATER,
) -> SparseSignalOperator:
    """Assemble the sparse time-of-flight operator for one imaging setup."""
    N = grid.n_points
    M = array.n_transducers
    T = tb.T
    min_dist = min(grid.spacing_x, grid.spacing_y)
    prefactor = medium.prefactor

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    pixels = np.arange(N)
    for m in range(M):
        d = np.linalg.norm(grid.points - array.positions[m], axis=1)
        if d.min() < min_dist:
            n_bad = int(d.argmin())
            raise OperatorGeometryError(
                f"pixel {n_bad} is {d[n_bad]:.3g} m from transducer {m}, closer than "
                f"one grid spacing ({min_dist:.3g} m)"
            )
        f = (d / medium.c0 - tb.t0) / tb.dt
        if f.min() < -_SNAP or f.max() > T - 1 + _SNAP:
            n_bad = int(f.argmin()) if f.min() < -_SNAP else int(f.argmax())
            raise ArrivalWindowError(n_bad, m, d[n_bad] / medium.c0, tb)
        nearest = np.rint(f)
        on_grid = np.abs(f - nearest) <= _SNAP
        i0 = np.where(on_grid, nearest, np.floor(f)).astype(np.int64)
        w = np.where(on_grid, 0.0, f - i0)
        amp = prefactor / d

        rows.append(m * T + i0)
        cols.append(pixels)
        vals.append(amp * (1.0 - w))
        two_tap = w > 0.0
        rows.append(m * T + i0[two_tap] + 1)
        cols.append(pixels[two_tap])
        vals.append(amp[two_tap] * w[two_tap])

    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(T * M, N),
    ).tocsr()
    return SparseSignalOperator(matrix=matrix, grid=grid, array=array, timebase=tb, medium=medium)


@dataclass
class ForwardOperator:
    """Either the split PAT operator or a PSF-convolution operator.

    ``dense_cache`` is populated by :func:`materialize_dense`; once set, the
    operator is treated as immutable.
    """

    kind: str  # "pat" | "microscopy"
    grid: ObjectGrid
    signal_op: Optional[SparseSignalOperator] = None
    eir: Optional[EirModel] = None
    psf: Optional[np.ndarray] = None
    dense_cache: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        if self.kind == "pat":
            return self.signal_op.shape
        return (self.grid.n_points, self.grid.n_points)


def pat_operator(signal_op: SparseSignalOperator, eir: EirModel) -> ForwardOperator:
    """Compose the sparse time-of-flight part with the impulse-response derivative."""
    if eir.timebase != signal_op.timebase:
        raise ValueError("signal operator and impulse response use different timebases")
    return ForwardOperator(kind="pat", grid=signal_op.grid, signal_op=signal_op, eir=eir)


def build_microscopy_operator(h: np.ndarray, grid: ObjectGrid) -> ForwardOperator:
    """Widefield variant: the recording is the 2D convolution h * rho.

    Zero boundary handling; the kernel anchor is its center element
    ``(kh // 2, kw // 2)``.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2:
        raise ValueError(f"PSF kernel must be 2D, got {h.ndim}D")
    if not np.isrealobj(h) or not np.all(np.isfinite(h)):
        raise ValueError("PSF kernel must be real and finite")
    if h.shape[0] >= grid.n_y or h.shape[1] >= grid.n_x:
        raise ValueError(
            f"PSF kernel {h.shape} must be smaller than the grid ({grid.n_y}, {grid.n_x})"
        )
    return ForwardOperator(kind="microscopy", grid=grid, psf=h.copy())


def _convolve_blocks(blocks: np.ndarray, eir: EirModel) -> np.ndarray:
    """Convolve per-transducer sample blocks (M, T, ...) with the EIR derivative."""
    T = eir.timebase.T
    spec = eir.kernel_spectrum.reshape((1, eir.fft_length) + (1,) * (blocks.ndim - 2))
    out = scipy.fft.ifft(scipy.fft.fft(blocks, n=eir.fft_length, axis=1) * spec, axis=1)
    return out[:, :T].real


def apply_forward(op: ForwardOperator, rho: np.ndarray) -> np.ndarray:
    """Apply the forward operator to an absorber vector."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (op.grid.n_points,):
        raise ValueError(
            f"absorber vector has shape {rho.shape}, expected ({op.grid.n_points},)"
        )
    if op.kind == "pat":
        M = op.signal_op.array.n_transducers
        T = op.signal_op.timebase.T
        raw = (op.signal_op.matrix @ rho).reshape(M, T)
        return _convolve_blocks(raw, op.eir).ravel()
    if op.kind == "microscopy":
        img = rho.reshape(op.grid.n_y, op.grid.n_x)
        kh, kw = op.psf.shape
        full = scipy.signal.convolve2d(img, op.psf, mode="full", boundary="fill")
        return full[kh // 2 : kh // 2 + op.grid.n_y, kw // 2 : kw // 2 + op.grid.n_x].ravel()
    raise ValueError(f"unknown operator kind: {op.kind!r}")


def materialize_dense(
    op: ForwardOperator,
    max_bytes: int = 2 * 1024**3,
    work_bytes: int = 128 * 1024**2,
) -> np.ndarray:
    """Dense matrix of the operator; column j is the response to basis vector j.

    The result is cached on ``op.dense_cache``. PAT columns are produced in
    blocks sized to ``work_bytes`` of FFT workspace.
    """
    if op.dense_cache is not None:
        return op.dense_cache
    rows, cols = op.shape
    needed = rows * cols * 8
    if needed > max_bytes:
        raise MemoryBudgetError(
            f"dense operator needs {needed} bytes ({rows} x {cols}), budget is {max_bytes}"
        )
    if op.kind == "pat":
        M = op.signal_op.array.n_transducers
        T = op.signal_op.timebase.T
        L = op.eir.fft_length
        dense = np.empty((rows, cols))
        block = max(1, int(work_bytes // (M * L * 16)))
        for j0 in range(0, cols, block):
            j1 = min(cols, j0 + block)
            raw = np.asarray(op.signal_op.matrix[:, j0:j1].todense()).reshape(M, T, j1 - j0)
            dense[:, j0:j1] = _convolve_blocks(raw, op.eir).reshape(rows, j1 - j0)
    else:
        dense = np.empty((rows, cols))
        basis = np.zeros(cols)
        for j in range(cols):
            basis[j] = 1.0
            dense[:, j] = apply_forward(op, basis)
            basis[j] = 0.0
    op.dense_cache = dense
    return dense


def spherical_pulse(t, distance: float, radius: float, c0: float) -> np.ndarray:
    """N-shaped pressure transient of a uniform sphere seen at a given distance.

    Comparison signal only: it is the bipolar linear ramp
    ``(distance - c0 t) / (2 distance)`` supported on
    ``|distance - c0 t| <= radius``, the classic far-field response of a
    spherical expansion function.
    """
    t = np.asarray(t, dtype=float)
    u = distance - c0 * t
    return np.where(np.abs(u) <= radius, u / (2 * distance), 0.0)
