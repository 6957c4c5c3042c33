"""Complex loops on the circle and irrational rotation numbers.

A Loop is a complex-valued function on the circle R/Z held in dual form:
N uniform samples f(j/N) and the N Fourier coefficients of the
trigonometric interpolant, modes k in [-N/2, N/2).  Nonlinear operations
(products, log, winding) act on samples; shifts and derivatives act on
coefficients.  Angles are measured in turns throughout.

Rotation numbers carry their continued-fraction convergents and a crude
Diophantine estimate (delta, tau) read off the convergents; both exist
for diagnostics and small-divisor reporting, not as rigorous certificates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import AliasingSuspected, BadDescriptor, NonVanishingViolation, NonzeroWinding

DEFAULT_N = 1024
MIN_N = 8
REFINE_FACTOR = 4
NONVANISHING_TOL = 1e-12
PHASE_JUMP_LIMIT = math.pi / 2

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0
SILVER_MEAN = math.sqrt(2.0) - 1.0

ALPHA_PRESETS = {
    "golden": GOLDEN_MEAN,
    "silver": SILVER_MEAN,
}

_CONVERGENT_Q_LIMIT = 10**8
_CONVERGENT_RESIDUAL_FLOOR = 1e-14


def _as_power_of_two(n: int) -> int:
    if n < MIN_N or (n & (n - 1)) != 0:
        raise ValueError(f"loop resolution must be a power of two >= {MIN_N}, got {n}")
    return n


class Loop:
    """Band-limited complex loop: N samples plus Fourier coefficients.

    samples[j] = f(j/N); coeffs are stored in FFT order (index j holds
    mode j for j < N/2, mode j-N otherwise).  Round trip between the two
    representations is an FFT pair and is exact to ~1e-15 relative.
    """

    __slots__ = ("samples", "coeffs", "n")

    def __init__(self, samples: np.ndarray, coeffs: np.ndarray):
        self.samples = samples
        self.coeffs = coeffs
        self.n = len(samples)
        samples.setflags(write=False)
        coeffs.setflags(write=False)

    @classmethod
    def from_samples(cls, values: Sequence[complex] | np.ndarray) -> "Loop":
        arr = np.asarray(values, dtype=complex).copy()
        _as_power_of_two(len(arr))
        coeffs = np.fft.fft(arr) / len(arr)
        return cls(arr, coeffs)

    @classmethod
    def from_coeff_array(cls, coeffs: np.ndarray) -> "Loop":
        arr = np.asarray(coeffs, dtype=complex).copy()
        _as_power_of_two(len(arr))
        samples = np.fft.ifft(arr) * len(arr)
        return cls(samples, arr)

    @classmethod
    def from_modes(cls, modes: dict[int, complex], n: int = DEFAULT_N) -> "Loop":
        """Loop from a sparse {mode: coefficient} table."""
        _as_power_of_two(n)
        coeffs = np.zeros(n, dtype=complex)
        for k, c in modes.items():
            if not -n // 2 <= k < n // 2:
                raise ValueError(f"mode {k} out of range for resolution {n}")
            coeffs[k % n] = c
        return cls.from_coeff_array(coeffs)

    @classmethod
    def constant(cls, value: complex, n: int = DEFAULT_N) -> "Loop":
        return cls.from_modes({0: complex(value)}, n)

    @classmethod
    def from_function(cls, fn, n: int = DEFAULT_N) -> "Loop":
        theta = np.arange(n) / n
        return cls.from_samples(fn(theta))

    def modes(self) -> np.ndarray:
        """Integer mode numbers aligned with ``coeffs``."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)

    def coeff(self, k: int) -> complex:
        if not -self.n // 2 <= k < self.n // 2:
            return 0.0 + 0.0j
        return complex(self.coeffs[k % self.n])

    def __call__(self, theta) -> np.ndarray | complex:
        """Evaluate the trigonometric interpolant at arbitrary angles (turns)."""
        th = np.asarray(theta, dtype=float)
        scalar = th.ndim == 0
        flat = np.atleast_1d(th).ravel()
        k = self.modes()
        live = self.coeffs != 0
        nnz = int(np.count_nonzero(live))
        if nnz == 0:
            out = np.zeros(flat.shape, dtype=complex)
        elif nnz <= 32:
            # band-limited loop: direct sum over the live modes only
            out = np.exp(2j * np.pi * np.outer(flat, k[live])) @ self.coeffs[live]
        else:
            # dense spectrum: Horner in w = e^{2 pi i theta} over ascending modes
            order = np.argsort(k)
            w = np.exp(2j * np.pi * flat)
            out = np.zeros(flat.shape, dtype=complex)
            for c in self.coeffs[order][::-1]:
                out *= w
                out += c
            out *= w ** int(k[order[0]])
        out = out.reshape(np.atleast_1d(th).shape)
        return complex(out.ravel()[0]) if scalar else out

    def refined(self, factor: int = REFINE_FACTOR) -> np.ndarray:
        """Samples on a grid refined by ``factor`` (spectral zero-padding)."""
        m = self.n * factor
        padded = np.zeros(m, dtype=complex)
        k = self.modes()
        padded[k % m] = self.coeffs
        return np.fft.ifft(padded) * m

    def with_resolution(self, n: int) -> "Loop":
        """Spectrally resample to resolution n (pad or truncate modes)."""
        _as_power_of_two(n)
        if n == self.n:
            return self
        out = np.zeros(n, dtype=complex)
        keep = min(n, self.n)
        k_old = self.modes()
        mask = (k_old >= -keep // 2) & (k_old < keep // 2)
        out[k_old[mask] % n] = self.coeffs[mask]
        return Loop.from_coeff_array(out)

    def _coerce(self, other) -> tuple[np.ndarray, np.ndarray]:
        if isinstance(other, Loop):
            if other.n == self.n:
                return self.samples, other.samples
            n = max(other.n, self.n)
            return self.with_resolution(n).samples, other.with_resolution(n).samples
        return self.samples, np.full(self.n, complex(other))

    def __add__(self, other):
        a, b = self._coerce(other)
        return Loop.from_samples(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Loop.from_samples(a - b)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return Loop.from_samples(b - a)

    def __mul__(self, other):
        a, b = self._coerce(other)
        return Loop.from_samples(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._coerce(other)
        return Loop.from_samples(a / b)

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        return Loop.from_samples(b / a)

    def __neg__(self):
        return Loop.from_samples(-self.samples)

    def exp(self) -> "Loop":
        return Loop.from_samples(np.exp(self.samples))

    def conj(self) -> "Loop":
        return Loop.from_samples(np.conj(self.samples))

    def abs_max(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def abs_min(self) -> float:
        return float(np.min(np.abs(self.samples)))

    def __repr__(self):
        return f"Loop(n={self.n}, mean={self.coeff(0):.6g})"


AlphaLike = Union[float, "RotationNumber"]


def _continued_fraction(alpha: float) -> list[tuple[int, int]]:
    """Convergents p/q of alpha via exact Euclid on the binary float."""
    target = Fraction(alpha)
    a = target
    convs: list[tuple[int, int]] = []
    h0, h1 = 1, int(a)  # numerators
    k0, k1 = 0, 1       # denominators
    a -= int(a)
    while a != 0:
        a = 1 / a
        digit = int(a)
        a -= digit
        h0, h1 = h1, digit * h1 + h0
        k0, k1 = k1, digit * k1 + k0
        convs.append((h1, k1))
        residual = abs(alpha - h1 / k1)
        if k1 > _CONVERGENT_Q_LIMIT or residual < _CONVERGENT_RESIDUAL_FLOOR:
            break
    return convs


def _dioph_estimate(alpha: float, convs: Iterable[tuple[int, int]]) -> tuple[float, float]:
    """Crude (delta, tau) with |alpha - p/q| > delta / q^tau on the listed convergents."""
    tau = 2.0
    usable = []
    for p, q in convs:
        r = abs(alpha - p / q)
        if r < _CONVERGENT_RESIDUAL_FLOOR:
            continue  # exhausted double precision; excluded from the fit
        usable.append((p, q, r))
        if q >= 2:
            tau = max(tau, math.log(1.0 / (q * q * r)) / math.log(q) + 2.0)
    if not usable:
        return 0.0, tau
    delta = min(q**tau * r for _, q, r in usable)
    return 0.999 * delta, tau  # shrink keeps the bound strict at the argmin


@dataclass(frozen=True)
class RotationNumber:
    """Irrational rotation angle in turns with convergents and a Diophantine estimate."""

    alpha: float
    convergents: tuple[tuple[int, int], ...]
    dioph: tuple[float, float]

    @classmethod
    def from_float(cls, alpha: float) -> "RotationNumber":
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"rotation number must lie in (0,1), got {alpha}")
        convs = _continued_fraction(alpha)
        return cls(alpha, tuple(convs), _dioph_estimate(alpha, convs))

    @classmethod
    def golden(cls) -> "RotationNumber":
        return cls.from_float(GOLDEN_MEAN)

    @classmethod
    def named(cls, name: str) -> "RotationNumber":
        if name not in ALPHA_PRESETS:
            raise BadDescriptor(f"unknown rotation preset {name!r}")
        return cls.from_float(ALPHA_PRESETS[name])

    def __float__(self):
        return self.alpha


def as_angle(alpha: AlphaLike) -> float:
    return float(alpha)


def circle_dist(x: float, y: float) -> float:
    """Distance on R/Z."""
    d = (x - y) % 1.0
    return min(d, 1.0 - d)


def circle_mean(f: Loop) -> complex:
    """Mode-0 Fourier coefficient, i.e. the average of f over the circle."""
    return complex(f.coeffs[0])


def rotate(f: Loop, alpha: AlphaLike) -> Loop:
    """The loop theta -> f(theta + alpha), computed spectrally (exact for the interpolant)."""
    a = as_angle(alpha)
    phase = np.exp(2j * np.pi * f.modes() * a)
    return Loop.from_coeff_array(f.coeffs * phase)


def _refined_phase_steps(f: Loop, factor: int = REFINE_FACTOR):
    """Adjacent phase increments of f on the refined grid, with non-vanishing check."""
    vals = f.refined(factor)
    moduli = np.abs(vals)
    if float(moduli.min()) < NONVANISHING_TOL:
        raise NonVanishingViolation(
            f"loop modulus drops to {moduli.min():.3e} on the refined grid"
        )
    ratios = np.roll(vals, -1) / vals
    steps = np.angle(ratios)  # in (-pi, pi]
    if float(np.max(np.abs(steps))) > PHASE_JUMP_LIMIT:
        raise AliasingSuspected(
            "adjacent phase jump exceeds pi/2 on the refined grid; "
            "raise the sampling resolution"
        )
    return vals, steps


def winding_number(f: Loop) -> int:
    """Index of f around 0, by argument continuation on a 4x refined grid."""
    _, steps = _refined_phase_steps(f)
    total = float(np.sum(steps))
    w = total / (2.0 * math.pi)
    return int(math.floor(0.5 + w))


def continuous_log(f: Loop) -> Loop:
    """Continuous branch L of log f with Im L(0) in (-pi, pi].

    Requires winding zero; exp(L) reproduces f at the sample grid to
    round-off by construction.
    """
    vals, steps = _refined_phase_steps(f)
    total = float(np.sum(steps))
    w = int(math.floor(0.5 + total / (2.0 * math.pi)))
    if w != 0:
        raise NonzeroWinding(f"continuous_log requires winding 0, got {w}")
    base_arg = cmath.phase(complex(vals[0]))  # principal: pins Im L(0)
    cumulative = np.concatenate(([0.0], np.cumsum(steps[:-1])))
    phases = base_arg + cumulative
    log_vals = np.log(np.abs(vals)) + 1j * phases
    return Loop.from_samples(log_vals[::REFINE_FACTOR])
