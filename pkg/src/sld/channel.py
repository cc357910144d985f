"""Complex-vector primitives: channel sampling, null-space beamforming, SINR/SIR.

The desired link sees SINR = ||h||^2 cos2 su2 / (||h||^2 (1 - cos2) sv2 + sd2),
where cos2 is the squared correlation between the true channel direction and
the beam direction; the second denominator term is artificial noise leaking
through the beamformer mismatch. The eavesdropper is evaluated at zero thermal
noise, so only its signal-to-interference ratio matters and the result is
invariant to the eavesdropper's distance (channel scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

UNIT_NORM_TOL = 1e-8


def sample_rayleigh(dim: int, variance_per_entry: float, rng: np.random.Generator) -> np.ndarray:
    """Draw a circularly-symmetric complex Gaussian vector.

    Each entry has E[|h_i|^2] = variance_per_entry (variance/2 per real part).
    """
    if not isinstance(dim, int) or dim < 1:
        raise ParameterError(f"dim must be an integer >= 1, got {dim!r}")
    if not variance_per_entry > 0:
        raise ParameterError(f"variance_per_entry must be > 0, got {variance_per_entry!r}")
    scale = math.sqrt(variance_per_entry / 2.0)
    return scale * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def sample_rayleigh_block(count: int, dim: int, variance_per_entry: float,
                          rng: np.random.Generator) -> np.ndarray:
    """(count, dim) array of independent Rayleigh channel rows."""
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count!r}")
    if not variance_per_entry > 0:
        raise ParameterError(f"variance_per_entry must be > 0, got {variance_per_entry!r}")
    scale = math.sqrt(variance_per_entry / 2.0)
    return scale * (rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim)))


def sample_directions(count: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """(count, dim) unit-norm rows, uniform on the complex hypersphere."""
    h = sample_rayleigh_block(count, dim, 1.0, rng)
    return h / np.linalg.norm(h, axis=1, keepdims=True)


@dataclass(frozen=True)
class ChannelRealization:
    """A channel vector split into gain ||h||^2 and unit direction h/||h||."""

    h: np.ndarray
    gain2: float
    direction: np.ndarray

    @classmethod
    def from_vector(cls, h: np.ndarray) -> "ChannelRealization":
        h = np.asarray(h, dtype=np.complex128)
        norm = float(np.linalg.norm(h))
        if norm == 0.0:
            raise ParameterError("zero channel vector has no direction")
        return cls(h=h, gain2=norm * norm, direction=h / norm)

    @property
    def dim(self) -> int:
        return self.h.shape[0]


def complete_null_basis(signal_dir: np.ndarray) -> np.ndarray:
    """Orthonormal N x (N-1) completion of a unit vector.

    Householder-based (QR of the single column), so the result is a
    deterministic function of the input.
    """
    v = np.asarray(signal_dir, dtype=np.complex128).reshape(-1)
    n = v.shape[0]
    if n < 2:
        raise ParameterError("signal_dir must have dimension >= 2")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_TOL:
        raise ParameterError("signal_dir must be unit-norm")
    q, _ = np.linalg.qr(v.reshape(-1, 1), mode="complete")
    return np.ascontiguousarray(q[:, 1:])


@dataclass(frozen=True)
class Beamformer:
    """Signal direction plus an orthonormal artificial-noise basis.

    sigma_u2 + (n-1) sigma_v2 = p: the power split is phi to the signal and
    (1-phi) spread evenly over the n-1 noise dimensions.
    """

    signal_dir: np.ndarray
    phi: float
    p: float
    null_basis: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if not 0.0 < self.phi <= 1.0:
            raise ParameterError(f"phi must be in (0, 1], got {self.phi!r}")
        if not self.p > 0:
            raise ParameterError(f"p must be > 0, got {self.p!r}")
        sd = np.asarray(self.signal_dir, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "signal_dir", sd)
        if self.null_basis is None:
            object.__setattr__(self, "null_basis", complete_null_basis(sd))

    @property
    def n(self) -> int:
        return self.signal_dir.shape[0]

    @property
    def sigma_u2(self) -> float:
        return self.p * self.phi

    @property
    def sigma_v2(self) -> float:
        return self.p * (1.0 - self.phi) / (self.n - 1)


@dataclass(frozen=True)
class ReceivedSample:
    """One observed symbol at the receiver plus both link qualities."""

    y_d: complex
    sinr_d: float
    sir_e: float


def sinr_desired(chan: ChannelRealization, bf: Beamformer, sigma_d2: float) -> float:
    """Receiver SINR for a given channel realization and beamformer."""
    if chan.dim != bf.n:
        raise ParameterError("channel/beamformer dimension mismatch")
    cos2 = float(np.abs(np.vdot(bf.signal_dir, chan.direction)) ** 2)
    cos2 = min(cos2, 1.0)
    return chan.gain2 * cos2 * bf.sigma_u2 / (chan.gain2 * (1.0 - cos2) * bf.sigma_v2 + sigma_d2)


def sir_eavesdropper(g: np.ndarray, bf: Beamformer) -> float:
    """Eavesdropper SIR at zero thermal noise; inf when no noise is received.

    Scale-invariant in g: the eavesdropper's distance is irrelevant.
    """
    g = np.asarray(g, dtype=np.complex128).reshape(-1)
    if g.shape[0] != bf.n:
        raise ParameterError("eavesdropper-channel/beamformer dimension mismatch")
    signal = float(np.abs(np.vdot(bf.signal_dir, g)) ** 2) * bf.sigma_u2
    leak2 = float(np.linalg.norm(bf.null_basis.conj().T @ g) ** 2)
    # Relative test: g parallel to the beam leaves only rounding residue in
    # the noise subspace, which must read as the infinite-SIR sentinel.
    if bf.sigma_v2 == 0.0 or leak2 <= 1e-24 * float(np.linalg.norm(g) ** 2):
        return math.inf
    return signal / (leak2 * bf.sigma_v2)


def sample_transmit_vector(bf: Beamformer, rng: np.random.Generator) -> np.ndarray:
    """One transmitted vector x = c*u + W*v with E[||x||^2] = p."""
    u = sample_rayleigh(1, bf.sigma_u2, rng)[0]
    x = bf.signal_dir * u
    if bf.phi < 1.0:
        v = sample_rayleigh(bf.n - 1, bf.sigma_v2, rng)
        x = x + bf.null_basis @ v
    return x


def observe(chan: ChannelRealization, g: np.ndarray, bf: Beamformer, sigma_d2: float,
            rng: np.random.Generator) -> ReceivedSample:
    """Transmit one symbol and record what both receivers see."""
    x = sample_transmit_vector(bf, rng)
    noise = sample_rayleigh(1, sigma_d2, rng)[0] if sigma_d2 > 0 else 0.0
    y_d = complex(np.vdot(chan.h, x) + noise)
    return ReceivedSample(
        y_d=y_d,
        sinr_d=sinr_desired(chan, bf, sigma_d2),
        sir_e=sir_eavesdropper(g, bf),
    )
