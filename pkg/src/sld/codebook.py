"""Channel-direction quantization codebooks and the spherical-cap error law.

A codebook is 2^b1 unit-norm complex vectors. The receiver feeds back the
index maximizing |c^H d|. For analysis, each quantization cell is modeled as
a spherical cap: the error 1 - cos2 then has CDF F(x) = 2^b1 * x^(n-1) on
[0, 2^(-b1/(n-1))], which is what every closed form downstream assumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import sample_directions
from .errors import CapacityError, ParameterError

# Largest codebook kept as explicit vectors; beyond this the cap law serves.
MAX_ENUM_BITS = 16
# Full-Gram repulsion refinement is O(4^b1) per sweep; skip it above this.
_MAX_REFINE_BITS = 10
# Repulsion anneal: (pair-weight exponent, sweeps) per stage. Low exponents
# spread the vectors globally; high exponents approach pure worst-pair
# repulsion, i.e. the min-max correlation objective itself.
_REFINE_STAGES = ((2, 150), (8, 250), (24, 350), (64, 400), (192, 400), (512, 400))
_REFINE_STEPS = (0.5, 0.3, 0.15, 0.08, 0.04, 0.02)


def _check_size(n: int, b1: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    if not isinstance(b1, int) or b1 < 1:
        raise ParameterError(f"b1 must be an integer >= 1, got {b1!r}")
    if b1 > MAX_ENUM_BITS:
        raise CapacityError(
            f"b1={b1} exceeds the explicit-enumeration bound of {MAX_ENUM_BITS} bits"
        )


@dataclass(frozen=True)
class Codebook:
    """2^b1 unit-norm rows of dimension n."""

    vectors: np.ndarray
    b1: int
    _max_corr: float = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vectors, dtype=np.complex128)
        object.__setattr__(self, "vectors", v)
        if v.ndim != 2 or v.shape[0] != 2 ** self.b1:
            raise ParameterError(
                f"codebook must hold exactly 2^{self.b1} vectors, got shape {v.shape}"
            )
        norms = np.linalg.norm(v, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ParameterError("codebook entries must be unit-norm within 1e-10")

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def max_pair_correlation(self) -> float:
        """max over distinct pairs of |c_i^H c_j|; computed lazily and cached."""
        if self._max_corr is None:
            object.__setattr__(
                self, "_max_corr", kernels.max_offdiag_correlation(self.vectors)
            )
        return self._max_corr


@dataclass(frozen=True)
class QuantizationResult:
    index: int
    cos2_theta: float


def generate_rvq(n: int, b1: int, rng: np.random.Generator) -> Codebook:
    """Entries drawn i.i.d. uniform on the unit complex hypersphere."""
    _check_size(n, b1)
    return Codebook(vectors=sample_directions(2 ** b1, n, rng), b1=b1)


def _refine(vectors: np.ndarray, sweep_scale: float) -> np.ndarray:
    """Annealed pairwise repulsion toward a min-max-correlation packing.

    Each sweep pushes every vector away from its neighbors with weights
    |<v_i, v_j>|^(2(p-1)); as p grows only the worst pairs matter, so the
    schedule anneals a smooth energy into the packing objective.
    """
    v = vectors
    for (p, base_sweeps), step in zip(_REFINE_STAGES, _REFINE_STEPS):
        for _ in range(max(20, int(round(base_sweeps * sweep_scale)))):
            gram = v @ v.conj().T
            mag2 = np.abs(gram) ** 2
            np.fill_diagonal(mag2, 0.0)
            worst = mag2.max()
            if worst <= 0.0:
                return v
            # Convex per-row focus weights keep the aggregate push bounded by
            # the worst correlation, so the decay is proportional and stable.
            focus = (mag2 / worst) ** (p - 1)
            np.fill_diagonal(focus, 0.0)
            focus /= np.maximum(focus.sum(axis=1, keepdims=True), 1e-300)
            weights = gram * focus
            np.fill_diagonal(weights, 0.0)
            v = v - step * (weights @ v)
            v = v / np.linalg.norm(v, axis=1, keepdims=True)
    return v


def generate_grassmannian(n: int, b1: int, rng: np.random.Generator,
                          iterations: int = 5, sweep_scale: float = 1.0) -> Codebook:
    """Best of `iterations` random starts, each refined by pairwise repulsion.

    Targets the min-max-correlation packing criterion. Deterministic for a
    given seed/iterations/sweep_scale. For b1 > 10 the full-Gram refinement
    is skipped (quadratic cost per sweep) and the best raw draw is returned.
    """
    _check_size(n, b1)
    if iterations < 1:
        raise ParameterError(f"iterations must be >= 1, got {iterations!r}")
    best_vectors = None
    best_corr = np.inf
    refine = b1 <= _MAX_REFINE_BITS
    for _ in range(iterations):
        v = sample_directions(2 ** b1, n, rng)
        if refine:
            v = _refine(v, sweep_scale)
        corr = kernels.max_offdiag_correlation(v)
        if corr < best_corr:
            best_corr = corr
            best_vectors = v
    return Codebook(vectors=best_vectors, b1=b1, _max_corr=best_corr)


def quantize_direction(d: np.ndarray, cb: Codebook) -> QuantizationResult:
    """Feedback index: argmax_l |c_l^H d|, ties broken by the lowest index."""
    d = np.asarray(d, dtype=np.complex128).reshape(1, -1)
    if d.shape[1] != cb.n:
        raise ParameterError("direction/codebook dimension mismatch")
    cos2, idx = kernels.best_cos2(d, cb.vectors)
    return QuantizationResult(index=int(idx[0]), cos2_theta=min(float(cos2[0]), 1.0))


def quantize_directions(directions: np.ndarray, cb: Codebook) -> np.ndarray:
    """cos2 of the selected entry for each row; the batched hot path."""
    directions = np.asarray(directions, dtype=np.complex128)
    if directions.shape[1] != cb.n:
        raise ParameterError("direction/codebook dimension mismatch")
    cos2, _ = kernels.best_cos2(directions, cb.vectors)
    return np.minimum(cos2, 1.0)


def qca_max_error(n: int, b1: int) -> float:
    """Worst quantization error 1 - cos2 under the spherical-cap model."""
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n!r}")
    if b1 < 1:
        raise ParameterError(f"b1 must be >= 1, got {b1!r}")
    return 2.0 ** (-b1 / (n - 1))


def qca_error_quantile(n: int, b1: int, u) -> float:
    """Inverse CDF of the cap-model error law: x with F(x) = u."""
    return (np.asarray(u) * 2.0 ** (-b1)) ** (1.0 / (n - 1))


def sample_qca_error(n: int, b1: int, rng: np.random.Generator, size=None):
    """Draw 1 - cos2 from the cap law; scalar when size is None."""
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n!r}")
    u = rng.random(size) if size is not None else rng.random()
    return qca_error_quantile(n, b1, u)


def save_codebook(cb: Codebook, path) -> None:
    """Text format: header line "N B1", then one row of 2N floats per vector
    (real/imaginary interleaved, 17 significant digits)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{cb.n} {cb.b1}\n")
        for row in cb.vectors:
            parts = []
            for z in row:
                parts.append(f"{z.real:.17g}")
                parts.append(f"{z.imag:.17g}")
            fh.write(" ".join(parts) + "\n")


def load_codebook(path) -> Codebook:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParameterError(f"malformed codebook header in {path!r}")
        n, b1 = int(header[0]), int(header[1])
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            values = np.array([float(tok) for tok in line.split()], dtype=np.float64)
            if values.shape[0] != 2 * n:
                raise ParameterError(f"expected {2 * n} floats per row in {path!r}")
            rows.append(values[0::2] + 1j * values[1::2])
    if len(rows) != 2 ** b1:
        raise ParameterError(f"expected 2^{b1} rows in {path!r}, found {len(rows)}")
    return Codebook(vectors=np.array(rows), b1=b1)
