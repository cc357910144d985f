"""Scalar system configuration shared by every module.

All powers are linear (not dB) and all rates are bits per channel use.
dB conversion happens only at the CLI boundary.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class SystemParams:
    """Transmitter/receiver configuration.

    Attributes
    ----------
    n : transmit antennas (>= 2; receiver and eavesdropper are single-antenna)
    p : total transmit power, linear (> 0)
    sigma_d2 : receiver thermal-noise power (>= 0)
    sigma_co : connection outage constraint, in [0, 1]
    eps_so : secrecy outage constraint, in (0, 1]
    b1 : feedback bits quantizing the channel direction (>= 1)
    b2 : feedback bits quantizing the channel gain (>= 0)
    delta : probability mass trimmed at each end of the gain-quantizer range
    sigma_g2 : eavesdropper channel variance; irrelevant to every closed form
               (the eavesdropper SIR is scale-free), used only by simulation
    """

    n: int
    p: float
    sigma_d2: float = 1.0
    sigma_co: float = 0.1
    eps_so: float = 0.01
    b1: int = 10
    b2: int = 0
    delta: float = 1e-4
    sigma_g2: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {self.n!r}")
        if not self.p > 0:
            raise ParameterError(f"p must be > 0, got {self.p!r}")
        if self.sigma_d2 < 0:
            raise ParameterError(f"sigma_d2 must be >= 0, got {self.sigma_d2!r}")
        if not 0.0 <= self.sigma_co <= 1.0:
            raise ParameterError(f"sigma_co must be in [0, 1], got {self.sigma_co!r}")
        if not 0.0 < self.eps_so <= 1.0:
            raise ParameterError(f"eps_so must be in (0, 1], got {self.eps_so!r}")
        if not isinstance(self.b1, int) or self.b1 < 1:
            raise ParameterError(f"b1 must be an integer >= 1, got {self.b1!r}")
        if not isinstance(self.b2, int) or self.b2 < 0:
            raise ParameterError(f"b2 must be an integer >= 0, got {self.b2!r}")
        if not self.delta > 0:
            raise ParameterError(f"delta must be > 0, got {self.delta!r}")
        if not self.sigma_g2 > 0:
            raise ParameterError(f"sigma_g2 must be > 0, got {self.sigma_g2!r}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @property
    def total_bits(self) -> int:
        return self.b1 + self.b2
