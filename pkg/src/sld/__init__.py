"""Secure multi-antenna transmission with limited feedback.

Artificial-noise beamforming toward a single-antenna receiver that feeds
back quantized channel direction (b1 bits) and gain (b2 bits): closed-form
outage probabilities, the throughput-optimal rate/power design, gain
quantizers and feedback-bit allocation, and Monte Carlo verification of
every closed form.
"""

from .channel import (
    Beamformer,
    ChannelRealization,
    ReceivedSample,
    complete_null_basis,
    sample_rayleigh,
    sinr_desired,
    sir_eavesdropper,
)
from .codebook import (
    Codebook,
    QuantizationResult,
    generate_grassmannian,
    generate_rvq,
    load_codebook,
    qca_max_error,
    quantize_direction,
    sample_qca_error,
    save_codebook,
)
from .design import (
    RateDesign,
    design_closed_form,
    design_numeric,
    design_perfect_csi,
    rs_star_curve,
)
from .errors import CapacityError, FeasibilityError, ParameterError
from .montecarlo import (
    EstimateWithError,
    SimConfig,
    empirical_pco,
    empirical_pso,
    empirical_rs_star,
    empirical_secrecy_capacity_bound,
    empirical_throughput,
)
from .outage import (
    FeasibilityReport,
    b1_min,
    feasibility_report,
    mu_min,
    pco_qca,
    pso,
    rb_max,
    re_min,
)
from .params import SystemParams
from .throughput import (
    CgiQuantizer,
    ThroughputResult,
    bits_for_fraction,
    build_equalized_quantizer,
    build_one_bit_quantizer,
    gamma_reg_upper,
    gamma_reg_upper_inv,
    sweep_bit_allocation,
    throughput_asymptote,
    throughput_exact_cgi,
    throughput_quantized_cgi,
)

__version__ = "0.1.0"
