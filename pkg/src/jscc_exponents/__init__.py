"""Error exponent bounds for joint source-channel coding of discrete memoryless systems."""

from .bounds import (
    BoundReport,
    JsccProblem,
    Tightness,
    classify,
    expurgated_bound,
    gallager_bound,
    primal_oracle,
    random_coding_bound,
    sphere_packing_bound,
    symmetric_exact,
)
from .channel import (
    NumericalError,
    capacity,
    channel_profile,
    channel_rates,
    e0_max,
    e0_tilde,
    e_ex_zero,
    ex_max,
    expurgated_exponent,
    exponent_curves,
    r_infinity,
    random_coding_exponent,
    sphere_packing_exponent,
    symmetric_profile,
)
from .channels import (
    QuantizerConfig,
    awgn_quantized,
    bec,
    bsc,
    gallager_6x4,
    optimize_step,
    qary_symmetric,
    rayleigh_quantized,
)
from .envelope import ConcaveEnvelope, t_r, t_sp, upper_concave_envelope
from .kernels import BACKEND, use_backend
from .lossy import LossyProblem, lossy_bounds, lossy_source_exponent, rate_distortion_binary, rho_zero
from .probability import (
    UNBOUNDED,
    ChannelSpec,
    SourceSpec,
    ValidationError,
    entropy,
    is_unbounded,
    kl_divergence,
    load_problem,
    parse_problem,
    tilted_entropy,
    tilted_entropy_root,
    tilted_source,
)
from .source import gallager_source_fn, source_critical_rate, source_error_exponent, source_exponent_curve
from .tandem import beats_tandem_predicates, doubling_check, ratio_report, tandem_exponent

__version__ = "0.1.0"
