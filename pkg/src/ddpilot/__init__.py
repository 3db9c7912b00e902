"""Low-PAPR sequence pilots and channel estimation for delay-Doppler modulation."""

from .channel import ChannelProfile, add_awgn, apply_channel, draw_channel, sigma_sq_for_snr
from .config import ExperimentConfig, parse_config
from .errors import (
    ConfigError,
    DivisionDegenerateError,
    InvalidProfileError,
    NonPrimitivePolynomialError,
    SingularSystemError,
    UndefinedPaprError,
)
from .estimator import (
    EstimationReport,
    PathEstimate,
    build_detection_matrix,
    default_threshold,
    estimate_joint,
    estimate_pulse_channel,
    estimate_sequence_channel,
    estimate_single,
    identify_paths,
    pulse_power_detector,
)
from .frame import (
    EXAMPLE_CHANNEL,
    ChannelRealization,
    FrameConfig,
    Path,
    dump_grid,
    load_grid,
    new_grid,
    total_power,
)
from .metrics import (
    CcdfCurve,
    ErrorModelInputs,
    ccdf,
    exact_epsilon_sq,
    gram_eigenvalues,
    gram_matrix,
    nmse,
    papr_db,
    prop1_epsilon_sq,
    snr_comparison,
)
from .modem import dd_to_time, time_to_dd
from .mseq import LfsrSpec, cyclic_shift, generate_mseq, periodic_correlation, primitive_polynomials
from .pilots import (
    FrameBundle,
    boost_factor,
    build_data_only_frame,
    build_pulse_pilot_frame,
    build_sequence_pilot_frame,
    generate_qpsk_data,
    pilot_power_ratio_db,
)

__version__ = "0.1.0"
