"""Capacity lower bounds for the nonlinear fiber channel via sequence selection."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DegenerateChannelError,
    EmptySelectionError,
    InfeasibleShapingError,
    InvalidCodewordError,
    NumericalOverflowError,
    SeqselError,
)
from .signal import (
    Constellation,
    SampledField,
    SymbolSequence,
    WdmConfig,
    demultiplex,
    gaussian_source,
    modulate,
    square_qam,
)
from .fiber import (
    FiberParams,
    LinkConfig,
    SsfmConfig,
    add_idra_noise,
    amplify_edfa,
    photon_energy,
    propagate_link,
    propagate_span,
)
from .dsp import (
    ReceiverConfig,
    cdc,
    dbp,
    matched_filter_sample,
    mean_phase_compensate,
    receive,
)
from .shaping import (
    EssCode,
    MBDistribution,
    PasSymbols,
    ess_build,
    ess_code_for_rate,
    ess_decode,
    ess_encode,
    mb_fit,
    pas_source,
)
from .selection import (
    SelectionConfig,
    SelectionResult,
    biased_probability_factor,
    screen,
    sequence_metric,
    threshold_for_rate,
)
from .air import (
    AirEstimate,
    AuxChannel,
    air_bitwise,
    air_symbolwise,
    bitwise_stderr,
    fit_aux_channel,
    selection_bound,
    symbolwise_stderr,
)
from .experiments import (
    ExperimentConfig,
    config_from_ini,
    derive_rng,
    evaluate_air,
    find_optimal_power,
    make_screening_channel,
    make_source,
    run_screening,
    run_sweep,
    write_csv,
)
