"""Six-level hybrid Rydberg atomic RF receiver toolkit.

Simulates the driven-dissipative dynamics of a cesium six-level ladder
with a closed four-channel RF loop, validates the numerical steady state
against a closed-form reduced model, optimizes the local-oscillator
operating point by steady-state fidelity, and carries the result through
the RF-to-optical-to-electrical receiver chain into multi-channel link
rates.
"""

__version__ = "0.1.0"

from .analytic import (
    AnalyticContext,
    analytic_rho21,
    analytic_steady_state,
    rho21_from_amplitudes,
    zeta,
)
from .comms import (
    ARCH_CHANNELS,
    RABI_SET1,
    RABI_SET2,
    ArchitectureComparison,
    ChannelModel,
    EnvironmentParams,
    blackbody_psd,
    compare_architectures,
    dbm_to_watts,
    ergodic_sum_rate,
    monte_carlo_sum_rate,
    noise_variances,
    rayleigh_power_samples,
    snr,
    sum_rate,
)
from .fidelity import (
    FidelityScan,
    OperatingPointResult,
    PerturbationRegion,
    average_fidelity,
    fidelity,
    fidelity_scan,
    optimize_operating_point,
)
from .lindblad import (
    DEFAULT_DT,
    DensityMatrix,
    DriveConfig,
    Liouvillian,
    TimeDependentLiouvillian,
    Trajectory,
    basis_state,
    build_hamiltonian_general,
    build_hamiltonian_resonant,
    build_liouvillian,
    evolve,
    ground_state,
    make_generator,
    steady_state,
    steady_state_numerical,
    taylor_propagator,
    unvectorize,
    vectorize,
)
from .numerics import (
    exp_e1_scaled,
    exp_integral_e1,
    hermitian_eig,
    null_space,
    psd_sqrt,
    rk4_step,
)
from .receiver import (
    DEFAULT_CELL,
    EA0,
    DemodChannel,
    GainVector,
    RfSignalSpec,
    VaporCellParams,
    Waveform,
    gain_coefficients,
    heterodyne_rabi,
    iq_demodulate,
    linearization_discrepancy,
    photodetector_output,
    spectrogram_data,
    synthesize_pd_waveform,
    validate_heterodyne,
)
from .scheme import (
    Architecture,
    Level,
    LevelScheme,
    RfTransition,
    SchemeFileError,
    ValidationReport,
    cesium_scheme,
    channel_count,
    closed_loop_detuning,
    load_scheme,
    parse_scheme,
    validate_scheme,
)

__all__ = [
    "__version__",
    # numerics
    "exp_e1_scaled",
    "exp_integral_e1",
    "hermitian_eig",
    "null_space",
    "psd_sqrt",
    "rk4_step",
    # scheme
    "Architecture",
    "Level",
    "LevelScheme",
    "RfTransition",
    "SchemeFileError",
    "ValidationReport",
    "cesium_scheme",
    "channel_count",
    "closed_loop_detuning",
    "load_scheme",
    "parse_scheme",
    "validate_scheme",
    # lindblad
    "DEFAULT_DT",
    "DensityMatrix",
    "DriveConfig",
    "Liouvillian",
    "TimeDependentLiouvillian",
    "Trajectory",
    "basis_state",
    "build_hamiltonian_general",
    "build_hamiltonian_resonant",
    "build_liouvillian",
    "evolve",
    "ground_state",
    "make_generator",
    "steady_state",
    "steady_state_numerical",
    "taylor_propagator",
    "unvectorize",
    "vectorize",
    # analytic
    "AnalyticContext",
    "analytic_rho21",
    "analytic_steady_state",
    "rho21_from_amplitudes",
    "zeta",
    # fidelity
    "FidelityScan",
    "OperatingPointResult",
    "PerturbationRegion",
    "average_fidelity",
    "fidelity",
    "fidelity_scan",
    "optimize_operating_point",
    # receiver
    "DEFAULT_CELL",
    "EA0",
    "DemodChannel",
    "GainVector",
    "RfSignalSpec",
    "VaporCellParams",
    "Waveform",
    "gain_coefficients",
    "heterodyne_rabi",
    "iq_demodulate",
    "linearization_discrepancy",
    "photodetector_output",
    "spectrogram_data",
    "synthesize_pd_waveform",
    "validate_heterodyne",
    # comms
    "ARCH_CHANNELS",
    "RABI_SET1",
    "RABI_SET2",
    "ArchitectureComparison",
    "ChannelModel",
    "EnvironmentParams",
    "blackbody_psd",
    "compare_architectures",
    "dbm_to_watts",
    "ergodic_sum_rate",
    "monte_carlo_sum_rate",
    "noise_variances",
    "rayleigh_power_samples",
    "snr",
    "sum_rate",
]
