"""Frequency-domain quantum noise and resonance design for
twin-signal-recycled interferometers."""

__version__ = "0.1.0"

from .cavity import (
    CavityChain,
    DoubletResult,
    OracleSolution,
    chain_transfer,
    coupling_transmission_equal_lengths,
    coupling_transmission_ideal,
    doublet_response,
    find_doublet_peaks,
    network_oracle,
    reflection_rho23,
    solve_coupling_transmission,
)
from .config import GridSpec, RunConfig, load, parse, serialize
from .errors import (
    ConfigError,
    DegenerateFrequency,
    NoRootInBracket,
    PeaksNotFound,
    SingularSystem,
    TsrSimError,
)
from .noise import (
    AMPLITUDE_QUADRATURE,
    PHASE_QUADRATURE,
    ComparisonResult,
    DetunedSR,
    HomodyneReadout,
    InterferometerParams,
    MatchResult,
    NoiseSpectrum,
    SqueezedInput,
    TSR,
    compare_topologies,
    input_covariance,
    io_relation,
    match_peak_sensitivity,
    noise_spectral_density,
    radiation_pressure_crossover,
    strain_conversion,
    topology_chain,
)
from .optics import (
    C,
    HBAR,
    MirrorSpec,
    PropagationSegment,
    QuadratureTransfer,
    SidebandFrequency,
    mirror_scattering,
    propagation_phase,
    quadrature_rotation,
)

__all__ = [
    "__version__",
    "C",
    "HBAR",
    "AMPLITUDE_QUADRATURE",
    "PHASE_QUADRATURE",
    "MirrorSpec",
    "PropagationSegment",
    "SidebandFrequency",
    "QuadratureTransfer",
    "mirror_scattering",
    "propagation_phase",
    "quadrature_rotation",
    "CavityChain",
    "DoubletResult",
    "OracleSolution",
    "reflection_rho23",
    "chain_transfer",
    "doublet_response",
    "find_doublet_peaks",
    "solve_coupling_transmission",
    "coupling_transmission_equal_lengths",
    "coupling_transmission_ideal",
    "network_oracle",
    "InterferometerParams",
    "DetunedSR",
    "TSR",
    "SqueezedInput",
    "HomodyneReadout",
    "NoiseSpectrum",
    "ComparisonResult",
    "MatchResult",
    "topology_chain",
    "io_relation",
    "input_covariance",
    "noise_spectral_density",
    "compare_topologies",
    "match_peak_sensitivity",
    "radiation_pressure_crossover",
    "strain_conversion",
    "RunConfig",
    "GridSpec",
    "load",
    "parse",
    "serialize",
    "TsrSimError",
    "ConfigError",
    "NoRootInBracket",
    "PeaksNotFound",
    "SingularSystem",
    "DegenerateFrequency",
]
