"""Spectral analysis of finite-dimensional quantum evolutions.

Quantum channels and GKLS generators, their spectra and asymptotic
structure: steady and asymptotic state counts, the sharp universal ceiling
d^2 - 2d + 2 on both, the constructions that saturate it, and the CKKS
relaxation-rate inequalities on sampled ensembles.
"""

from .analysis import AnalysisReport, analyze_channel, analyze_generator
from .asymptotics import (
    FaithfulReduction,
    SubspaceBasis,
    attractor,
    faithful_reduce,
    fixed_space,
    kernel,
    peripheral_projection,
    steady_states,
)
from .bounds import (
    BoundReport,
    check_channel_bounds,
    check_generator_bounds,
    ckks_channel,
    ckks_derived_bounds,
    ckks_generator,
    classify_channel,
    classify_generator,
    structural_ceiling,
)
from .commutants import (
    CommutantResult,
    JordanProfile,
    commutant,
    commutant_dim_from_jordan,
    weyr_profile,
)
from .constructions import (
    SamplerConfig,
    phase_damping_channel,
    sample,
    saturating_dissipative_generator,
    saturating_hamiltonian_generator,
    saturating_unitary_channel,
)
from .gkls import (
    GklsGenerator,
    build_generator,
    exponentiate,
    is_hamiltonian,
    relaxation_rates,
)
from .spectra import SpectralSummary, cluster, summarize_channel, summarize_generator
from .superop import (
    QuantumChannel,
    ValidationError,
    choi_is_cp,
    compose,
    dual,
    from_kraus,
    from_superop,
    is_unitary_channel,
    power,
    to_choi,
    to_superop,
)

__version__ = "0.1.0"
