"""jxsim: exact output statistics of multiphoton interference on Jx lattices
fed by probabilistic pair sources, with partial distinguishability, loss, and
the mirror suppression law as an executable prediction."""

from .combinatorics import (
    ModeAssignment,
    ModeOccupation,
    Permutation,
    Transversal,
    assignment_from_occupation,
    cycle_decomposition,
    right_transversal,
    young_subgroup_order,
)
from .config import load_config, load_experiment_file
from .errors import ConfigError, JxsimError, ResourceLimitError
from .interference import (
    SCENARIOS,
    ExperimentConfig,
    OutputDistribution,
    background_fraction,
    count_suppressed_patterns,
    degree_of_violation,
    distribution_fidelity,
    hom_scan,
    is_suppressed,
    pattern_is_suppressed,
    simulate_experiment,
    transition_probability,
    twofold_distribution,
)
from .oracle import (
    OracleReport,
    classical_permanent,
    dense_overlap,
    transition_probability_full,
    validate_fast_path,
)
from .source import (
    ChannelWiring,
    InputStateRecord,
    SourceParams,
    enumerate_input_states,
    generation_probability,
    normalization_constant,
)
from .spectral import (
    ExternalDensityMatrix,
    FrequencyGrid,
    PairProductState,
    SpectralAmplitude,
    apply_delay,
    build_gaussian_jsa,
    check_symmetry,
    external_density_matrix,
    grid_for_filters,
    heralded_visibility,
    internal_overlap,
    normalization_np,
    np_from_power_sums,
    pair_exchange_visibility,
    schmidt_power_sums,
)
from .unitary import (
    LossConfig,
    check_mirror_phase_symmetry,
    extend_with_loss,
    jx_generator,
    jx_unitary,
    merge_amplitude_phase,
    mirror_phase_deviation,
    reconstruct_amplitudes,
    unitary_fidelity,
)

__version__ = "0.1.0"
