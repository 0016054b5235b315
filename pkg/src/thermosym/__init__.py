"""Pressure functions, multifractal spectra and Gibbs measures for
weighted averages on symbolic dynamics."""

from .errors import (
    DegenerateProductError,
    HorizonError,
    OracleScaleError,
    RangeError,
    ThermosymError,
    ValidationError,
)
from .gibbs import GibbsSample, InhomMarkov
from .legendre import (
    SpectrumPoint,
    biconjugate,
    binary_entropy,
    conjugate,
    mobius_spectrum,
    numeric_subderivative,
    solve_lambda_alpha,
    spectrum,
    spectrum_points,
    write_spectrum_csv,
)
from .model import (
    BINARY_VALUES,
    SPIN_VALUES,
    ConstantWeights,
    FileWeights,
    FrequencyTable,
    FrequencyWeights,
    IIDWeights,
    MoebiusWeights,
    Potential,
    SquarefreeWeights,
    SubstitutiveWeights,
    SymbolicSpace,
    WeightSequence,
    affine_xy_potential,
    binary_space,
    empirical_frequencies,
    spin_space,
    weight_at,
    xy_potential,
)
from .partition import (
    LogScaledMatrix,
    PartitionResult,
    build_transfer,
    exact_partition,
    log_partition_grid,
    log_partition_split_gap,
    transfer_block_product,
    transfer_log_partition,
)
from .pressure import (
    PressureCurve,
    ReturnWordPressure,
    closed_form_curve,
    closed_form_pressure,
    closed_form_psi_prime,
    closed_form_psi_second,
    contraction_ratio,
    estimate_pressure,
    hilbert_metric,
    lambda_grid,
    lyapunov_exponent,
    pressure_curve,
    product_of,
    projective_diameter_bound,
    return_word_curve,
    return_word_pressure,
    slope_range,
    transfer_lyapunov,
)
from .returnwords import (
    ReturnWordDecomposition,
    decompose,
    is_periodic,
    minimal_period,
    occurrences,
    return_words,
)
from .weights import (
    Substitution,
    fixed_point_prefix,
    moebius_sieve,
    primitivity_check,
    squarefree_indicator,
    thue_morse,
)

__version__ = "0.1.0"
