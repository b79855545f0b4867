"""Analysis module initialization."""

from .bounds import (
    dominance_start,
    finite_bound,
    finite_lln_error_bound,
    jump_count_bound,
    lln_bound,
    lln_error_bound,
)
from .estimators import (
    DominanceCheck,
    McEstimate,
    MeanField,
    batch_energies,
    batch_l1,
    energy_rate_check,
    energy_rate_functional,
    feynman_kac,
    floor_to_state,
    scaled_floor,
    fluctuation,
    fluctuation_series,
    jump_count_dominance,
    lln_error,
    mean_field,
)
from .hydro import (
    HydroDecomposition,
    HydroFields,
    SCALING_FAMILIES,
    cell_quadrature,
    displacement_error,
    family_scale,
    hydro_decomposition,
    hydro_error,
    initial_energy_ratio,
    initial_hydro_error,
    weak_error,
)
from .oracle import (
    GeneratorOracle,
    OracleResult,
    default_functionals,
    generator_action,
    generator_oracle,
    named_functional,
    oracle_distribution,
    oracle_expectations,
    oracle_rate,
)
from .reports import ResultTable, config_hash, read_results

__all__ = [
    "dominance_start",
    "finite_bound",
    "finite_lln_error_bound",
    "jump_count_bound",
    "lln_bound",
    "lln_error_bound",
    "DominanceCheck",
    "McEstimate",
    "MeanField",
    "batch_energies",
    "batch_l1",
    "energy_rate_check",
    "energy_rate_functional",
    "feynman_kac",
    "floor_to_state",
    "scaled_floor",
    "fluctuation",
    "fluctuation_series",
    "jump_count_dominance",
    "lln_error",
    "mean_field",
    "HydroDecomposition",
    "HydroFields",
    "SCALING_FAMILIES",
    "cell_quadrature",
    "displacement_error",
    "family_scale",
    "hydro_decomposition",
    "hydro_error",
    "initial_energy_ratio",
    "initial_hydro_error",
    "weak_error",
    "GeneratorOracle",
    "OracleResult",
    "default_functionals",
    "generator_action",
    "generator_oracle",
    "named_functional",
    "oracle_distribution",
    "oracle_expectations",
    "oracle_rate",
    "ResultTable",
    "config_hash",
    "read_results",
]
