"""wavegraph - interacting particle systems for the wave equation on graphs.

This package simulates the integer-valued particle system whose mean solves
the first-order wave system on a weighted graph, together with the
deterministic ODE solver, Monte Carlo estimators and an experiment harness.

Key Modules:
    core: Constants, experiment configuration and the experiment runner
    graph: Graphs, fields, norms and the operator L_G
    ode: Implicit-midpoint solver and periodic reference solutions
    ips: Particle states, the event-driven engine and replica batches
    analysis: Estimators, bounds, the generator oracle and result tables
    cli: Command-line interface
    utils: Exceptions and replica parallelism

Example Usage:
    >>> from wavegraph import two_node_graph, feynman_kac
    >>> graph = two_node_graph()
    >>> u = feynman_kac(graph, {"a": 1.0, "b": 0.0}, None, ["a"], t=1.0, replicas=1000, seed=7)
    >>> u["a"].estimate
"""

__version__ = "0.1.0"

# core first: library modules import wavegraph.core.constants
from .core.constants import WaveGraphConstants
from .core.config import ExperimentConfig
from .core.experiment import ExperimentRunner
from .graph import (
    Field,
    FiniteGraph,
    Graph,
    GraphConstants,
    LatticeGraph,
    apply_operator,
    build_graph,
    inner_product,
    lattice_graph,
    load_graph,
    norm_alpha,
    norm_sq,
    ring_graph,
    two_node_graph,
    vertex_laplacian,
)
from .ode import OdeSolution, PeriodicData, dalembert, make_zeta, reconstruct_displacement, solve_at, solve_ibvp
from .ips import (
    EventRecord,
    Observer,
    ParticleState,
    RateTree,
    hydro_init,
    init_state,
    run_replicas,
    simulate,
    step,
    yule_simulate,
)
from .analysis import (
    GeneratorOracle,
    HydroFields,
    McEstimate,
    ResultTable,
    energy_rate_check,
    feynman_kac,
    finite_bound,
    fluctuation,
    generator_oracle,
    hydro_error,
    lln_bound,
    mean_field,
    oracle_expectations,
    weak_error,
)
from .cli.commands import WaveGraphCLI
from .utils.exceptions import (
    WaveGraphError,
    GraphError,
    FieldError,
    SolverError,
    SimulationError,
    EstimatorError,
    ConfigurationError,
    RoundingWarning,
)

__all__ = [
    "__version__",
    "WaveGraphConstants",
    "ExperimentConfig",
    "ExperimentRunner",
    "Field",
    "FiniteGraph",
    "Graph",
    "GraphConstants",
    "LatticeGraph",
    "apply_operator",
    "build_graph",
    "inner_product",
    "lattice_graph",
    "load_graph",
    "norm_alpha",
    "norm_sq",
    "ring_graph",
    "two_node_graph",
    "vertex_laplacian",
    "OdeSolution",
    "PeriodicData",
    "dalembert",
    "make_zeta",
    "reconstruct_displacement",
    "solve_at",
    "solve_ibvp",
    "EventRecord",
    "Observer",
    "ParticleState",
    "RateTree",
    "hydro_init",
    "init_state",
    "run_replicas",
    "simulate",
    "step",
    "yule_simulate",
    "GeneratorOracle",
    "HydroFields",
    "McEstimate",
    "ResultTable",
    "energy_rate_check",
    "feynman_kac",
    "finite_bound",
    "fluctuation",
    "generator_oracle",
    "hydro_error",
    "lln_bound",
    "mean_field",
    "oracle_expectations",
    "weak_error",
    "WaveGraphCLI",
    "WaveGraphError",
    "GraphError",
    "FieldError",
    "SolverError",
    "SimulationError",
    "EstimatorError",
    "ConfigurationError",
    "RoundingWarning",
]
