"""Constants used throughout wavegraph.

This module contains numerical defaults, circuit breakers, environment
variable names and other static values shared by the solvers, the
particle engine and the experiment front end.
"""


class WaveGraphConstants:
    """Global constants for wavegraph configuration."""

    # Artifact identification (embedded in every result file)
    VERSION = "0.1.0"
    ARTIFACT = "wavegraph"

    # Environment configuration
    OUTPUT_DIR_ENVAR = "WAVEGRAPH_OUTPUT_DIR"
    DEBUG_ENVAR = "WAVEGRAPH_DEBUG"
    DEFAULT_OUTPUT_DIR = "wavegraph-results"

    # ODE solver
    DEFAULT_DT = 1e-3
    GMRES_TOLERANCE = 1e-12
    GMRES_MAX_ITERATIONS = 10_000
    GMRES_RESTART = 50
    GRID_TOLERANCE = 1e-9

    # Particle engine
    MAX_JUMPS = 10**9
    MAX_ABS_COUNT = 2**40
    FLOOR_TOLERANCE = 1e-9

    # Estimators
    MIN_REPLICAS = 2
    DEFAULT_SEED = 20240601
    GAUSS_POINTS = 2

    # Generator oracle
    ORACLE_STATE_CAP = 100_000
    UNIFORMIZATION_TAIL = 1e-13

    # Result files
    CONFIG_FILENAME = "config.json"
    RESULTS_FILENAME = "results.csv"
    SUMMARY_FILENAME = "summary.json"
    SNAPSHOT_FILENAME = "snapshots.csv"
    RESULT_COLUMNS = ("experiment", "n", "N", "t", "R", "seed", "estimate", "stderr", "bound")
