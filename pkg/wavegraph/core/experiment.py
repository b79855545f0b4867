"""Experiment runner for wavegraph.

This module turns a resolved :class:`ExperimentConfig` into result files:
it creates the run directory, saves the resolved configuration, dispatches
to the estimator for the experiment kind and writes ``results.csv`` and
``summary.json``.
"""

import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .config import ExperimentConfig, node_mapping
from .constants import WaveGraphConstants
from ..analysis.estimators import (
    McEstimate,
    energy_rate_check,
    feynman_kac,
    fluctuation_series,
    jump_count_dominance,
    lln_error,
    mean_field,
    scaled_floor,
)
from ..analysis.bounds import finite_bound, lln_bound
from ..analysis.hydro import (
    displacement_error,
    family_scale,
    hydro_decomposition,
    hydro_error,
    initial_energy_ratio,
    weak_error,
)
from ..analysis.oracle import (
    default_functionals,
    generator_oracle,
    named_functional,
    oracle_expectations,
    oracle_rate,
)
from ..analysis.reports import ResultTable
from ..graph.fields import as_arrays
from ..graph.graph import Graph, resolve_node_id, ring_graph
from ..graph.operators import norm_sq
from ..ips.replicas import run_replicas
from ..ips.state import ParticleState
from ..ips.yule import yule_counts, yule_mean
from ..ode.solver import periodic_zeta, reconstruct_displacement, solve_at, solve_ibvp
from ..utils.exceptions import ConfigurationError


class ExperimentRunner:
    """Manages the lifecycle of one experiment run.

    The run directory is ``<output_dir>/<name>``; without an explicit name
    it is ``<kind>-<config hash prefix>``, so re-running a configuration
    overwrites its own results and nothing depends on the wall clock.
    """

    def __init__(self, config: ExperimentConfig, verbose: bool = False):
        """Initialize the runner.

        Args:
            config: Resolved and validated configuration
            verbose: Print progress lines
        """
        self.config = config
        self.verbose = verbose
        self.run_dir = config.output_dir / config.run_name
        self.table: Optional[ResultTable] = None
        self._dispatch: Dict[str, Callable[[ResultTable], None]] = {
            "solve": self._run_solve,
            "fk": self._run_fk,
            "meanfield": self._run_meanfield,
            "fluct": self._run_fluct,
            "rate": self._run_rate,
            "hydro": self._run_hydro,
            "phase": self._run_phase,
            "yule": self._run_yule,
            "oracle": self._run_oracle,
            "lln": self._run_lln,
        }

    @property
    def results_path(self) -> Path:
        return self.run_dir / WaveGraphConstants.RESULTS_FILENAME

    @property
    def summary_path(self) -> Path:
        return self.run_dir / WaveGraphConstants.SUMMARY_FILENAME

    def run(self) -> ResultTable:
        """Execute the experiment and write its result files.

        Returns:
            The filled result table

        Raises:
            ConfigurationError: If the run directory cannot be created
            WaveGraphError: Any estimator, solver or simulation failure
        """
        cfg = self.config
        try:
            self.run_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigurationError(f"Cannot create run directory {self.run_dir}: {e}")
        cfg.save(self.run_dir / WaveGraphConstants.CONFIG_FILENAME)

        if self.verbose:
            print(f"Running {cfg.kind}: seed={cfg.seed} workers={cfg.workers}")
        table = ResultTable(cfg.kind, cfg.digest(), cfg.seed)
        self._dispatch[cfg.kind](table)
        table.write_csv(self.results_path)
        table.write_summary(self.summary_path)
        self.table = table
        if self.verbose:
            print(f"Results written to {self.results_path}")
        return table

    def _log(self, message: str) -> None:
        if self.verbose:
            print(message)

    # Shared setup ------------------------------------------------------------

    def _graph_and_state(self) -> Tuple[Graph, ParticleState]:
        initial = self.config["initial"]
        if isinstance(initial, dict) and "hydro" in initial:
            state = self.config.initial_state(None)
            return state.graph, state
        graph = self.config.build_graph()
        return graph, self.config.initial_state(graph)

    def _ring_scale(self) -> Tuple[Optional[int], Optional[int]]:
        initial = self.config.get("initial")
        if isinstance(initial, dict) and "hydro" in initial:
            return int(initial["hydro"]["n"]), int(initial["hydro"]["N"])
        return None, None

    def _times(self) -> List[float]:
        cfg = self.config
        times = cfg.get("times")
        if times is None:
            times = [cfg["t"]]
        return sorted(float(t) for t in times)

    @property
    def _dt(self) -> float:
        return float(self.config.get("dt", WaveGraphConstants.DEFAULT_DT))

    # Experiment kinds --------------------------------------------------------

    def _run_solve(self, table: ResultTable) -> None:
        cfg = self.config
        graph = cfg.build_graph()
        zeta = cfg.initial_data(graph)
        T = float(cfg["T"])
        solution = solve_ibvp(graph, zeta, T, self._dt)
        solution.write_csv(self.run_dir / WaveGraphConstants.SNAPSHOT_FILENAME, every=int(cfg.get("every", 1)))
        self._log(f"Solved to T={T} in {len(solution.times) - 1} steps ({solution.iterations} GMRES iterations)")

        energies = solution.energies()
        report_times = [float(t) for t in cfg.get("times", [T])]
        late = [t for t in report_times if t > T]
        if late:
            raise ConfigurationError(f"Report time {late[0]} is beyond T={T}", {"key": "times"})
        for t, field in zip(report_times, solve_at(graph, zeta, report_times, self._dt)):
            table.add("energy", t, norm_sq(field))
        drift = float(np.max(np.abs(energies - energies[0])) / energies[0]) if energies[0] > 0 else 0.0
        table.note("energy_drift", drift)
        table.note("gmres_iterations", solution.iterations)

        if "phi" in cfg.values:
            phi = node_mapping(graph, cfg["phi"])
        else:
            phi = cfg.periodic_data().phi(graph.coords[:, 0])
        for x in cfg.get("targets", []):
            node = resolve_node_id(graph, x)
            table.add(f"u:{node}", T, reconstruct_displacement(phi, solution, node, T))

    def _run_fk(self, table: ResultTable) -> None:
        cfg = self.config
        graph = cfg.build_graph()
        phi = node_mapping(graph, cfg.get("phi", {}))
        psi = node_mapping(graph, cfg.get("psi", {}))
        targets = [resolve_node_id(graph, x) for x in cfg["targets"]]
        for t in self._times():
            self._log(f"Running fk: t={t} R={cfg.replicas}")
            estimates = feynman_kac(graph, phi, psi, targets, t, cfg.replicas, cfg.seed, workers=cfg.workers)
            for x in targets:
                table.add_estimate(f"u:{x}", t, estimates[x])

    def _run_meanfield(self, table: ResultTable) -> None:
        cfg = self.config
        graph, f0 = self._graph_and_state()
        n, N = self._ring_scale()
        times = self._times()
        sigmas = float(cfg.get("sigmas", 4.0))
        field = mean_field(graph, f0, times, cfg.replicas, cfg.seed, workers=cfg.workers)
        exact_fields = solve_at(graph, f0, times, self._dt)
        labels = ([f"node:{graph.node_label(i)}" for i in range(graph.node_count)]
                  + [f"edge:{graph.edge_label(e)}" for e in range(graph.edge_count)])
        coordinates = []
        for t, exact_field in zip(times, exact_fields):
            exact = np.concatenate(as_arrays(exact_field))
            mean = np.concatenate(as_arrays(field.mean(t)))
            err = np.concatenate(as_arrays(field.stderr(t)))
            table.add("agreement", t, field.agreement(exact_field, t, sigmas), R=cfg.replicas, n=n, N=N)
            z = np.abs(mean - exact) / np.where(err > 0, err, np.inf)
            table.add("max_z", t, float(np.max(z)) if len(z) else 0.0, R=cfg.replicas, n=n, N=N)
            coordinates.extend(
                {"t": t, "coordinate": label, "mean": float(m), "stderr": float(s), "exact": float(e)}
                for label, m, s, e in zip(labels, mean, err, exact)
            )
        table.note("coordinates", coordinates)

    def _run_fluct(self, table: ResultTable) -> None:
        cfg = self.config
        graph, f0 = self._graph_and_state()
        n, N = self._ring_scale()
        times = self._times()
        estimates = fluctuation_series(graph, f0, times, cfg.replicas, cfg.seed, self._dt, workers=cfg.workers)
        for t, est in zip(times, estimates):
            table.add_estimate("V", t, est, n=n, N=N)
        table.note("bounds", [{"t": t, "lln": lln_bound(f0, t), "finite": finite_bound(f0, t)} for t in times])
        table.note("monotone", _monotone(estimates))

    def _run_rate(self, table: ResultTable) -> None:
        cfg = self.config
        graph, f0 = self._graph_and_state()
        n, N = self._ring_scale()
        t = float(cfg["t"])
        lhs, rhs = energy_rate_check(graph, f0, t, float(cfg["dt_fd"]), cfg.replicas, cfg.seed,
                                     workers=cfg.workers)
        table.add_estimate("lhs", t, lhs, n=n, N=N)
        table.add_estimate("rhs", t, rhs, n=n, N=N)
        table.note("difference", lhs.estimate - rhs.estimate)
        table.note("combined_stderr", math.hypot(lhs.stderr, rhs.stderr))

    def _run_hydro(self, table: ResultTable) -> None:
        cfg = self.config
        n, N, t = int(cfg["n"]), int(cfg["N"]), float(cfg["t"])
        data = cfg.periodic_data()
        R, seed, workers = cfg.replicas, cfg.seed, cfg.workers
        self._log(f"Running hydro: n={n} N={N}")
        table.add_estimate("err", t, hydro_error(n, N, data, t, R, seed, workers=workers), n=n, N=N)
        frequency = cfg.get("weak_frequency")
        if frequency:
            weak = weak_error(n, N, data, t, int(frequency), R, seed, workers=workers)
            table.add_estimate(f"weak:{int(frequency)}", t, weak, n=n, N=N)
        if cfg.get("decomposition"):
            parts = hydro_decomposition(n, N, data, t, R, seed, self._dt, workers=workers)
            table.add("bias", t, parts.bias, n=n, N=N)
            table.add_estimate("fluct_scaled", t, parts.fluctuation, n=n, N=N)
            table.note("decomposition", {"combined": parts.combined, "total": parts.total.estimate,
                                         "total_stderr": parts.total.stderr})
        if cfg.get("displacement"):
            table.add_estimate("displacement", t, displacement_error(n, N, data, t, R, seed, workers=workers),
                               n=n, N=N)
        ratio, limit = initial_energy_ratio(n, N, data)
        table.note("initial_energy", {"ratio": ratio, "limit": limit})

    def _run_phase(self, table: ResultTable) -> None:
        cfg = self.config
        data = cfg.periodic_data()
        t, R, seed, workers = float(cfg["t"]), cfg.replicas, cfg.seed, cfg.workers
        frequency = cfg.get("weak_frequency")
        errors: Dict[str, List[float]] = {}
        weak: Dict[str, List[Dict[str, Any]]] = {}
        for family in cfg["families"]:
            for n in cfg["n_values"]:
                N = family_scale(family, n)
                self._log(f"Running phase: n={n} N={N} ({family})")
                est = hydro_error(n, N, data, t, R, seed, workers=workers)
                table.add_estimate(family, t, est, n=n, N=N)
                errors.setdefault(family, []).append(est.estimate)
                if frequency and family == "critical":
                    w = weak_error(n, N, data, t, int(frequency), R, seed, workers=workers)
                    weak.setdefault(family, []).append({"n": n, "N": N, **w.to_dict()})
        table.note("trends", {family: phase_trend(values) for family, values in errors.items()})
        if weak:
            table.note("weak", weak)

    def _run_yule(self, table: ResultTable) -> None:
        cfg = self.config
        lam, r = float(cfg["lambda"]), int(cfg["start"])
        for t in self._times():
            births = yule_counts(lam, r, t, cfg.replicas, cfg.seed)
            population = McEstimate.from_samples(r + births, cfg.seed)
            table.add_estimate("population", t, population, bound=yule_mean(lam, r, t))
        if cfg.get("graph") is None:
            return
        graph, f0 = self._graph_and_state()
        for t in sorted(float(s) for s in cfg.get("dominance_times", [])):
            check = jump_count_dominance(graph, f0, t, cfg.replicas, cfg.seed, workers=cfg.workers)
            table.add_estimate("ips_jumps", t, check.ips_jumps, bound=check.bound)
            table.add_estimate("yule_jumps", t, check.yule_jumps, bound=check.bound)
            table.note(f"dominance_start_{t:g}", {"r": check.start, "rate": check.rate})

    def _run_oracle(self, table: ResultTable) -> None:
        cfg = self.config
        graph, f0 = self._graph_and_state()
        times = self._times()
        oracle = generator_oracle(graph, f0, int(cfg["jump_cap"]),
                                  int(cfg.get("state_cap", WaveGraphConstants.ORACLE_STATE_CAP)))
        self._log(f"Oracle: {oracle.state_count} states within {oracle.jump_cap} jumps")
        table.note("states", oracle.state_count)
        names = list(cfg.get("functionals") or default_functionals(graph))
        functionals = {name: named_functional(graph, name) for name in names}

        R = int(cfg.get("replicas") or 0)
        batch = run_replicas(f0, times, R, cfg.seed, workers=cfg.workers) if R else None
        for k, t in enumerate(times):
            exact = oracle_expectations(oracle, t, functionals)
            for name in names:
                table.add(f"exact:{name}", t, exact.values[name], 0.0, bound=exact.error_bound)
                if batch is not None:
                    samples = functionals[name](batch.nodes[:, k], batch.edges[:, k])
                    table.add_estimate(f"mc:{name}", t, McEstimate.from_samples(samples, cfg.seed),
                                       bound=exact.error_bound)
            rate_name = cfg.get("rate_functional")
            if rate_name:
                rate = oracle_rate(oracle, t, rate_name)
                table.add(f"rate:{rate_name}", t, rate.values[rate_name], 0.0, bound=rate.error_bound)

    def _run_lln(self, table: ResultTable) -> None:
        cfg = self.config
        n, t = int(cfg["n"]), float(cfg["t"])
        graph = ring_graph(n)
        zeta = periodic_zeta(graph, cfg.periodic_data())
        scales, errors = [], []
        for scale in cfg["scales"]:
            self._log(f"Running lln: n={n} c={scale}")
            f0 = scaled_floor(zeta, scale)
            est = lln_error(graph, zeta, f0, float(scale), t, cfg.replicas, cfg.seed, self._dt, workers=cfg.workers)
            table.add_estimate("error", t, est, n=n, N=int(scale) if float(scale).is_integer() else None)
            scales.append(float(scale))
            errors.append(est.estimate)
        table.note("slope", log_slope(scales, errors))


def phase_trend(errors: List[float]) -> Dict[str, Any]:
    """Direction summary of Err over increasing n."""
    values = np.asarray(errors, dtype=np.float64)
    positive = values[values > 0]
    return {
        "errors": [float(v) for v in values],
        "decreasing": bool(np.all(np.diff(values) < 0)),
        "increasing": bool(np.all(np.diff(values) > 0)),
        "max_min_ratio": float(positive.max() / positive.min()) if len(positive) else None,
        "growth": float(values[-1] / values[0]) if values[0] > 0 else None,
    }


def log_slope(x: List[float], y: List[float]) -> Optional[float]:
    """Least-squares slope of log y against log x; None if any y <= 0."""
    if len(x) < 2 or min(y) <= 0:
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _monotone(estimates: List[McEstimate], sigmas: float = 3.0) -> bool:
    return all(
        a.estimate <= b.estimate + sigmas * math.hypot(a.stderr, b.stderr)
        for a, b in zip(estimates, estimates[1:])
    )
