"""Configuration management for wavegraph experiments.

This module resolves an experiment description from built-in presets,
JSON config files and command-line overrides, validates it, and turns
its graph and initial-data sections into library objects.
"""

import copy
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from .constants import WaveGraphConstants
from ..analysis.reports import config_hash
from ..graph.fields import Field
from ..graph.graph import Graph, build_graph, resolve_edge_ids, resolve_node_id
from ..ips.engine import hydro_init
from ..ips.state import ParticleState, init_state
from ..ode.periodic import PeriodicData
from ..ode.solver import make_zeta, periodic_zeta
from ..utils.exceptions import ConfigurationError, WaveGraphError
from ..utils.parallel import default_workers

KINDS = ("solve", "fk", "meanfield", "fluct", "rate", "hydro", "phase", "yule", "oracle", "lln")

# long experiment names accepted in config files
ALIASES = {
    "feynman-kac": "fk",
    "mean-field-check": "meanfield",
    "fluctuation": "fluct",
    "energy-rate": "rate",
    "yule-check": "yule",
    "oracle-check": "oracle",
}

# kinds that average over replicas
MONTE_CARLO_KINDS = ("fk", "meanfield", "fluct", "rate", "hydro", "phase", "yule", "lln")

# keys that do not change results and stay out of the config hash
RUNTIME_KEYS = ("output_dir", "workers", "name", "verbose")

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


def canonical_kind(kind: str) -> str:
    """Short experiment kind for a short or long name.

    Raises:
        ConfigurationError: For an unknown kind
    """
    kind = ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ConfigurationError(f"Unknown experiment kind: {kind!r}", {"kinds": list(KINDS)})
    return kind


def load_preset(kind: str) -> Dict[str, Any]:
    """Built-in defaults for an experiment kind."""
    kind = canonical_kind(kind)
    preset_path = PRESET_DIR / f"{kind}.json"
    if not preset_path.exists():
        raise ConfigurationError(f"No preset for experiment kind {kind!r}")
    with open(preset_path) as f:
        return json.load(f)


def parse_override(item: str) -> Tuple[List[str], Any]:
    """Split ``a.b.c=value`` into its key path and value.

    Values are parsed as JSON when possible and kept as strings otherwise.

    Raises:
        ConfigurationError: If the item has no ``=`` or an empty key
    """
    key, sep, raw = item.partition("=")
    if not sep or not key.strip():
        raise ConfigurationError(f"Override must look like key=value, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return [part for part in key.strip().split(".")], value


def _merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(base.get(key), dict) and key not in ("graph", "initial", "data"):
            _merge(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
    return base


def _set_path(target: Dict[str, Any], keys: List[str], value: Any) -> None:
    node = target
    for key in keys[:-1]:
        child = node.get(key)
        if not isinstance(child, dict):
            child = {}
            node[key] = child
        node = child
    node[keys[-1]] = value


class ExperimentConfig:
    """Resolved experiment description.

    Configuration is resolved in the following priority order:
    1. ``--set`` overrides (dotted keys address nested objects)
    2. JSON config file
    3. Built-in preset for the experiment kind

    The output directory falls back to the ``WAVEGRAPH_OUTPUT_DIR``
    environment variable and then to ``wavegraph-results``.
    """

    def __init__(
        self,
        kind: str,
        config_file: Optional[Union[str, Path]] = None,
        overrides: Optional[Iterable[str]] = None,
        values: Optional[Mapping[str, Any]] = None,
        verbose: bool = False,
    ):
        """Resolve and validate a configuration.

        Args:
            kind: Experiment kind (subcommand name or long name)
            config_file: Optional JSON config file
            overrides: ``key=value`` strings applied last
            values: Extra values applied after the file, before overrides
            verbose: Print where values came from

        Raises:
            ConfigurationError: If any source is unreadable or the result
                is invalid
        """
        self.verbose = verbose
        self.kind = canonical_kind(kind)
        self.base_dir = Path.cwd()
        self.values: Dict[str, Any] = load_preset(self.kind)
        self.values["kind"] = self.kind

        if config_file is not None:
            self._load_from_config_file(Path(config_file))
        if values:
            _merge(self.values, values)
        for item in overrides or ():
            keys, value = parse_override(item)
            _set_path(self.values, keys, value)
            if self.verbose:
                print(f"Override: {'.'.join(keys)} = {value!r}")

        declared = canonical_kind(str(self.values.get("kind", self.kind)))
        if declared != self.kind:
            raise ConfigurationError(
                f"Config describes a {declared!r} experiment but {self.kind!r} was requested",
                {"kind": declared},
            )
        self.values["kind"] = self.kind
        self._resolve_runtime()
        self.validate()

    def _load_from_config_file(self, config_path: Path) -> None:
        if not config_path.exists():
            raise ConfigurationError(f"Config file does not exist: {config_path}", {"path": str(config_path)})
        try:
            with open(config_path) as f:
                data = json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            raise ConfigurationError(f"Error loading config file {config_path}: {e}", {"path": str(config_path)})
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file must contain a JSON object: {config_path}")
        self.base_dir = config_path.resolve().parent
        _merge(self.values, data)
        if self.verbose:
            print(f"Loaded config file: {config_path}")

    def _resolve_runtime(self) -> None:
        if self.values.get("output_dir") is None:
            self.values["output_dir"] = os.environ.get(WaveGraphConstants.OUTPUT_DIR_ENVAR,
                                                       WaveGraphConstants.DEFAULT_OUTPUT_DIR)
        if self.values.get("workers") is None:
            self.values["workers"] = default_workers()
        self.values.setdefault("seed", WaveGraphConstants.DEFAULT_SEED)

    # Access ------------------------------------------------------------------

    def __getitem__(self, key: str) -> Any:
        try:
            return self.values[key]
        except KeyError:
            raise ConfigurationError(f"Missing configuration key {key!r} for {self.kind!r}", {"key": key})

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    @property
    def seed(self) -> int:
        return int(self.values["seed"])

    @property
    def replicas(self) -> int:
        return int(self["replicas"])

    @property
    def workers(self) -> int:
        return int(self.values["workers"])

    @property
    def output_dir(self) -> Path:
        return Path(self.values["output_dir"])

    @property
    def run_name(self) -> str:
        return str(self.values.get("name") or f"{self.kind}-{self.digest()[:12]}")

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.values)

    def hashed_values(self) -> Dict[str, Any]:
        return {k: v for k, v in self.values.items() if k not in RUNTIME_KEYS}

    def digest(self) -> str:
        return config_hash(self.hashed_values())

    def save(self, path: Union[str, Path]) -> Path:
        """Write the resolved configuration as JSON, without the runtime keys.

        The file is identical for every worker count and output directory.

        Raises:
            ConfigurationError: If the file cannot be written
        """
        try:
            output_path = Path(path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, "w") as f:
                json.dump(self.hashed_values(), f, indent=2, sort_keys=True)
                f.write("\n")
        except (OSError, TypeError) as e:
            raise ConfigurationError(f"Failed to save configuration: {e}")
        if self.verbose:
            print(f"Configuration saved to {output_path}")
        return output_path

    # Validation --------------------------------------------------------------

    def validate(self) -> None:
        """Check the resolved values for this experiment kind.

        Raises:
            ConfigurationError: On the first invalid value
        """
        v = self.values
        _require_int(v, "seed", minimum=0)
        _require_int(v, "workers", minimum=1)
        if self.kind in MONTE_CARLO_KINDS:
            _require_int(v, "replicas", minimum=WaveGraphConstants.MIN_REPLICAS)
        if "dt" in v:
            _require_positive(v, "dt")
        for key in ("t", "T", "times"):
            if key in v:
                values = v[key] if isinstance(v[key], list) else [v[key]]
                if not values:
                    raise ConfigurationError(f"'{key}' must not be empty")
                for t in values:
                    if not isinstance(t, (int, float)) or isinstance(t, bool) or not t >= 0 or not math.isfinite(t):
                        raise ConfigurationError(f"Times must be finite and non-negative, got {key}={t!r}")
        if v.get("graph") is not None:
            self._validate_graph(v["graph"])
        if self.kind in ("hydro", "lln"):
            _require_ring_size(v.get("n"))
        if self.kind == "hydro":
            _require_int(v, "N", minimum=1)
        if self.kind == "phase":
            for n in v.get("n_values", []):
                _require_ring_size(n)
            families = v.get("families")
            if not isinstance(families, list) or not families:
                raise ConfigurationError("'families' must be a non-empty list")
            for family in families:
                if family not in ("supercritical", "critical", "subcritical"):
                    raise ConfigurationError(f"Unknown scaling family {family!r}")
        if self.kind == "oracle":
            _require_int(v, "jump_cap", minimum=0)
            if v.get("replicas"):
                _require_int(v, "replicas", minimum=WaveGraphConstants.MIN_REPLICAS)
        if self.kind == "rate":
            _require_positive(v, "dt_fd")
        if self.kind == "yule":
            _require_positive(v, "lambda")
            _require_int(v, "start", minimum=1)
        if self.kind == "lln":
            scales = v.get("scales")
            if not isinstance(scales, list) or len(scales) < 2 or any(not (s > 0) for s in scales):
                raise ConfigurationError("'scales' must list at least two positive scale factors")

    def _validate_graph(self, spec: Any) -> None:
        if not isinstance(spec, dict):
            raise ConfigurationError("'graph' must be a JSON object")
        if spec.get("type") == "ring":
            _require_ring_size(spec.get("n"))
        if spec.get("type") == "file":
            if "path" not in spec:
                raise ConfigurationError("File graphs require 'path'")
            if not self._path(spec["path"]).exists():
                raise ConfigurationError(f"Graph file does not exist: {spec['path']}", {"path": str(spec["path"])})

    def _path(self, value: Union[str, Path]) -> Path:
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path

    # Builders ----------------------------------------------------------------

    def build_graph(self) -> Graph:
        """Graph described by the ``graph`` section.

        Raises:
            ConfigurationError: If the description is invalid
        """
        spec = dict(self["graph"])
        if spec.get("type") == "file":
            spec["path"] = str(self._path(spec["path"]))
        return _wrap(build_graph, spec)

    def periodic_data(self) -> PeriodicData:
        data = self["data"]
        if isinstance(data, str):
            data = str(self._path(data))
        return _wrap(PeriodicData.from_json, data)

    def initial_state(self, graph: Optional[Graph]) -> ParticleState:
        """Initial particle state from the ``initial`` section.

        ``{"nodes": {id: value}, "edges": [{"tail", "head", "value"}]}``
        gives explicit integer data; ``{"hydro": {"n": .., "N": ..}}`` floors
        the periodic ``data`` on the ring.
        """
        spec = self["initial"]
        if not isinstance(spec, dict):
            raise ConfigurationError("'initial' must be a JSON object")
        if "hydro" in spec:
            params = spec["hydro"]
            return _wrap(hydro_init, params["n"], params["N"], self.periodic_data())
        nodes = node_mapping(graph, spec.get("nodes", {}))
        edges = edge_mapping(graph, spec.get("edges", []))
        return _wrap(init_state, graph, nodes, edges)

    def initial_data(self, graph: Graph) -> Field:
        """zeta from ``phi``/``psi`` node maps, or from periodic ``data`` on a ring."""
        if "phi" in self.values or "psi" in self.values:
            phi = node_mapping(graph, self.values.get("phi", {}))
            psi = node_mapping(graph, self.values.get("psi", {}))
            return _wrap(make_zeta, graph, phi, psi)
        return _wrap(periodic_zeta, graph, self.periodic_data())

    def __repr__(self) -> str:
        return f"ExperimentConfig(kind={self.kind!r}, seed={self.seed})"


def node_mapping(graph: Graph, values: Any) -> Dict[Any, float]:
    """Node map with JSON keys resolved to node ids."""
    if isinstance(values, list):
        return {graph.node_id(i): float(v) for i, v in enumerate(values)}
    if not isinstance(values, Mapping):
        raise ConfigurationError("Node data must be an object keyed by node id or a list in node order")
    return {_wrap(resolve_node_id, graph, k): float(v) for k, v in values.items()}


def edge_mapping(graph: Graph, values: Any) -> Dict[Tuple[Any, Any], float]:
    """Edge map from ``[{"tail", "head", "value"}]`` or ``{"tail-head": value}``."""
    if isinstance(values, Mapping):
        entries = []
        for key, value in values.items():
            if "-" not in str(key):
                raise ConfigurationError(f"Edge keys must look like 'tail-head', got {key!r}")
            tail, head = _wrap(resolve_edge_ids, graph, key)
            entries.append({"tail": tail, "head": head, "value": value})
        values = entries
    out = {}
    for entry in values:
        try:
            key = (_wrap(resolve_node_id, graph, entry["tail"]), _wrap(resolve_node_id, graph, entry["head"]))
            out[key] = float(entry["value"])
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid edge entry {entry!r}: {e}")
    return out


def _wrap(fn, *args):
    # library errors keep their class; anything else becomes a config error
    try:
        return fn(*args)
    except WaveGraphError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid configuration: {e}")


def _require_int(values: Mapping[str, Any], key: str, minimum: int) -> None:
    value = values.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ConfigurationError(f"'{key}' must be an integer >= {minimum}, got {value!r}", {"key": key})


def _require_positive(values: Mapping[str, Any], key: str) -> None:
    value = values.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0 or not math.isfinite(value):
        raise ConfigurationError(f"'{key}' must be a positive number, got {value!r}", {"key": key})


def _require_ring_size(n: Any) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < 3:
        raise ConfigurationError("ring requires n ≥ 3", {"n": n})
