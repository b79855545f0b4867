"""Tabular experiment results.

This module collects estimator outputs into rows of the result schema
``experiment,n,N,t,R,seed,estimate,stderr,bound`` and writes them as CSV
files headed by ``#`` comment lines carrying the artifact version, the
configuration hash and the master seed.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..core.constants import WaveGraphConstants
from ..utils.exceptions import ConfigurationError
from .estimators import McEstimate

INTEGER_COLUMNS = ("n", "N", "R", "seed")


def config_hash(config: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of a resolved configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class ResultTable:
    """Rows of estimator results for one experiment run.

    Rows are kept in insertion order; the same configuration and seed
    therefore always produce byte-identical CSV files.
    """

    def __init__(self, experiment: str, config_digest: str, seed: int,
                 version: str = WaveGraphConstants.VERSION):
        """Initialize an empty result table.

        Args:
            experiment: Experiment kind (used as the default row label)
            config_digest: Hash of the resolved configuration
            seed: Master seed of the run
            version: Artifact version embedded in the header
        """
        self.experiment = experiment
        self.config_digest = config_digest
        self.seed = int(seed)
        self.version = version
        self._rows: List[Dict[str, Any]] = []
        self._extras: Dict[str, Any] = {}

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> List[Dict[str, Any]]:
        return [dict(row) for row in self._rows]

    def add(self, label: Optional[str], t: float, estimate: float, stderr: float = 0.0,
            R: Optional[int] = None, seed: Optional[int] = None, bound: Optional[float] = None,
            n: Optional[int] = None, N: Optional[int] = None) -> None:
        """Append one row; ``label`` is appended to the experiment kind."""
        name = self.experiment if not label else f"{self.experiment}:{label}"
        self._rows.append({
            "experiment": name,
            "n": n,
            "N": N,
            "t": float(t),
            "R": R,
            "seed": self.seed if seed is None else int(seed),
            "estimate": float(estimate),
            "stderr": float(stderr),
            "bound": None if bound is None else float(bound),
        })

    def add_estimate(self, label: Optional[str], t: float, estimate: McEstimate,
                     n: Optional[int] = None, N: Optional[int] = None,
                     bound: Optional[float] = None) -> None:
        """Append a Monte Carlo estimate; an explicit ``bound`` overrides the estimate's own."""
        self.add(label, t, estimate.estimate, estimate.stderr, R=estimate.replicas, seed=estimate.seed,
                 bound=estimate.bound if bound is None else bound, n=n, N=N)

    def note(self, key: str, value: Any) -> None:
        """Attach an extra entry to the JSON summary."""
        self._extras[key] = value

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self._rows, columns=list(WaveGraphConstants.RESULT_COLUMNS))
        for column in INTEGER_COLUMNS:
            frame[column] = frame[column].astype("Int64")
        return frame

    def header_lines(self) -> List[str]:
        return [
            f"# {WaveGraphConstants.ARTIFACT} {self.version}",
            f"# config_hash {self.config_digest}",
            f"# seed {self.seed}",
        ]

    def write_csv(self, path: Union[str, Path]) -> Path:
        """Write the header lines followed by the CSV rows."""
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", newline="") as f:
            for line in self.header_lines():
                f.write(line + "\n")
            self.to_frame().to_csv(f, index=False, lineterminator="\n")
        return output_path

    def summary(self) -> Dict[str, Any]:
        return {
            "artifact": WaveGraphConstants.ARTIFACT,
            "version": self.version,
            "experiment": self.experiment,
            "config_hash": self.config_digest,
            "seed": self.seed,
            "rows": self.rows,
            **self._extras,
        }

    def write_summary(self, path: Union[str, Path]) -> Path:
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w") as f:
            json.dump(self.summary(), f, indent=2, sort_keys=True, default=_json_default)
            f.write("\n")
        return output_path

    def print_rows(self) -> None:
        """Print the rows in a compact human-readable form."""
        print(f"\n{self.experiment} results ({len(self)} rows):")
        print("=" * 50)
        for row in self._rows:
            scale = "" if row["n"] is None else f" n={row['n']} N={row['N']}"
            bound = "" if row["bound"] is None else f" bound={row['bound']:.6g}"
            print(f"{row['experiment']}{scale} t={row['t']:g}: "
                  f"{row['estimate']:.6g} +/- {row['stderr']:.2g}{bound}")


def read_results(path: Union[str, Path]) -> Tuple[Dict[str, str], pd.DataFrame]:
    """Read a result CSV back into its header entries and rows.

    Raises:
        ConfigurationError: If the file is missing or has no header
    """
    input_path = Path(path)
    if not input_path.exists():
        raise ConfigurationError(f"Result file does not exist: {path}")
    header: Dict[str, str] = {}
    with open(input_path) as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(" ")
            header[key] = value
    if "config_hash" not in header:
        raise ConfigurationError(f"Result file has no config hash header: {path}")
    return header, pd.read_csv(input_path, comment="#")
