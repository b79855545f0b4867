"""Command-line interface for wavegraph.

Every experiment kind is a subcommand with a single ``run`` action::

    wavegraph phase run --config phase.json --set replicas=400

Failures are reported as one JSON line on stderr and a nonzero exit code.
"""

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional

from dotenv import load_dotenv

from ..core.config import KINDS, ExperimentConfig
from ..core.experiment import ExperimentRunner
from ..utils.exceptions import WaveGraphError

KIND_HELP = {
    "solve": "Solve the graph wave ODE and record energies and displacements",
    "fk": "Feynman-Kac Monte Carlo estimate of the displacement u(x, t)",
    "meanfield": "Compare the replica mean of f_t with the ODE solution",
    "fluct": "Fluctuation E||f_t - E f_t||^2 against the closed-form bounds",
    "rate": "Both sides of the energy growth identity",
    "hydro": "Hydrodynamic error on the periodic ring",
    "phase": "Sweep the three scaling regimes of the hydrodynamic limit",
    "yule": "Yule process means and jump-count dominance",
    "oracle": "Exact expectations from the truncated generator against Monte Carlo",
    "lln": "Law-of-large-numbers error over a list of scale factors",
}

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_UNEXPECTED = 2


class WaveGraphCLI:
    """Command-line front end dispatching to :class:`ExperimentRunner`."""

    def __init__(self, verbose: bool = False):
        """Initialize the CLI with available commands."""
        self.verbose = verbose
        self.commands: Dict[str, Callable[[argparse.Namespace], None]] = {
            "run": self.run_command,
        }

    def run(self, args: argparse.Namespace) -> int:
        """Execute a command based on parsed arguments.

        Args:
            args: Parsed command-line arguments

        Returns:
            Process exit code
        """
        handler_name = getattr(args, "action", None)
        if handler_name not in self.commands:
            self._report({"error": "UsageError", "message": f"Unknown command {handler_name!r}", "details": {}})
            return EXIT_FAILURE

        try:
            self.commands[handler_name](args)
        except WaveGraphError as e:
            self._report(e.to_dict())
            return EXIT_FAILURE
        except KeyboardInterrupt:
            self._report({"error": "KeyboardInterrupt", "message": "Operation cancelled by user", "details": {}})
            return EXIT_FAILURE
        except Exception as e:
            self._report({"error": type(e).__name__, "message": str(e), "details": {}})
            return EXIT_UNEXPECTED
        return EXIT_OK

    @staticmethod
    def _report(payload: Dict[str, Any]) -> None:
        print(json.dumps(payload, sort_keys=True, default=str, ensure_ascii=False), file=sys.stderr)

    def run_command(self, args: argparse.Namespace) -> None:
        """Handle ``<kind> run``.

        Args:
            args: Parsed command-line arguments
        """
        values: Dict[str, Any] = {}
        if args.output_dir is not None:
            values["output_dir"] = args.output_dir
        if args.workers is not None:
            values["workers"] = args.workers
        if args.name is not None:
            values["name"] = args.name

        config = ExperimentConfig(args.kind, args.config, args.overrides, values=values, verbose=self.verbose)
        runner = ExperimentRunner(config, verbose=self.verbose)
        table = runner.run()
        if self.verbose:
            table.print_rows()
        print(runner.results_path)

    @staticmethod
    def create_parser() -> argparse.ArgumentParser:
        """Create the main argument parser.

        Returns:
            Configured argument parser
        """
        parser = argparse.ArgumentParser(
            prog="wavegraph",
            description="Particle-system experiments for the wave equation on graphs",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  wavegraph fk run                                  Two-node Feynman-Kac example
  wavegraph phase run --set replicas=400            Phase sweep with more replicas
  wavegraph hydro run --config ring.json --set n=64
            """)

        subparsers = parser.add_subparsers(
            title="Experiments",
            description="Available experiment kinds",
            help="Use '<kind> --help' for experiment-specific help",
            dest="kind",
            required=True,
        )
        for kind in KINDS:
            kind_parser = subparsers.add_parser(kind, help=KIND_HELP[kind], description=KIND_HELP[kind])
            kind_parser.add_argument("action", choices=["run"], help="Action to perform")
            kind_parser.add_argument("--config", "-c", default=None,
                                     help="JSON config file (defaults to the built-in preset)")
            kind_parser.add_argument("--set", dest="overrides", action="append", default=[],
                                     metavar="KEY=VALUE",
                                     help="Override a config value; dotted keys address nested objects")
            kind_parser.add_argument("--output-dir", default=None, help="Directory for run directories")
            kind_parser.add_argument("--name", default=None, help="Run directory name")
            kind_parser.add_argument("--workers", type=int, default=None, help="Replica worker processes")
            kind_parser.add_argument("--verbose", "-v", action="store_true", help="Print progress")
        return parser

    @staticmethod
    def main(argv: Optional[List[str]] = None) -> None:
        """Main entry point for the CLI."""
        load_dotenv()
        parser = WaveGraphCLI.create_parser()
        args = parser.parse_args(argv)

        cli = WaveGraphCLI(verbose=args.verbose)
        sys.exit(cli.run(args))


if __name__ == "__main__":
    WaveGraphCLI.main()
