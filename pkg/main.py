###############################################################################################
#
# Welcome to graphfold. This is the command line entry point of the library.
#
###############################################################################################

from termcolor import colored
import argparse
import logging
import math
import sys

from helpers.cli_loader import load_bar
from helpers.config import residual_tolerance
from helpers.errors import GraphfoldError
from helpers.report import EXIT_INPUT_ERROR, RunReport
from datasources.graphfile import load_graph_file
from pipeline import commands

logger = logging.getLogger("graphfold")

FILE_COMMANDS = ("verify", "spectrum", "effective", "roots")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the report as JSON only. Example: --json")
    common.add_argument("--log", action="store_true", help="Log debugging output to stderr. Example: --log")

    parser = argparse.ArgumentParser(prog="graphfold",
                                     description="graphfold: Fold the branches of a tight-binding graph into on-site potentials of its center.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="Check every eigenpair against the projected equation.")
    p.add_argument("file", type=str, help="Graph file (JSON). Example: datasources/samples/chain15.json")

    p = sub.add_parser("spectrum", parents=[common], help="Eigenvalues of the full graph.")
    p.add_argument("file", type=str, help="Graph file (JSON).")

    p = sub.add_parser("effective", parents=[common], help="Root self-energies and projection Hamiltonian at a fixed energy.")
    p.add_argument("file", type=str, help="Graph file (JSON) with a partition.")
    p.add_argument("--energy", type=float, required=True, help="Real energy in units of J. Example: --energy -1.4142135623730951")

    p = sub.add_parser("roots", parents=[common], help="Energies that are eigenvalues of their own projection Hamiltonian.")
    p.add_argument("file", type=str, help="Graph file (JSON) with a partition.")
    p.add_argument("--emin", type=float, help="Lower end of the scan. Defaults to a Gershgorin bound.")
    p.add_argument("--emax", type=float, help="Upper end of the scan. Defaults to a Gershgorin bound.")
    p.add_argument("--grid", type=int, default=2000, help="Number of scan points. Example: --grid 2000")
    p.add_argument("--tol", type=float, default=1e-10, help="Refinement tolerance. Example: --tol 1e-10")

    p = sub.add_parser("chain-demo", parents=[common], help="Open chain cut into two branches and a center.")
    p.add_argument("--Na", type=int, required=True, help="Sites in branch a. Example: --Na 5")
    p.add_argument("--Nc", type=int, required=True, help="Sites in the center. Example: --Nc 4")
    p.add_argument("--Nb", type=int, required=True, help="Sites in branch b. Example: --Nb 6")
    p.add_argument("--n", type=int, required=True, help="Eigenstate index, k = n pi / (N + 1). Example: --n 4")

    p = sub.add_parser("ring-demo", parents=[common], help="Ring scattering center with two leads at E_k = V.")
    p.add_argument("--N", type=int, required=True, help="Half the number of ring sites. Example: --N 2")
    p.add_argument("--k", type=float, required=True, help="Wavenumber in (0, pi). Example: --k 1.0471975511965976")

    return parser


def run(args) -> RunReport:
    tol = residual_tolerance()

    if args.command in FILE_COMMANDS:
        spec, partition = load_graph_file(args.file)
        if args.command == "verify":
            return commands.verify(spec, partition, tol, source=args.file)
        if args.command == "spectrum":
            return commands.spectrum(spec, source=args.file)
        if args.command == "effective":
            if not math.isfinite(args.energy):
                raise GraphfoldError("--energy must be a finite real number")
            return commands.effective(spec, partition, args.energy, source=args.file)
        return commands.roots(spec, partition, args.emin, args.emax, args.grid, args.tol, source=args.file)

    if args.command == "chain-demo":
        return commands.chain_demo(args.Na, args.Nc, args.Nb, args.n, tol)
    return commands.ring_demo(args.N, args.k)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(format="%(message)s", level=logging.DEBUG if args.log else logging.WARNING)
    human = not args.json

    if human:
        # Welcome message
        print(colored("Welcome to graphfold!", "green", attrs=["bold"]))
        print(colored("---------------------", "green", attrs=["bold"]))
        print("")
        print(colored("✓ You have chosen the command '{}'.".format(args.command), "yellow"))
        if getattr(args, "file", None):
            print(colored("✓ Reading the graph file {}.".format(args.file), "yellow"))
        print("")

    try:
        with load_bar(colored("Running {}...".format(args.command), "yellow"), enabled=human):
            report = run(args)
    except (GraphfoldError, OSError) as e:
        if args.log:
            logger.exception("graphfold failed")
        print(colored(str(e), "red"), file=sys.stderr)
        return EXIT_INPUT_ERROR

    if not human:
        print(report.to_json())
        return report.exit_code

    print("")
    print(report.to_text())
    print("")
    if report.exit_code == 0:
        print(colored("All checks passed.", "green", attrs=["bold"]))
    else:
        print(colored("A check failed (exit code {}).".format(report.exit_code), "red", attrs=["bold"]))
    print(colored("Thank you for using graphfold. Good bye!", "green", attrs=["bold"]))
    print(colored("---------------------", "green", attrs=["bold"]))
    print("")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
