"""Main CLI entry point for catlab."""

import argparse
import sys

from catlab import __version__
from catlab.lib.formatters import CapitalizedHelpFormatter
from catlab.lib.output import configure, fail


def create_parser() -> argparse.ArgumentParser:
    """
    Create the argument parser with all commands.

    Configures the main argument parser with global options and registers
    the command-specific subparsers for the catlab CLI.

    Returns
    -------
    argparse.ArgumentParser
        Configured argument parser with all commands registered.
    """
    parser = argparse.ArgumentParser(
        prog="catlab",
        description="Run and check experiments on CAT(k) spaces and their conformal changes",
        formatter_class=CapitalizedHelpFormatter,
    )

    # Global options
    parser.add_argument("--version", "-v", action="version", version=f"catlab {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Verbose output")
    parser.add_argument("--quiet", "-q", action="store_true", help="Drop run progress and check tables")
    parser.add_argument(
        "--color",
        choices=["auto", "always", "never"],
        default="auto",
        help="Control colored output: auto (default, detect TTY), always (force colors), never (disable colors)",
    )

    # Customize main parser options title
    parser._optionals.title = "Options"

    subparsers = parser.add_subparsers(
        dest="command",
        help="Available commands",
        title="Commands",
    )

    # Monkey-patch add_parser to automatically set Options title and formatter
    original_add_parser = subparsers.add_parser

    def custom_add_parser(*args, **kwargs):
        if "formatter_class" not in kwargs:
            kwargs["formatter_class"] = CapitalizedHelpFormatter
        subparser = original_add_parser(*args, **kwargs)
        subparser._optionals.title = "Options"
        return subparser

    subparsers.add_parser = custom_add_parser

    from catlab.commands import list_cmd, plotdata, run

    run.register_parser(subparsers)
    list_cmd.register_parser(subparsers)
    plotdata.register_parser(subparsers)

    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Main CLI entry point for the catlab command.

    Parses command-line arguments, creates the command context and routes
    execution to the appropriate command handler. Configuration is loaded by
    the ``run`` handler itself so that its errors carry file positions.

    Parameters
    ----------
    argv : list[str], optional
        Arguments without the program name (default: ``sys.argv[1:]``).

    Returns
    -------
    int
        Exit code: 0 for success, 1 for command failure, 2 for failed checks,
        3 for configuration error, 130 for keyboard interrupt.
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    configure(quiet=args.quiet, color=args.color)

    if not args.command:
        parser.print_help()
        return 1

    ctx = {
        "config": None,
        "verbose": args.verbose,
        "quiet": args.quiet,
        "args": args,
    }

    try:
        if args.command == "run":
            from catlab.commands import run

            return run.handle(ctx)
        elif args.command == "list":
            from catlab.commands import list_cmd

            return list_cmd.handle(ctx)
        else:
            from catlab.commands import plotdata

            return plotdata.handle(ctx)

    except KeyboardInterrupt:
        print()
        return 130
    except Exception as e:
        fail(f"Command failed: {e}")
        if ctx["verbose"]:
            import traceback

            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
