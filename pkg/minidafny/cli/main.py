#!/usr/bin/env python3
"""
minidafny command line
verify source files, or run the corpus manifest
"""
import argparse
import logging
import sys
from typing import List, Optional

from minidafny.cli.corpus import run_corpus
from minidafny.cli.report import EXIT_INTERNAL, EXIT_STATIC
from minidafny.cli.verify import verify
from minidafny.config.settings_loader import BACKENDS, RunConfig
from minidafny.diagnostics import ConfigError

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    parser.add_argument('--quiet', '-q', action='store_true', help='Only warnings and errors in the log')
    parser.add_argument('--settings', type=str, default=None, help='Settings JSON file')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='minidafny', description='Auto-active verifier for .mdfy programs')
    commands = parser.add_subparsers(dest='command', required=True)

    check = commands.add_parser('verify', help='Verify source files')
    check.add_argument('files', nargs='+', help='.mdfy source files')
    check.add_argument('--backend', choices=BACKENDS, default=None, help='Prover backend (default builtin)')
    check.add_argument('--solver-cmd', type=str, default=None,
                       help='SMT-LIB2 solver command, run as `CMD file.smt2` (fallback: MINIDAFNY_SOLVER)')
    check.add_argument('--timeout', type=int, default=None, help='Per-condition timeout in milliseconds (default 10000 builtin, 30000 smtlib)')
    check.add_argument('--fuel', type=int, default=None, help='Function unfolding depth')
    check.add_argument('--rounds', type=int, default=None, help='Quantifier instantiation rounds')
    check.add_argument('--emit-smt', type=str, default=None, metavar='DIR',
                       help='Write one .smt2 file per condition into DIR')
    check.add_argument('--emit-gc', action='store_true', help='Print the guarded-command graphs')
    check.add_argument('--emit-vc', action='store_true', help='Print the verification conditions')
    check.add_argument('--replay', action='store_true', help='Replay every counterexample')
    check.add_argument('--json', action='store_true', help='JSON report on stdout')
    check.add_argument('--jobs', '-j', type=int, default=None, help='Conditions discharged in parallel')
    _add_common(check)

    corpus = commands.add_parser('corpus', help='Run a corpus manifest')
    corpus.add_argument('manifest', help='CSV manifest (file, expected_exit, expected_codes)')
    corpus.add_argument('--timeout', type=int, default=None, help='Per-condition timeout in milliseconds (default 10000 builtin, 30000 smtlib)')
    _add_common(corpus)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif quiet:
        logging.getLogger().setLevel(logging.WARNING)
    else:
        logging.getLogger().setLevel(logging.INFO)


def _run_verify(args) -> int:
    config = RunConfig.from_sources({
        "inputs": list(args.files),
        "backend": args.backend,
        "solver_command": args.solver_cmd,
        "timeout_ms": args.timeout,
        "fuel": args.fuel,
        "rounds": args.rounds,
        "emit_smt_dir": args.emit_smt,
        "emit_gc": args.emit_gc or None,
        "emit_vc": args.emit_vc or None,
        "replay": args.replay or None,
        "json": args.json or None,
        "jobs": args.jobs,
        "settings_file": args.settings,
    })
    report = verify(config)
    dump_stream = sys.stderr if config.json else sys.stdout
    for f in report.files:
        for text in f.dumps:
            print(text, file=dump_stream)
    if config.json:
        sys.stdout.write(report.to_json())
    else:
        for line in report.human_lines():
            print(line)
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Main function; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        if args.command == 'verify':
            return _run_verify(args)
        config = RunConfig.from_sources({"timeout_ms": args.timeout, "settings_file": args.settings})
        return run_corpus(args.manifest, config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_STATIC
    except Exception as e:
        logger.error(f"Internal error: {e}")
        logger.debug("traceback", exc_info=True)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
