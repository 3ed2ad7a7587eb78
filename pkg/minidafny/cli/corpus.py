"""
Corpus runner: verify every file listed in a manifest and compare against
the expected exit code and diagnostic codes
"""
import logging
import os
from pathlib import Path
from typing import List, Optional, Set, Tuple

import pandas as pd

from minidafny.cli.report import EXIT_FAILED, EXIT_OK, FileReport
from minidafny.cli.verify import verify_file
from minidafny.config.settings_loader import RunConfig
from minidafny.diagnostics import ConfigError, Severity

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ("file", "expected_exit", "expected_codes")


def read_manifest(manifest: str) -> pd.DataFrame:
    """
    Manifest rows as strings; an empty file is an empty manifest

    Raises:
        ConfigError: unreadable file or missing columns
    """
    try:
        frame = pd.read_csv(manifest, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(MANIFEST_COLUMNS))
    except OSError as e:
        raise ConfigError(f"cannot read manifest {manifest}: {e}")
    missing = [column for column in MANIFEST_COLUMNS if column not in frame.columns]
    if missing:
        raise ConfigError(f"manifest {manifest} lacks column(s) {', '.join(missing)}")
    return frame


def parse_expected_codes(text: str) -> List[Tuple[str, Optional[Tuple[int, int]]]]:
    """`CODE` or `CODE@line:col` entries separated by ';'"""
    expected = []
    for entry in text.split(";"):
        entry = entry.strip()
        if not entry:
            continue
        if "@" in entry:
            code, where = entry.split("@", 1)
            line, col = where.split(":")
            expected.append((code.strip(), (int(line), int(col))))
        else:
            expected.append((entry, None))
    return expected


def reported_codes(report: FileReport) -> Set[Tuple[str, int, int]]:
    return {(d.code, d.span.start_line, d.span.start_col) for d in report.all_diagnostics()
            if d.severity is not Severity.NOTE}


def codes_match(expected_text: str, report: FileReport) -> bool:
    reported = reported_codes(report)
    expected = parse_expected_codes(expected_text)
    if {code for code, _ in expected} != {code for code, _, _ in reported}:
        return False
    return all(where is None or (code, where[0], where[1]) in reported for code, where in expected)


def _codes_text(report: FileReport) -> str:
    return ";".join(sorted({code for code, _, _ in reported_codes(report)}))


def run_corpus(manifest: str, config: Optional[RunConfig] = None) -> int:
    """
    Verify the manifest's files and print a diff line pair per mismatch

    Args:
        manifest: CSV with columns file, expected_exit, expected_codes;
            file paths are relative to the manifest
        config: options for each verification run (inputs are ignored)

    Returns:
        0 when every entry matches, 1 otherwise
    """
    config = config or RunConfig().validate()
    frame = read_manifest(manifest)
    base = os.path.dirname(os.path.abspath(manifest))
    rows = []
    for entry in frame.itertuples(index=False):
        path = os.path.join(base, entry.file)
        if not os.path.exists(path):
            logger.error(f"Corpus file not found: {path}")
            rows.append((entry.file, entry.expected_exit, entry.expected_codes, "missing", "", False))
            continue
        report = verify_file(path, config)
        actual_exit = str(report.exit_code)
        matched = actual_exit == str(entry.expected_exit).strip() and codes_match(entry.expected_codes, report)
        rows.append((entry.file, entry.expected_exit, entry.expected_codes, actual_exit,
                     _codes_text(report), matched))
    results = pd.DataFrame(rows, columns=["file", "expected_exit", "expected_codes", "actual_exit",
                                          "actual_codes", "match"])
    mismatches = results[~results["match"].astype(bool)] if len(results) else results
    for row in mismatches.itertuples(index=False):
        print(f"- {row.file}: exit {row.expected_exit} codes {row.expected_codes or '(none)'}")
        print(f"+ {row.file}: exit {row.actual_exit} codes {row.actual_codes or '(none)'}")
    print(f"corpus: {len(results) - len(mismatches)}/{len(results)} entries match")
    logger.info(f"Corpus {manifest}: {len(mismatches)} mismatch(es)")
    return EXIT_OK if len(mismatches) == 0 else EXIT_FAILED
