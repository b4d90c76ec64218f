#!/usr/bin/env python3
"""Validate `netstab --json` reports against the shipped schema.

Usage: check_reports.py <netstab-binary> <schema.json> <fixture-dir>
Runs every subcommand over the shipped fixtures and fails if any emitted
report does not validate.
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path, fixtures = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft7Validator.check_schema(schema)
    validator = jsonschema.Draft7Validator(schema)

    p11 = str(fixtures / "p11.json")
    cand6 = str(fixtures / "cand6.json")
    sets5 = str(fixtures / "sets5.json")
    selfloop1 = str(fixtures / "selfloop1.json")
    out_path = str(Path(tempfile.mkdtemp()) / "gadget.json")

    runs = [
        ["analyze", p11],
        ["analyze", selfloop1, "--no-timings"],
        ["attack", p11, "--budget", "1"],
        ["attack", p11, "--budget", "0", "--estimator", "upper"],
        ["recover", p11, "--candidates", cand6, "--budget", "3"],
        ["recover", p11, "--candidates", cand6, "--budget", "2", "--method", "exact"],
        ["verify", p11, "--samples", "50", "--seed", "7"],
        ["reduce", sets5, "--keep", "2", "--out", out_path],
        ["reduce", sets5, "--keep", "0"],
    ]

    failures = 0
    for args in runs:
        proc = subprocess.run([cli, *args, "--json"], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"FAIL {' '.join(args)}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        report = json.loads(proc.stdout)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        if errors:
            print(f"FAIL {' '.join(args)}:")
            for err in errors:
                loc = "/".join(str(p) for p in err.path) or "<root>"
                print(f"  at {loc}: {err.message}")
            failures += 1
        else:
            print(f"ok   {' '.join(args)}")
    return failures


if __name__ == "__main__":
    sys.exit(main())
