"""Runs cheap subcommands and validates every JSON report against the schema.

usage: validate_reports.py <heisenmag executable> <schema file>
"""
import json
import subprocess
import sys

import jsonschema

COMMANDS = [
    ["constant"],
    ["uniform-bottom", "--b", "0.5", "2", "8"],
    ["fiber-hardy", "--alpha", "0.5", "--nr", "32", "--nz", "32", "--rmax", "6", "--zmax", "6"],
    ["sharpness", "--alpha", "0.5", "0.1", "--n-list", "10", "100"],
    ["identities", "--points", "20", "--timings"],
    ["folland-stein", "--alpha", "0.5", "--k-list", "4", "16"],
    ["log-hardy"],
    ["verify", "--criteria", "1", "5", "9"],
    ["verify", "--criteria", "3", "--tamper-constant", "0.01"],
]


def main():
    exe, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failed = 0
    for args in COMMANDS:
        proc = subprocess.run([exe, *args], capture_output=True, text=True, encoding="utf-8")
        if proc.returncode not in (0, 1):
            print(f"{' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
            failed += 1
            continue
        report = json.loads(proc.stdout)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for e in errors:
            print(f"{' '.join(args)}: {list(e.path)}: {e.message}")
        failed += bool(errors)
        # exit status mirrors the envelope verdict
        if (proc.returncode == 0) != (report["verdict"] == "pass"):
            print(f"{' '.join(args)}: exit {proc.returncode} but verdict {report['verdict']}")
            failed += 1
        print(f"{' '.join(args)}: {'ok' if not errors else 'INVALID'}")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
