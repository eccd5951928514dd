"""Run each dprob subcommand and validate its JSON output against schemas/."""

import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

STEP = '{"kind":"table","offset":-1,"pmf":[0.7,0.0,0.3]}'
GEO = '{"kind":"independent","dist":{"kind":"geometric","p":0.5},"shift":1}'

CASES = [
    ("moments", ["moments", "--dist", '{"kind":"poisson","lambda":1}', "--orders", "1,2,3"]),
    ("moments", ["moments", "--dist", STEP, "--orders", "1,2"]),
    ("moments", ["moments", "--dist", '{"kind":"negbin","r":2,"p":0.5}']),
    ("bound", ["bound", "--dist", '{"kind":"poisson","lambda":1}', "--x", "0.5,5,12"]),
    ("bound", ["bound", "--dist", '{"kind":"binomial","n":10,"p":0.3}', "--x", "3"]),
    ("identity", ["identity", "leq", "--x", '{"kind":"bernoulli","p":0.5}',
                  "--y", '{"kind":"geometric","p":0.4}']),
    ("identity", ["identity", "abel", "--dist", '{"kind":"poisson","lambda":2}', "--z", "0.75"]),
    ("identity", ["identity", "twoseq", "--pair", "geometric-demo"]),
    ("identity", ["identity", "twoseq", "--pair", "stopped-demo"]),
    ("walk", ["walk", "--step", STEP, "--replicates", "20000", "--orders", "1,2"]),
    ("stopped", ["stopped", "--model", "geometric-perturbed-bernoulli", "--rule", GEO,
                 "--replicates", "20000"]),
    ("stopped", ["stopped", "--rule", '{"kind":"threshold","level":4}', "--replicates", "5000"]),
    ("selftest", ["selftest", "--walk-replicates", "20000", "--stopped-replicates", "20000"]),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schemas", required=True)
    args = ap.parse_args()

    schemas = {}
    registry = Registry()
    for path in sorted(pathlib.Path(args.schemas).glob("*.schema.json")):
        doc = json.loads(path.read_text())
        schemas[path.name.split(".")[0]] = doc
        registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))

    failures = 0
    for name, argv in CASES:
        proc = subprocess.run([args.cli, *argv], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"FAIL {' '.join(argv)}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        report = json.loads(proc.stdout)
        validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for e in errors:
            print(f"FAIL {name}: {list(e.path)}: {e.message}")
        failures += bool(errors)

        # embedded descriptors must be accepted again as input
        if "distribution" in report:
            again = subprocess.run(
                [args.cli, "moments", "--dist", json.dumps(report["distribution"]), "--orders", "1"],
                capture_output=True, text=True)
            if again.returncode != 0:
                print(f"FAIL re-parse of {report['distribution']}: {again.stderr}")
                failures += 1

    print(f"{len(CASES)} cases, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
