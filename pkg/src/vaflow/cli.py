"""``vaflow`` command line.

    vaflow run --experiment NAME [--config FILE] [--out DIR] [--set KEY=VALUE ...]
    vaflow list

Exit codes: 0 success, 1 an algorithm failed during the run, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench.experiments import DEFAULTS, EXPERIMENTS, ExperimentSpec, run_experiment
from .errors import InvalidInput


class UsageError(Exception):
    pass


def parse_value(text: str):
    """JSON first; comma lists and bare strings as fallbacks."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        return [parse_value(part.strip()) for part in text.split(",")]
    return text


def parse_sets(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = parse_value(value.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vaflow", description="VA-Flow experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--experiment", choices=EXPERIMENTS, help="experiment name (or 'name' in --config)")
    run.add_argument("--config", help="JSON file with name/overrides/output_dir/seed")
    run.add_argument("--out", help="output directory (default: out)")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override; repeatable")
    run.add_argument("--seed", type=int, help="seed recorded with the run")

    sub.add_parser("list", help="show experiments and their default parameters")
    return parser


def make_spec(args) -> ExperimentSpec:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
    if args.experiment:
        data["name"] = args.experiment
    if "name" not in data:
        raise UsageError("give --experiment or a config with 'name'")
    overrides = dict(data.get("overrides") or {})
    overrides.update(parse_sets(args.set))
    data["overrides"] = overrides
    if args.out:
        data["output_dir"] = args.out
    if args.seed is not None:
        data["seed"] = args.seed
    return ExperimentSpec.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "list":
        for name in EXPERIMENTS:
            print(name)
            for key, value in DEFAULTS[name].items():
                print(f"  {key} = {json.dumps(value)}")
        return 0

    try:
        spec = make_spec(args)
    except (UsageError, InvalidInput, TypeError) as exc:
        print(f"vaflow: error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_experiment(spec)
    except OSError as exc:
        print(f"vaflow: cannot write outputs: {exc}", file=sys.stderr)
        return 1
    for key, path in sorted(result.files.items()):
        print(f"{key}: {path}")
    if not result.ok:
        for f in result.failures:
            print(f"vaflow: {f['algorithm']} failed: {f['error']}: {f['message']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
