"""Command-line entry point: simulate | analyze | report | validate.

Every command is deterministic given identical inputs and an explicit
seed; each output directory receives exactly one ``manifest.json``
recording the command, config hash, seed, paths, tool version, and
wall-clock duration (the manifest is the only output file whose bytes
may differ between identical runs).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .dataset import IngestError, export, ingest, validate_dataset
from .experiments import (
    EXPERIMENT_IDS,
    AnalysisConfig,
    render_report_table,
    run_all,
    write_report_csv,
    write_report_json,
)
from .sim import (
    SimConfig,
    load_ground_truth,
    randomized_adversarial_scenario,
    run_simulation,
)

_SCENARIO_KEYS = {"n_treatment", "n_control", "days", "n_adversarial", "seed"}


class CliError(Exception):
    """User-facing error: message printed to stderr, exit status 1."""


def _sha256_json(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _load_json(path: Path, what: str) -> dict:
    if not path.exists():
        raise CliError(f"{what} not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{what} is not valid JSON: {path}: {exc}") from None
    if not isinstance(obj, dict):
        raise CliError(f"{what} must be a JSON object: {path}")
    return obj


def _write_manifest(out_dir: Path, payload: dict) -> Path:
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    scenario = None
    if args.config is not None:
        raw = _load_json(Path(args.config), "config file")
        scenario = raw.pop("scenario", None)
        if scenario is not None:
            if not isinstance(scenario, dict):
                raise CliError("config key 'scenario' must be an object")
            unknown = set(scenario) - _SCENARIO_KEYS
            if unknown:
                raise CliError(
                    f"unknown config key: scenario.{sorted(unknown)[0]}"
                )
        try:
            cfg = SimConfig.from_dict(raw)
        except (ValueError, TypeError) as exc:
            raise CliError(str(exc)) from None
    else:
        cfg = SimConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if scenario is not None:
        result = randomized_adversarial_scenario(cfg, **scenario)
    else:
        result = run_simulation(cfg)

    written = export(result.dataset, out_dir)
    gt_path = out_dir / "ground_truth.jsonl"
    result.ground_truth.write_jsonl(gt_path)
    written.append(gt_path)

    effective = result.config.to_dict()
    manifest = {
        "command": "simulate",
        "tool_version": __version__,
        "seed": result.config.seed,
        "config_sha256": _sha256_json(effective),
        "inputs": {"config": str(args.config) if args.config else None},
        "outputs": sorted(p.name for p in written),
        "event_log_hash": result.event_log_hash(),
        "duration_seconds": round(time.perf_counter() - started, 3),
    }
    if scenario is not None:
        manifest["scenario"] = {k: scenario[k] for k in sorted(scenario)}
    _write_manifest(out_dir, manifest)
    print(f"wrote {len(written)} dataset files to {out_dir}")
    return 0


def _parse_experiments(spec: str | None) -> list[str] | None:
    if spec is None:
        return None
    ids = [tok.strip() for tok in spec.split(",") if tok.strip()]
    if not ids:
        raise CliError("--experiments given but no ids supplied")
    for exp_id in ids:
        if exp_id not in EXPERIMENT_IDS:
            raise CliError(
                f"unknown experiment id: {exp_id!r} "
                f"(known: {', '.join(EXPERIMENT_IDS)})"
            )
    return ids


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    data_dir = Path(args.data)
    if not data_dir.is_dir():
        raise CliError(f"data directory not found: {data_dir}")
    if args.config is not None:
        raw = _load_json(Path(args.config), "config file")
        try:
            cfg = AnalysisConfig.from_dict(raw)
        except (ValueError, TypeError) as exc:
            raise CliError(str(exc)) from None
    else:
        cfg = AnalysisConfig()
    experiments = _parse_experiments(args.experiments)

    try:
        dataset = ingest(data_dir)
    except IngestError as exc:
        raise CliError(f"cannot ingest {data_dir}: {exc}") from None

    assignment = None
    gt_path = data_dir / "ground_truth.jsonl"
    if gt_path.exists():
        assignment = load_ground_truth(gt_path).assignment
    if experiments is not None and "f1" in experiments and assignment is None:
        raise CliError(
            "experiment f1 needs an assignment record "
            "(ground_truth.jsonl with a scenario assignment)"
        )

    run = run_all(dataset, args.seed, config=cfg, experiments=experiments,
                  assignment=assignment)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    csv_path = out_dir / "report.csv"
    write_report_json(run, json_path)
    write_report_csv(run, csv_path)
    manifest = {
        "command": "analyze",
        "tool_version": __version__,
        "seed": args.seed,
        "config_sha256": _sha256_json(cfg.to_dict()),
        "inputs": {"data": str(data_dir),
                   "config": str(args.config) if args.config else None},
        "outputs": [json_path.name, csv_path.name],
        "experiments": [rep.experiment_id for rep in run.reports],
        "duration_seconds": round(time.perf_counter() - started, 3),
    }
    _write_manifest(out_dir, manifest)
    n_flagged = sum(1 for rep in run.reports if rep.flags)
    print(f"wrote report for {len(run.reports)} pipelines to {out_dir}"
          + (f" ({n_flagged} with flags)" if n_flagged else ""))
    return 0


def cmd_report(args) -> int:
    path = Path(args.data)
    if not path.exists():
        raise CliError(f"report not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            run_dict = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed report {path}: {exc}") from None
    if not isinstance(run_dict, dict) or "reports" not in run_dict:
        raise CliError(f"malformed report {path}: missing 'reports' key")
    try:
        rendered = render_report_table(run_dict, args.format)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    sys.stdout.write(rendered)
    return 0


def cmd_validate(args) -> int:
    data_dir = Path(args.data)
    if not data_dir.is_dir():
        raise CliError(f"data directory not found: {data_dir}")
    try:
        dataset = ingest(data_dir)
    except IngestError as exc:
        print(f"ingest error: {exc}", file=sys.stderr)
        return 1
    violations = validate_dataset(dataset)
    for v in violations:
        entity = f" [{v.entity}]" if v.entity else ""
        print(f"{v.code}{entity}: {v.message}")
    if violations:
        print(f"{len(violations)} violation(s) found", file=sys.stderr)
        return 1
    print("dataset is valid")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artcolony",
        description="Simulate and analyze an image-first agent network.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the simulator and export a dataset")
    p_sim.add_argument("--config", help="simulation config JSON")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--seed", type=int, help="override the config seed")
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="run analysis pipelines over a dataset")
    p_an.add_argument("--data", required=True, help="dataset directory")
    p_an.add_argument("--out", required=True, help="output directory")
    p_an.add_argument("--seed", type=int, default=0, help="analysis seed (default 0)")
    p_an.add_argument("--experiments",
                      help="comma-separated pipeline ids (default: e1-e8,r1-r3)")
    p_an.add_argument("--config", help="analysis config JSON")
    p_an.set_defaults(func=cmd_analyze)

    p_rep = sub.add_parser("report", help="render a report.json as a table")
    p_rep.add_argument("--data", required=True, help="path to report.json")
    p_rep.add_argument("--format", default="text", help="text, csv, or json")
    p_rep.set_defaults(func=cmd_report)

    p_val = sub.add_parser("validate", help="check a dataset directory for violations")
    p_val.add_argument("--data", required=True, help="dataset directory")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
