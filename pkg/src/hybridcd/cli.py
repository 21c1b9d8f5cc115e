"""Command-line interface: ``simulate``, ``discover``, ``evaluate``, ``bench``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical degeneracy.

Any flag can also come from ``--config FILE``, a key-value file such as::

    method = nbcb-w
    gamma = 3
    seeds = 10

Keys use the long flag names with dashes or underscores; command-line flags
take precedence over the file.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .bench import ALL_METHODS, f1_scg, make_dataset, report_csv, report_table, run_benchmark
from .datagen import STRUCTURES, GenerationError, RickerParams, ScmSpec, gen_ricker, gen_structure
from .graph import GraphError, from_json, to_json
from .hybrid import METHODS, DiscoveryConfig, discover
from .stats import DataError, Dataset, DegenerateSeriesError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 2, 3, 4
STRUCTURE_IDS = sorted(STRUCTURES) + ["ricker"]
NOISE_IDS = ["uniform", "gaussian"]


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    truth: str | None = None
    gamma: int = 5
    alpha: float = 0.05
    method: list[str] = field(default_factory=lambda: ["nbcb-w"])
    structure: list[str] = field(default_factory=lambda: ["fork"])
    noise: str = "uniform"
    seed: int = 0
    seeds: int = 20
    T: int = 1000
    species: int = 5
    workers: int = 0


def truth_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".truth.json")


def _dump(obj, path: str | Path | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_simulate(cfg: RunConfig) -> int:
    structure = cfg.structure[0]
    if structure == "ricker":
        data, scg = gen_ricker(RickerParams(S=cfg.species, T=cfg.T, seed=cfg.seed))
        truth = {"scg": to_json(scg)}
    else:
        data, wcg, scg = gen_structure(ScmSpec(structure, noise=cfg.noise, T=cfg.T, seed=cfg.seed))
        truth = {"scg": to_json(scg), "wcg": to_json(wcg)}
    out = cfg.output or f"{structure}_{cfg.noise}_{cfg.seed}.csv"
    try:
        data.to_csv(out)
        _dump(truth, truth_path(out))
    except OSError as exc:
        raise DataError(f"cannot write {exc.filename}: {exc.strerror}") from None
    print(f"wrote {out} ({data.T} rows x {data.d} columns) and {truth_path(out)}")
    return EXIT_OK


def _read_csv(path: str | None) -> Dataset:
    if not path:
        raise DataError("an input CSV is required (--input)")
    if not Path(path).is_file():
        raise DataError(f"{path}: no such file")
    return Dataset.from_csv(path)


def cmd_discover(cfg: RunConfig) -> int:
    data = _read_csv(cfg.input)
    method = cfg.method[0]
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    result = discover(method, data, DiscoveryConfig(cfg.gamma, cfg.alpha))
    out = result.to_json()
    out["method"] = method
    _dump(out, cfg.output)
    print(result.scg, file=sys.stderr)
    return EXIT_OK


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None


def cmd_evaluate(cfg: RunConfig) -> int:
    if not cfg.input:
        raise UsageError("evaluate needs --input RESULT.json and --truth TRUTH.json")
    pred = _load_json(cfg.input)
    truth = _load_json(cfg.truth) if cfg.truth else None
    if truth is None:
        raise UsageError("evaluate needs --truth TRUTH.json")
    try:
        rep = f1_scg(from_json(pred["scg"]), from_json(truth["scg"]))
    except KeyError as exc:
        raise DataError(f"missing key {exc.args[0]!r} in graph JSON") from None
    _dump({"tp": rep.tp, "fp": rep.fp, "fn": rep.fn, "f1": rep.f1}, cfg.output)
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    for m in cfg.method:
        if m not in ALL_METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {list(ALL_METHODS)}")
    workers = cfg.workers or os.cpu_count() or 1
    reports = run_benchmark(cfg.method, cfg.structure, cfg.noise, cfg.seeds, cfg.T,
                            DiscoveryConfig(cfg.gamma, cfg.alpha), workers, cfg.species)
    print(report_table(reports))
    for r in reports:
        for msg in r.failures:
            print(f"warning: {r.method}/{r.structure} {msg}", file=sys.stderr)
    if cfg.output:
        Path(cfg.output).write_text(report_csv(reports))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "discover": cmd_discover,
            "evaluate": cmd_evaluate, "bench": cmd_bench}


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridcd", description=__doc__.split("\n")[0])
    p.add_argument("--config", help="key = value file supplying defaults for any flag")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, many=False):
        sp.add_argument("--gamma", type=int, help="maximal lag (default 5)")
        sp.add_argument("--alpha", type=float, help="significance level (default 0.05)")
        sp.add_argument("-o", "--output", help="output path (default: stdout or derived name)")
        if many:
            sp.add_argument("--method", nargs="+", help=f"methods among {list(ALL_METHODS)}")
            sp.add_argument("--structure", nargs="+", choices=STRUCTURE_IDS)

    s = sub.add_parser("simulate", help="generate a dataset CSV and its truth JSON")
    s.add_argument("--structure", choices=STRUCTURE_IDS, help="default fork")
    s.add_argument("--noise", choices=NOISE_IDS)
    s.add_argument("--seed", type=int)
    s.add_argument("--T", type=int, help="number of rows (default 1000)")
    s.add_argument("--species", type=int, help="species count for ricker (default 5)")
    s.add_argument("-o", "--output", help="CSV path; truth goes to <stem>.truth.json")

    d = sub.add_parser("discover", help="run a hybrid method on a CSV")
    d.add_argument("-i", "--input", help="dataset CSV (header row of names)")
    d.add_argument("--method", choices=sorted(METHODS), help="default nbcb-w")
    common(d)

    e = sub.add_parser("evaluate", help="score a discovery result against a truth JSON")
    e.add_argument("-i", "--input", help="result JSON written by discover")
    e.add_argument("--truth", help="truth JSON written by simulate")
    e.add_argument("-o", "--output")

    b = sub.add_parser("bench", help="multi-seed benchmark sweep")
    common(b, many=True)
    b.add_argument("--noise", choices=NOISE_IDS)
    b.add_argument("--seeds", type=int, help="number of seeds 0..n-1 (default 20)")
    b.add_argument("--T", type=int)
    b.add_argument("--species", type=int)
    b.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    return p


_LIST_KEYS = {"method", "structure"}


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror}") from None
    cp.read_string("[run]\n" + text)
    out = {}
    for key, raw in cp["run"].items():
        key = key.replace("-", "_")
        if key == "t":
            key = "T"
        if key not in RunConfig.__dataclass_fields__ or key == "command":
            raise UsageError(f"unknown config key {key!r} in {path}")
        out[key] = raw.split() if key in _LIST_KEYS else raw
    return out


def make_config(args: argparse.Namespace) -> RunConfig:
    values = _read_config(args.config) if args.config else {}
    for key in RunConfig.__dataclass_fields__:
        v = getattr(args, key, None)
        if v is not None and key != "command":
            values[key] = [v] if key in _LIST_KEYS and isinstance(v, str) else v
    cfg = RunConfig(args.command)
    for key, v in values.items():
        default = getattr(cfg, key)
        if isinstance(default, bool) or default is None or isinstance(v, list):
            setattr(cfg, key, v)
        else:
            try:
                setattr(cfg, key, type(default)(v))
            except ValueError:
                raise UsageError(f"bad value {v!r} for {key}") from None
    if cfg.gamma < 1 or not 0 < cfg.alpha < 1 or cfg.T < 1 or cfg.seeds < 1:
        raise UsageError("need gamma >= 1, 0 < alpha < 1, T >= 1 and seeds >= 1")
    if cfg.noise not in NOISE_IDS:
        raise UsageError(f"unknown noise {cfg.noise!r}")
    for s in cfg.structure:
        if s not in STRUCTURE_IDS:
            raise UsageError(f"unknown structure {s!r}")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)   # exits with 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateSeriesError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataError, GraphError, GenerationError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
