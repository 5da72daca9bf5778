"""Command-line front end: placements, regime classification, sweeps, validation.

All SNRs enter in dB here and are converted to linear scale once.

Exit codes: 0 success, 1 validation failure, 2 invalid input, 3 budget refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
import warnings
from dataclasses import asdict, dataclass, fields
from typing import Sequence

from . import __version__
from .ber_model import ChannelParams, file_ber
from .greedy import greedy_place, m_round_greedy
from .montecarlo import simulate_file_ber
from .oracle import DEFAULT_BUDGET, BudgetExceeded, count_candidates, exhaustive_optimal
from .placement import average_ber, doubly_placement, even_placement, single_file_placement
from .popularity import zipf
from .regimes import classify

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3
HIGH_SNR_DB = 30.0
FORMATS = ("table", "csv", "json")


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class RunConfig:
    helpers: int = 10
    files: int = 20
    gamma: float = 0.6
    rho_db: float = 15.0
    beta_db: float | None = None
    nu_db: float | None = None
    per_helper: int = 1
    trials: int = 1_000_000
    seed: int = 0
    format: str = "table"
    high_snr: bool | None = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.beta_db is None and self.nu_db is None:
            self.beta_db = 5.0

    def validate(self) -> "RunConfig":
        if self.beta_db is not None and self.nu_db is not None:
            raise ConfigError("beta_db", "give exactly one of beta_db and nu_db")
        for name in ("helpers", "files", "per_helper", "trials", "budget"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError("seed", f"must be a non-negative integer, got {self.seed!r}")
        for name in ("gamma", "rho_db", "beta_db", "nu_db"):
            value = getattr(self, name)
            if value is not None and not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigError(name, f"must be a finite number, got {value!r}")
        if self.gamma < 0:
            raise ConfigError("gamma", f"must be non-negative, got {self.gamma}")
        if self.per_helper > self.files:
            raise ConfigError("per_helper", f"{self.per_helper} distinct files per helper exceed the library of {self.files}")
        if self.format not in FORMATS:
            raise ConfigError("format", f"must be one of {', '.join(FORMATS)}, got {self.format!r}")
        return self

    def channel(self) -> ChannelParams:
        rho = db_to_linear(self.rho_db)
        if self.nu_db is not None:
            return ChannelParams(rho, db_to_linear(self.nu_db))
        return ChannelParams.from_beta(rho, db_to_linear(self.beta_db))

    def popularity(self):
        return zipf(self.files, self.gamma)

    def is_high_snr(self) -> bool:
        return self.rho_db >= HIGH_SNR_DB if self.high_snr is None else self.high_snr


_FIELDS = {f.name for f in fields(RunConfig)}


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a JSON object")
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration field")
    return data


def _apply_layer(merged: dict, layer: dict) -> None:
    if "beta_db" in layer and "nu_db" in layer and layer["beta_db"] is not None and layer["nu_db"] is not None:
        raise ConfigError("beta_db", "give exactly one of beta_db and nu_db")
    # choosing one SNR ratio form overrides the other from lower-precedence layers
    if layer.get("beta_db") is not None:
        merged.pop("nu_db", None)
    if layer.get("nu_db") is not None:
        merged.pop("beta_db", None)
    merged.update({k: v for k, v in layer.items() if v is not None})


def build_config(args: argparse.Namespace, base: dict | None = None) -> RunConfig:
    """Defaults < ``base`` (command-specific defaults) < config file < command-line flags."""
    merged: dict = dict(base or {})
    if args.config:
        _apply_layer(merged, _load_config_file(args.config))
    _apply_layer(merged, {name: getattr(args, name, None) for name in _FIELDS})
    return RunConfig(**merged).validate()


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6e}" if value != 0 and (abs(value) < 1e-3 or abs(value) >= 1e4) else f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(str(v) for v in value) + "]"
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _emit_records(records: list[dict], fmt: str, out=None) -> None:
    out = sys.stdout if out is None else out
    if fmt == "json":
        json.dump(_json_safe(records if len(records) != 1 else records[0]), out, indent=2)
        out.write("\n")
        return
    if not records:
        return
    header = list(records[0])
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for r in records:
            writer.writerow([json.dumps(v) if isinstance(v, (list, dict)) else (repr(v) if isinstance(v, float) else v) for v in r.values()])
        return
    rows = [[_fmt(r.get(h, "")) for h in header] for r in records]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for row in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _emit_mapping(record: dict, fmt: str, out=None) -> None:
    out = sys.stdout if out is None else out
    if fmt == "table":
        width = max(len(k) for d in (record, *(v for v in record.values() if isinstance(v, dict))) for k in d)
        for k, v in record.items():
            if isinstance(v, dict):
                out.write(f"{k}:\n")
                for kk, vv in v.items():
                    out.write(f"  {kk.ljust(width)}  {_fmt(vv)}\n")
            else:
                out.write(f"{k.ljust(width)}  {_fmt(v)}\n")
    else:
        _emit_records([record], fmt, out)


# ---------------------------------------------------------------------------
# commands


def cmd_place(cfg: RunConfig, trace: bool = False, out=None) -> int:
    out = sys.stdout if out is None else out
    ch, pop = cfg.channel(), cfg.popularity()
    N, M = cfg.helpers, cfg.per_helper
    record: dict = {"helpers": N, "files": cfg.files, "per_helper": M, "gamma": cfg.gamma, "rho_db": cfg.rho_db, "beta": ch.beta}
    if M == 1:
        placement, tr = greedy_place(N, pop, ch)
        record.update(counts=placement.to_list(), average_ber=average_ber(placement, pop, ch), certified=tr.certified)
        if not tr.certified and count_candidates(N, cfg.files) <= cfg.budget:
            report = exhaustive_optimal(N, pop, ch, budget=cfg.budget)
            record.update(oracle_counts=report.best.to_list(), oracle_ber=report.best_ber)
    else:
        placement, assignment = m_round_greedy(N, M, pop, ch)
        tr = None
        record.update(
            counts=placement.to_list(),
            average_ber=average_ber(placement, pop, ch),
            certified=False,
            assignment=[list(files) for files in assignment.per_helper],
            assignment_method=assignment.method,
        )
    if not ch.helpers_stronger:
        record["note"] = "beta <= 1: helpers are not stronger than the macro cell"
    if trace and tr is not None:
        if cfg.format == "json":
            record["trace"] = [s._asdict() for s in tr.steps]
        elif cfg.format == "csv":
            out.write(tr.to_csv())
            return EXIT_OK
    _emit_mapping(record, cfg.format, out)
    if trace and tr is not None and cfg.format == "table":
        out.write("\n")
        _emit_records([s._asdict() for s in tr.steps], "table", out)
    return EXIT_OK


def cmd_classify(cfg: RunConfig, out=None) -> int:
    ch, pop = cfg.channel(), cfg.popularity()
    if cfg.helpers < 2:
        raise ConfigError("helpers", "classification needs at least 2 helpers")
    result = classify(cfg.helpers, pop, ch, cfg.is_high_snr())
    record = {"gamma": cfg.gamma, "beta": ch.beta, "high_snr": cfg.is_high_snr(), **result.to_dict()}
    _emit_mapping(record, cfg.format, out)
    return EXIT_OK


_DOUBLY = re.compile(r"^doubly(?:\((\d+|best)\)|:(\d+|best))?$")


def parse_strategies(text: str, N: int) -> list[str]:
    out = []
    for token in (t.strip() for t in text.split(",") if t.strip()):
        m = _DOUBLY.match(token)
        if token in ("optimal", "greedy", "even", "single"):
            out.append(token)
        elif m:
            k = m.group(1) or m.group(2) or "best"
            if k != "best" and not 0 <= int(k) <= N // 2:
                raise ConfigError("strategies", f"doubly k must lie in 0..{N // 2}, got {k}")
            out.append(f"doubly({k})")
        else:
            raise ConfigError("strategies", f"unknown strategy {token!r}")
    if not out:
        raise ConfigError("strategies", "no strategy given")
    return out


def parse_axis_values(text: str) -> list[float]:
    """``START:STOP:STEP`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("range", f"cannot parse {text!r}; use START:STOP:STEP or v1,v2,...") from None
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("range", "values must be non-empty and strictly increasing")
    return values


def _strategy_ber(strategy: str, N: int, pop, ch, budget: int) -> tuple[float, str]:
    F = pop.library_size
    if strategy == "optimal":
        if count_candidates(N, F) <= budget:
            return exhaustive_optimal(N, pop, ch, budget=budget).best_ber, "oracle"
        placement, tr = greedy_place(N, pop, ch)
        return average_ber(placement, pop, ch), "greedy-certified" if tr.certified else "greedy-uncertified"
    if strategy == "greedy":
        return average_ber(greedy_place(N, pop, ch)[0], pop, ch), ""
    if strategy == "even":
        return average_ber(even_placement(N, F), pop, ch), ""
    if strategy == "single":
        return average_ber(single_file_placement(N, F), pop, ch), ""
    k = strategy[len("doubly(") : -1]
    if k == "best":
        candidates = [kk for kk in range(1, N // 2 + 1) if N - kk <= F] or [0]
        best = min(candidates, key=lambda kk: average_ber(doubly_placement(kk, N, F), pop, ch))
        return average_ber(doubly_placement(best, N, F), pop, ch), f"k={best}"
    return average_ber(doubly_placement(int(k), N, F), pop, ch), ""


def sweep_rows(cfg: RunConfig, axis: str, values: Sequence[float], strategies: Sequence[str]) -> list[dict]:
    """One row per axis value with the closed-form average BER of each strategy."""
    rows = []
    for v in values:
        point = RunConfig(**{**asdict(cfg), axis: v}).validate()
        ch, pop = point.channel(), point.popularity()
        row: dict = {axis: v}
        for s in strategies:
            ber, note = _strategy_ber(s, point.helpers, pop, ch, point.budget)
            row[s] = ber
            if s == "optimal":
                row["optimal_source"] = note
            elif s == "doubly(best)":
                row["doubly_best_k"] = int(note[2:])
        rows.append(row)
    return rows


def cmd_sweep(cfg: RunConfig, axis: str, values: Sequence[float], strategies: Sequence[str], out=None) -> int:
    if cfg.per_helper != 1:
        raise ConfigError("per_helper", "sweeps compare single-file-per-helper strategies; use per_helper=1")
    if axis == "gamma" and values[0] < 0:
        raise ConfigError("range", "gamma must be non-negative")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = sweep_rows(cfg, axis, values, strategies)
    _emit_records(rows, cfg.format, out)
    return EXIT_OK


GRIDS = {
    "small": {
        "helpers": range(1, 7),
        "files": (8,),
        "gamma": (0.0, 0.6, 1.0, 2.0),
        "rho": (1.0, 31.62, 1e4),
        "beta": (2.0, 3.162, 10.0, 1.5),
        "mc_rho": (1.0, 3.162, 31.62),
        "mc_n": (0, 1, 2, 3),
    },
    "full": {
        "helpers": range(1, 9),
        "files": tuple(range(2, 13)),
        "gamma": (0.0, 0.3, 0.6, 1.0, 2.0, 5.0),
        "rho": (1.0, 3.162, 31.62, 1e4),
        "beta": (2.0, 3.162, 10.0, 1.5),
        "mc_rho": (1.0, 3.162, 31.62),
        "mc_n": (0, 1, 2, 3, 5),
    },
}


def validation_checks(cfg: RunConfig, grid: str) -> list[dict]:
    """Greedy-versus-oracle and Monte-Carlo-versus-closed-form checks."""
    g = GRIDS[grid]
    results = []
    for N in g["helpers"]:
        for F in g["files"]:
            if F < N:
                continue
            for gamma in g["gamma"]:
                pop = zipf(F, gamma)
                for rho in g["rho"]:
                    for beta in g["beta"]:
                        ch = ChannelParams.from_beta(rho, beta)
                        greedy_ber = average_ber(greedy_place(N, pop, ch)[0], pop, ch)
                        report = exhaustive_optimal(N, pop, ch, budget=cfg.budget)
                        gap = greedy_ber - report.best_ber
                        status = ("pass" if abs(gap) <= 1e-12 else "fail") if ch.certified else "reported"
                        results.append(
                            {
                                "check": "greedy_vs_oracle",
                                "params": f"N={N} F={F} gamma={gamma} rho={rho} beta={beta}",
                                "status": status,
                                "detail": gap,
                            }
                        )
    for rho in g["mc_rho"]:
        ch = ChannelParams.from_beta(rho, cfg.channel().beta)
        for n in g["mc_n"]:
            est = simulate_file_ber(n, ch, cfg.trials, cfg.seed)
            exact = file_ber(n, ch)
            z = (est.mean - exact) / est.std_error if est.std_error > 0 else 0.0
            results.append(
                {
                    "check": "montecarlo_vs_closed_form",
                    "params": f"n={n} rho={rho} trials={cfg.trials} seed={cfg.seed}",
                    "status": "pass" if abs(z) <= 4.0 else "fail",
                    "detail": z,
                }
            )
    return results


def cmd_validate(cfg: RunConfig, grid: str = "small", out=None) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = validation_checks(cfg, grid)
    _emit_records(results, cfg.format, out)
    failed = sum(r["status"] == "fail" for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed or reported, {failed} failed", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON file with RunConfig fields")
    p.add_argument("--helpers", type=int, metavar="N", help="number of helpers (default 10)")
    p.add_argument("--files", type=int, metavar="F", help="library size (default 20)")
    p.add_argument("--gamma", type=float, help="Zipf exponent (default 0.6)")
    p.add_argument("--rho-db", dest="rho_db", type=float, help="mean cluster SNR in dB (default 15)")
    ratio = p.add_mutually_exclusive_group()
    ratio.add_argument("--beta-db", dest="beta_db", type=float, help="cluster/cellular SNR ratio in dB (default 5)")
    ratio.add_argument("--nu-db", dest="nu_db", type=float, help="mean cellular SNR in dB")
    p.add_argument("--per-helper", dest="per_helper", type=int, metavar="M", help="files per helper (default 1)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials (default 1e6)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (default 0)")
    p.add_argument("--budget", type=int, help=f"exhaustive-search candidate limit (default {DEFAULT_BUDGET})")
    p.add_argument("--format", choices=FORMATS, help="output format (default table; csv for sweep)")
    snr = p.add_mutually_exclusive_group()
    snr.add_argument("--high-snr", dest="high_snr", action="store_const", const=True, help="use high-SNR results")
    snr.add_argument("--no-high-snr", dest="high_snr", action="store_const", const=False)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="femtocache", description="BER-optimal caching placement for femto-caching clusters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("place", help="greedy placement (M-round when --per-helper > 1)")
    _add_common(p)
    p.add_argument("--trace", action="store_true", help="print the per-iteration greedy trace")

    p = sub.add_parser("classify", help="closed-form regime and Zipf thresholds")
    _add_common(p)

    p = sub.add_parser("sweep", help="average BER of several strategies along one axis")
    _add_common(p)
    p.add_argument("--axis", choices=("rho_db", "gamma"), required=True)
    p.add_argument("--range", dest="axis_range", required=True, metavar="SPEC", help="START:STOP:STEP or v1,v2,...")
    p.add_argument(
        "--strategies",
        default="optimal,greedy,even,single,doubly(best)",
        help="comma list of optimal, greedy, even, single, doubly(k), doubly(best)",
    )

    p = sub.add_parser("validate", help="greedy-vs-oracle and Monte Carlo checks")
    _add_common(p)
    p.add_argument("--grid", choices=sorted(GRIDS), default="small")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args, {"format": "csv"} if args.command == "sweep" else None)
        if args.command == "place":
            return cmd_place(cfg, trace=args.trace)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "sweep":
            values = parse_axis_values(args.axis_range)
            return cmd_sweep(cfg, args.axis, values, parse_strategies(args.strategies, cfg.helpers))
        return cmd_validate(cfg, args.grid)
    except ConfigError as exc:
        print(f"femtocache: invalid {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"femtocache: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"femtocache: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
