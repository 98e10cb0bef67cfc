"""Command-line front end.

Subcommands: ``scan``, ``certify``, ``simulate``, ``noise-sweep``, ``hardy-check``.
Tables go to ``--out`` (or stdout); a short human summary goes to stderr.

Exit codes: 0 success, 2 configuration error, 3 a certified bound or the
Hardy implication failed, 4 enumeration infeasible.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .inequality import build_omega, omega_closed_form, term_count, violation_probability
from .lhv import DEFAULT_CEILING, EnumerationInfeasible, enumerate_bound, hardy_implication_check
from .noise import NoiseModel, critical_parameter, estimate_omega, noisy_omega

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BOUND_VIOLATED = 3
EXIT_INFEASIBLE = 4

COMMANDS = ("scan", "certify", "simulate", "noise-sweep", "hardy-check")
COLUMNS = {
    "scan": ("n", "omega", "p_v", "terms"),
    "certify": ("n", "max_value", "argmax_count", "strategies_searched"),
    "simulate": ("setting", "outcome", "count", "shots"),
    "noise-sweep": ("p", "omega_noisy"),
    "hardy-check": ("n", "strategies_searched", "survivors", "uniform_x", "p_all_equal", "p_v", "holds"),
}
NOISE_FLAGS = {"white": "white_noise", "loss": "photon_loss"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "scan"
    n: int = 3
    n_max: int | None = None
    noise: str | None = None
    p: float = 1.0
    p_grid: str = "0:1:11"
    shots: int = 100_000
    seed: int = 0
    format: str = "csv"
    out: str | None = None
    plot: str | None = None
    ceiling: int = DEFAULT_CEILING
    level: float = 0.99
    interval: str = "normal"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.n < 3:
            raise ConfigError(f"--n must be >= 3 for {self.command}, got {self.n}")
        if self.n_max is not None and self.n_max < self.n:
            raise ConfigError(f"empty range: --n-max {self.n_max} < --n {self.n}")
        if self.noise is not None and self.noise not in NOISE_FLAGS:
            raise ConfigError(f"--noise must be one of {sorted(NOISE_FLAGS)}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"--p must lie in [0, 1], got {self.p}")
        if self.shots < 1:
            raise ConfigError("--shots must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        if not 0 < self.level < 1:
            raise ConfigError("--level must lie in (0, 1)")
        if self.interval not in ("normal", "exact"):
            raise ConfigError("--interval must be normal or exact")
        if self.command == "noise-sweep":
            parse_grid(self.p_grid)
        return self

    @property
    def n_range(self) -> range:
        return range(self.n, (self.n_max if self.n_max is not None else self.n) + 1)

    def noise_model(self, p: float | None = None) -> NoiseModel | None:
        if self.noise is None:
            return None
        return NoiseModel(NOISE_FLAGS[self.noise], self.p if p is None else p)


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            grid = np.linspace(float(start), float(stop), int(count)).tolist()
        else:
            grid = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --p-grid {text!r}: {exc}") from None
    if not grid:
        raise ConfigError("--p-grid is empty")
    if any(not 0.0 <= v <= 1.0 for v in grid):
        raise ConfigError("--p-grid values must lie in [0, 1]")
    return grid


def r12(x: float) -> float:
    """Round to the 12 significant digits used in machine-readable output."""
    return float(f"{x:.12g}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def to_csv(columns: Sequence[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Parse a table emitted by :func:`to_csv` back into typed rows."""
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    return columns, [dict(zip(columns, (_parse_cell(c) for c in line))) for line in reader]


# --- commands: each returns (rows, extra-json, summary lines, exit code) ---


def scan_rows(cfg: RunConfig) -> list[dict]:
    return [
        {
            "n": n,
            "omega": r12(omega_closed_form(n)),
            "p_v": r12(violation_probability(n)),
            "terms": term_count(n),
        }
        for n in cfg.n_range
    ]


def cmd_scan(cfg: RunConfig):
    rows = scan_rows(cfg)
    summary = [f"n={r['n']:>3}  omega_W={r['omega']:.6g}  P_v={r['p_v']:.6g}" for r in rows]
    if cfg.plot:
        _plot(cfg.plot, [r["n"] for r in rows], [r["omega"] for r in rows], "n", "Omega_W")
    return rows, {}, summary, EXIT_OK


def cmd_certify(cfg: RunConfig):
    rows, certs, summary = [], [], []
    code = EXIT_OK
    for n in cfg.n_range:
        cert = enumerate_bound(build_omega(n), ceiling=cfg.ceiling)
        certs.append(cert.to_dict())
        rows.append(
            {
                "n": n,
                "max_value": r12(cert.max_value),
                "argmax_count": cert.argmax_count,
                "strategies_searched": cert.strategies_searched,
            }
        )
        ok = cert.max_value == 0
        summary.append(
            f"n={n}: max={cert.max_value:.6g} over {cert.strategies_searched} strategies "
            f"({cert.argmax_count} maximisers) {'OK' if ok else 'BOUND VIOLATED'}"
        )
        if not ok:
            code = EXIT_BOUND_VIOLATED
    return rows, {"certificates": certs}, summary, code


def cmd_simulate(cfg: RunConfig):
    est = estimate_omega(
        cfg.n, cfg.noise_model(), cfg.shots, seed=cfg.seed, level=cfg.level, method=cfg.interval
    )
    rows = [row for rec in est.records for row in rec.rows()]
    est_dict = {k: (r12(v) if isinstance(v, float) else v) for k, v in est.to_dict().items()}
    summary = [
        f"omega_hat={est.value:.6g}  {cfg.level:.0%} interval=[{est.lower:.6g}, {est.upper:.6g}]"
        f"  exact={est.exact_value:.6g}",
        f"verdict: {est.verdict}",
    ]
    return rows, {"estimate": est_dict}, summary, EXIT_OK


def cmd_noise_sweep(cfg: RunConfig):
    if cfg.n_max not in (None, cfg.n):
        raise ConfigError("noise-sweep takes a single --n")
    kind = NOISE_FLAGS[cfg.noise or "white"]
    grid = parse_grid(cfg.p_grid)
    p_star = critical_parameter(cfg.n, kind)
    # keyed by the printed value; the exact p* wins a collision
    points = {r12(p): p for p in grid}
    points[r12(p_star)] = p_star
    rows = [
        {"p": key, "omega_noisy": r12(noisy_omega(cfg.n, NoiseModel(kind, points[key])))}
        for key in sorted(points)
    ]
    summary = [f"p={r['p']:.6g}  omega={r['omega_noisy']:.6g}" + ("  <- p*" if r["p"] == r12(p_star) else "") for r in rows]
    if cfg.plot:
        _plot(cfg.plot, [r["p"] for r in rows], [r["omega_noisy"] for r in rows], "p", "Omega")
    return rows, {"critical_p": r12(p_star), "noise": kind}, summary, EXIT_OK


def cmd_hardy_check(cfg: RunConfig):
    rows, summary = [], []
    code = EXIT_OK
    for n in cfg.n_range:
        rep = hardy_implication_check(n, ceiling=cfg.ceiling)
        rows.append(
            {
                "n": n,
                "strategies_searched": rep.strategies_searched,
                "survivors": len(rep.survivors),
                "uniform_x": rep.all_survivors_uniform_x,
                "p_all_equal": r12(rep.quantum_all_equal_probability),
                "p_v": r12(rep.contradiction_probability),
                "holds": rep.holds,
            }
        )
        summary.append(
            f"n={n}: {len(rep.survivors)} local strategies survive, all with equal x: "
            f"{rep.all_survivors_uniform_x}; quantum P(all x equal)={rep.quantum_all_equal_probability:.6g}"
        )
        if not rep.holds:
            code = EXIT_BOUND_VIOLATED
    return rows, {}, summary, code


HANDLERS = {
    "scan": cmd_scan,
    "certify": cmd_certify,
    "simulate": cmd_simulate,
    "noise-sweep": cmd_noise_sweep,
    "hardy-check": cmd_hardy_check,
}


def _plot(path: str, xs, ys, xlabel: str, ylabel: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(xs, ys, "o-")
    ax.axhline(0.0, color="grey", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render(cfg: RunConfig, rows: list[dict], extra: dict) -> str:
    if cfg.format == "csv":
        return to_csv(COLUMNS[cfg.command], rows)
    config = {k: v for k, v in asdict(cfg).items() if k not in ("out", "plot")}
    key = "records" if cfg.command == "simulate" else "rows"
    doc = {"command": cfg.command, "config": config, key: rows, **extra, "version": __version__}
    return json.dumps(doc, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are None so that config-file values survive unless a flag is given
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--n", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--noise", choices=sorted(NOISE_FLAGS))
    common.add_argument("--p", type=float)
    common.add_argument("--p-grid")
    common.add_argument("--shots", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out")
    common.add_argument("--plot")
    common.add_argument("--ceiling", type=int)
    common.add_argument("--level", type=float)
    common.add_argument("--interval", choices=("normal", "exact"))

    parser = argparse.ArgumentParser(prog="wnonlocal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("scan", parents=[common], help="closed-form Omega_W and P_v over a range of n")
    sub.add_parser("certify", parents=[common], help="exhaustive classical bound")
    sub.add_parser("simulate", parents=[common], help="finite-shot Bell test")
    sub.add_parser("noise-sweep", parents=[common], help="noisy Omega over a parameter grid")
    sub.add_parser("hardy-check", parents=[common], help="exhaustive Hardy implication check")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        for k, v in raw.items():
            k = k.replace("-", "_")
            if k not in known:
                raise ConfigError(f"unknown config key {k!r}")
            values[k] = v
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            values[k] = v
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        rows, extra, summary, code = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except EnumerationInfeasible as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INFEASIBLE
    text = render(cfg, rows, extra)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    for line in summary:
        print(line, file=stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
