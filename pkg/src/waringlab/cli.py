"""Batch front-end: experiment configs in, CSV/JSON reports out.

Subcommands: count, convergence, verify, vaaler-check, vinogradov,
defaults.  Exit status contract: 0 all good, 1 suite failure, 2 config
error.  Identical configuration (including seed and parallelism) produces
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import repcount, vaaler, verify
from .majorarc import MainTermConvention, gamma_main_term
from .expsum import vinogradov_integral, bdg_bound
from .pseudopoly import (DomainError, ParseError, PseudoPolynomial,
                         theorem_constants)

DEFAULTS = {
    "polynomial": "x^3/2",
    "s": 2,
    "n_start": 1,
    "n_end": 1000,
    "points": 10,
    "window": 1000,
    "v": None,
    "convention": "s_over_theta",
    "samples": 1000,
    "H": 16,
    "B": 8,
    "seed": None,
    "jobs": 1,
    "tolerance_scale": 1.0,
    "out": None,
}

_CONVENTIONS = {
    "s_over_theta": MainTermConvention.GAMMA_S_OVER_THETA,
    "s_plus_one_over_theta": MainTermConvention.GAMMA_S_PLUS_ONE_OVER_THETA,
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    polynomial: str = DEFAULTS["polynomial"]
    s: int = DEFAULTS["s"]
    n_start: int = DEFAULTS["n_start"]
    n_end: int = DEFAULTS["n_end"]
    points: int = DEFAULTS["points"]
    window: int = DEFAULTS["window"]
    v: float | None = DEFAULTS["v"]
    convention: str = DEFAULTS["convention"]
    samples: int = DEFAULTS["samples"]
    H: int = DEFAULTS["H"]
    B: int = DEFAULTS["B"]
    seed: int | None = DEFAULTS["seed"]
    jobs: int = DEFAULTS["jobs"]
    tolerance_scale: float = DEFAULTS["tolerance_scale"]
    out: str | None = DEFAULTS["out"]
    only: str | None = None
    k: int = 2
    n_list: list[int] = field(default_factory=lambda: [8, 12, 16])
    intervals: int = 20
    H_list: list[int] = field(default_factory=lambda: [4, 16, 64])
    grid: int = 10000

    def parsed_polynomial(self) -> PseudoPolynomial:
        try:
            return PseudoPolynomial.parse(self.polynomial)
        except (ParseError, DomainError) as exc:
            raise ConfigError(f"polynomial: {exc}") from exc

    def parsed_convention(self) -> MainTermConvention:
        if self.convention not in _CONVENTIONS:
            raise ConfigError(
                f"convention: expected one of {sorted(_CONVENTIONS)}, "
                f"got {self.convention!r}")
        return _CONVENTIONS[self.convention]

    def validate_common(self):
        if self.s < 1:
            raise ConfigError(f"s: must be >= 1, got {self.s}")
        if self.n_start < 0 or self.n_end < self.n_start:
            raise ConfigError(
                f"n_start/n_end: need 0 <= n_start <= n_end, got "
                f"{self.n_start}..{self.n_end}")
        if self.jobs < 1:
            raise ConfigError(f"jobs: must be >= 1, got {self.jobs}")


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: {exc}") from exc
        for key, value in doc.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"config: unknown field {key!r}")
            setattr(cfg, key, value)
    for key in vars(cfg):
        if hasattr(args, key) and getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    return cfg


def _open_out(cfg):
    if cfg.out is None:
        return sys.stdout, False
    return open(cfg.out, "w", newline=""), True


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_count(cfg: ExperimentConfig) -> int:
    cfg.validate_common()
    if cfg.s < 2:
        raise ConfigError("s: count needs s >= 2 (main term is defined for s >= 2)")
    f = cfg.parsed_polynomial()
    conv = cfg.parsed_convention()
    counts = repcount.counts_vector(f, cfg.n_end)
    table = repcount.rep_count_exact(counts, cfg.s, cfg.n_end)
    fh, close = _open_out(cfg)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "r", "main_term", "ratio"])
        for N in range(cfg.n_start, cfg.n_end + 1):
            r = int(table.values[N])
            main = gamma_main_term(f, cfg.s, max(N, 1), conv)
            ratio = r / main if main else ""
            w.writerow([N, r, repr(main), repr(ratio) if ratio != "" else ""])
    finally:
        if close:
            fh.close()
    return 0


def cmd_convergence(cfg: ExperimentConfig) -> int:
    cfg.validate_common()
    if cfg.s < 2:
        raise ConfigError("s: convergence needs s >= 2")
    if cfg.points < 2:
        raise ConfigError(f"points: need >= 2, got {cfg.points}")
    f = cfg.parsed_polynomial()
    _, s_min = theorem_constants(f)
    below = cfg.s < s_min
    n_top = cfg.n_end + cfg.window
    counts = repcount.counts_vector(f, n_top)
    table = repcount.rep_count_exact(counts, cfg.s, n_top)
    grid = np.unique(np.geomspace(max(cfg.n_start, 1), cfg.n_end,
                                  cfg.points).astype(int))
    fh, close = _open_out(cfg)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "mean_count", "ratio_s_over_theta",
                    "ratio_s_plus_one_over_theta", "below_theorem_threshold"])
        for N0 in grid:
            Ns = np.arange(N0, N0 + cfg.window)
            r = table.values[N0:N0 + cfg.window].astype(np.float64)
            m_win = np.array([gamma_main_term(f, cfg.s, int(n),
                                              MainTermConvention.GAMMA_S_OVER_THETA)
                              for n in Ns])
            m_alt = np.array([gamma_main_term(f, cfg.s, int(n),
                                              MainTermConvention.GAMMA_S_PLUS_ONE_OVER_THETA)
                              for n in Ns])
            w.writerow([int(N0), repr(float(np.mean(r))),
                        repr(float(np.mean(r / m_win))),
                        repr(float(np.mean(r / m_alt))),
                        "yes" if below else "no"])
    finally:
        if close:
            fh.close()
    return 0


def cmd_verify(cfg: ExperimentConfig) -> int:
    cfg.validate_common()
    try:
        report = verify.run_suite(only=cfg.only,
                                  tolerance_scale=cfg.tolerance_scale,
                                  jobs=cfg.jobs)
    except KeyError as exc:
        raise ConfigError(f"only: {exc}") from exc
    fh, close = _open_out(cfg)
    try:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    return 0 if report["pass"] else 1


def cmd_vaaler_check(cfg: ExperimentConfig) -> int:
    cfg.validate_common()
    seed = cfg.seed if cfg.seed is not None else 20260810
    rng = np.random.default_rng(seed)
    grid = (np.linspace(0.0, 1.0, cfg.grid, endpoint=False)
            + 0.5 / cfg.grid)
    rows = []
    worst = -np.inf
    for _ in range(cfg.intervals):
        a, b = sorted(rng.uniform(0.0, 1.0, 2))
        for H in cfg.H_list:
            rep = vaaler.check_vaaler_error((float(a), float(b)), int(H), grid)
            worst = max(worst, rep.quantity)
            rows.append({"left": float(a), "right": float(b), "H": int(H),
                         "worst_violation": rep.quantity})
    ok = worst <= 1e-12
    doc = {"pass": bool(ok), "seed": seed, "grid": cfg.grid,
           "worst_violation": float(worst), "cases": rows}
    fh, close = _open_out(cfg)
    try:
        json.dump(doc, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    return 0 if ok else 1


def cmd_vinogradov(cfg: ExperimentConfig) -> int:
    if cfg.s < 1:
        raise ConfigError(f"s: must be >= 1, got {cfg.s}")
    if cfg.k < 1:
        raise ConfigError(f"k: must be >= 1, got {cfg.k}")
    fh, close = _open_out(cfg)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "k", "N", "count", "growth_bound"])
        for N in cfg.n_list:
            cnt = vinogradov_integral(cfg.s, cfg.k, int(N)).count
            bb = bdg_bound(cfg.s, max(cfg.k, 2), int(N), 0.0)
            w.writerow([cfg.s, cfg.k, int(N), cnt, repr(bb)])
    finally:
        if close:
            fh.close()
    return 0


def cmd_defaults(cfg: ExperimentConfig) -> int:
    del cfg
    json.dump(DEFAULTS, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waringlab",
        description="Exact counting and bound verification for Waring-type "
                    "sums of floors of pseudo-polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags override)")
        p.add_argument("--poly", "--polynomial", dest="polynomial",
                       help="pseudo-polynomial literal, e.g. '2*x^2.5 + 1*x^1'")
        p.add_argument("-s", type=int, dest="s")
        p.add_argument("--v", type=float, dest="v")
        p.add_argument("--out", dest="out")
        p.add_argument("--seed", type=int, dest="seed")
        p.add_argument("--jobs", type=int, dest="jobs")

    p = sub.add_parser("count", help="exact r_{f,s}(N) table with main term")
    common(p)
    p.add_argument("--n-start", type=int, dest="n_start")
    p.add_argument("--n-end", type=int, dest="n_end")
    p.add_argument("--convention", choices=sorted(_CONVENTIONS), dest="convention")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("convergence", help="windowed count/main-term ratios")
    common(p)
    p.add_argument("--n-start", type=int, dest="n_start")
    p.add_argument("--n-end", type=int, dest="n_end")
    p.add_argument("--points", type=int, dest="points")
    p.add_argument("--window", type=int, dest="window")
    p.add_argument("--convention", choices=sorted(_CONVENTIONS), dest="convention")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("verify", help="run the bound-verification suite")
    common(p)
    p.add_argument("--only", dest="only",
                   help=f"single section; one of {sorted(verify.SECTIONS)}")
    p.add_argument("--tolerance-scale", type=float, dest="tolerance_scale",
                   help="scale acceptance tolerances (below 1 tightens)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("vaaler-check", help="indicator-approximant error sweep")
    common(p)
    p.add_argument("--intervals", type=int, dest="intervals")
    p.add_argument("--H-list", type=_int_list, dest="H_list")
    p.add_argument("--grid", type=int, dest="grid")
    p.set_defaults(func=cmd_vaaler_check)

    p = sub.add_parser("vinogradov", help="exact mean-value solution counts")
    common(p)
    p.add_argument("-k", type=int, dest="k")
    p.add_argument("--n-list", type=_int_list, dest="n_list")
    p.set_defaults(func=cmd_vinogradov)

    p = sub.add_parser("defaults", help="print embedded defaults as JSON")
    p.set_defaults(func=cmd_defaults)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
