"""Command-line driver.

Subcommands: sample-bm, sample-fgf, fk-compare, fernique, verify.  Outputs
go to ``--out`` (atomically) or stdout.  ``CWIENER_SEED`` overrides
``--seed`` when set.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .io import NaNDetectedError, atomic_write_text, check_finite, json_text
from .rng import Stream
from .stats import K_SIGMA

SEED_ENV = "CWIENER_SEED"
MAX_SEED = (1 << 64) - 1
REPORT_COMMANDS = {"fk-compare", "fernique", "verify"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; ``None`` means the command's default."""

    command: str
    seed: int = 42
    samples: int | None = None
    trunc: int | None = None
    domain: str = "interval:1"
    s: float = 0.5
    T: float | None = None
    grid: int | None = None
    extent: float = 6.0
    alpha: float = 0.1
    k_sigma: float = K_SIGMA
    out: str = "-"
    format: str | None = None
    fk_sign: float = -1.0
    workers: int = 1
    only: tuple[int, ...] = ()
    trotter_steps: int = 64

    def __post_init__(self):
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for name in ("samples", "trunc", "grid"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"--{name} must be >= 1")
        if self.T is not None and not self.T > 0:
            raise ConfigError("--T must be positive")
        if not self.extent > 0:
            raise ConfigError("--extent must be positive")
        if self.alpha < 0:
            raise ConfigError("--alpha must be >= 0")
        if not self.k_sigma > 0:
            raise ConfigError("--k-sigma must be positive")
        if self.fk_sign not in (-1.0, 1.0):
            raise ConfigError("--fk-sign must be -1 or +1")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if self.trotter_steps < 1:
            raise ConfigError("--trotter-steps must be >= 1")
        fmt = self.resolved_format
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r}")
        if self.command in REPORT_COMMANDS and fmt != "json":
            raise ConfigError(f"{self.command} only writes JSON reports")

    @property
    def resolved_format(self) -> str:
        if self.format is not None:
            return self.format
        return "json" if self.command in REPORT_COMMANDS else "csv"

    def stream(self, tag: str) -> Stream:
        return Stream.from_seed(self.seed, tag)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["only"] = list(self.only)
        return d


def _emit(config: RunConfig, text: str) -> None:
    if config.out == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(config.out, text)


def _records_json(header, rows) -> str:
    return json_text({"columns": list(header), "rows": [list(r) for r in rows]})


# -- commands ---------------------------------------------------------------

def cmd_sample_bm(config: RunConfig) -> str:
    """Complex BM paths on ``grid`` equal steps of ``[0, T]``."""
    from .wiener import sample_bm

    T = 1.0 if config.T is None else config.T
    steps = 256 if config.grid is None else config.grid
    n = 10 if config.samples is None else config.samples
    paths = sample_bm(np.linspace(0.0, T, steps + 1), config.stream("sample-bm"), n_samples=n)
    check_finite(paths.values, "paths")
    if config.resolved_format == "csv":
        return paths.to_csv()
    rows = [(i, float(t), float(paths.values[i, j].real), float(paths.values[i, j].imag))
            for i in range(n) for j, t in enumerate(paths.times)]
    return _records_json(("sample_id", "t", "re", "im"), rows)


def cmd_sample_fgf(config: RunConfig) -> str:
    """Fractional Gaussian field coefficients on ``domain``."""
    from .fgf import DEFAULT_MODES, sample_fgf
    from .spectral import dirichlet_basis, parse_domain

    try:
        domain = parse_domain(config.domain)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    m = DEFAULT_MODES if config.trunc is None else config.trunc
    n = 10 if config.samples is None else config.samples
    field = sample_fgf(config.s, dirichlet_basis(domain, m), m, config.stream("sample-fgf"), n)
    check_finite(field.coeffs, "coefficients")
    if config.resolved_format == "csv":
        return field.to_csv()
    c = field.coeffs
    rows = [(i, j + 1, float(c[i, j].real), float(c[i, j].imag)) for i in range(n) for j in range(m)]
    return _records_json(("sample_id", "n", "re", "im"), rows)


def fk_compare_report(config: RunConfig) -> dict:
    from .feynkac import fk_mc_estimate, spectral_expm_oracle, trotter_apply
    from .verify import fk_default_case

    T = 0.5 if config.T is None else config.T
    M = 32 if config.grid is None else config.grid
    paths = 200 if config.samples is None else config.samples
    f, g, V = fk_default_case(M, config.extent)
    sign = config.fk_sign
    oracle = spectral_expm_oracle(f, V, T, sign)
    trot = trotter_apply(f, V, T, config.trotter_steps, sign)
    mc = fk_mc_estimate(f, g, V, T, paths, config.stream("fk-compare"), 32, sign)
    spectral = oracle.inner(g)
    trotter = trot.inner(g)
    w = f.weights
    rel_l2 = math.sqrt(float(np.sum(w * np.abs(trot.values - oracle.values) ** 2))
                       / float(np.sum(w * np.abs(oracle.values) ** 2)))
    mc_tol = max(config.k_sigma * mc.std_error, 0.05 * abs(spectral))
    return {
        "config": {"L": config.extent, "M": M, "T": T, "sign": sign, "paths_per_start": paths,
                   "path_steps": 32, "trotter_steps": config.trotter_steps},
        "spectral": [spectral.real, spectral.imag],
        "trotter": [trotter.real, trotter.imag],
        "mc": [mc.value.real, mc.value.imag],
        "error_bars": {"mc_std_error": mc.std_error, "mc_tolerance": mc_tol,
                       "trotter_rel_l2": rel_l2, "trotter_tolerance": 0.01},
        "passed": {"trotter": rel_l2 <= 0.01, "mc": abs(mc.value - spectral) <= mc_tol},
    }


def cmd_fk_compare(config: RunConfig) -> str:
    return json_text(fk_compare_report(config))


def fernique_report(config: RunConfig) -> dict:
    from .wiener import fernique_from_sup, sup_sq_samples

    T = 1.0 if config.T is None else config.T
    steps = 256 if config.grid is None else config.grid
    n = 100_000 if config.samples is None else config.samples
    grid = np.linspace(0.0, T, 2 * steps + 1)
    sups = sup_sq_samples(grid, n, config.stream("fernique"), 5000, (1, 2), config.workers)
    fine = fernique_from_sup(sups[1], config.alpha)
    coarse = fernique_from_sup(sups[2], config.alpha)
    rel = abs(fine.value - coarse.value) / abs(fine.value)
    return {"alpha": config.alpha, "T": T, "samples": n,
            "coarse": {"steps": steps, **coarse.to_dict()},
            "fine": {"steps": 2 * steps, **fine.to_dict()},
            "relative_change": rel, "tolerance": 0.02, "passed": rel <= 0.02}


def cmd_fernique(config: RunConfig) -> str:
    return json_text(fernique_report(config))


def cmd_verify(config: RunConfig, progress=None) -> tuple[str, bool]:
    """Run the acceptance suite; returns the JSON report and the overall verdict."""
    from .verify import run_suite, suite_report

    results = run_suite(config.seed, config.k_sigma, config.only or None, config.samples,
                        config.workers, config.fk_sign, progress)
    report = suite_report(results, config.seed, config.k_sigma)
    return json_text(report), report["passed"]


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help=f"run seed (overridden by ${SEED_ENV})")
    common.add_argument("--samples", type=int, help="number of samples (paths per start for fk-compare)")
    common.add_argument("--out", default="-", help="output file, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--k-sigma", type=float, default=K_SIGMA, dest="k_sigma")

    p = argparse.ArgumentParser(prog="cwiener", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    bm = sub.add_parser("sample-bm", parents=[common], help="sample complex Brownian paths")
    bm.add_argument("--T", type=float)
    bm.add_argument("--grid", type=int, help="number of time steps")

    fgf = sub.add_parser("sample-fgf", parents=[common], help="sample fractional Gaussian field coefficients")
    fgf.add_argument("--domain", default="interval:1", help="interval:L or rect:Lx,Ly")
    fgf.add_argument("--s", type=float, default=0.5)
    fgf.add_argument("--trunc", type=int, help="number of eigenmodes")

    fk = sub.add_parser("fk-compare", parents=[common], help="Feynman-Kac: Trotter, dense oracle and path MC")
    fk.add_argument("--T", type=float)
    fk.add_argument("--grid", type=int, help="grid points per axis")
    fk.add_argument("--extent", type=float, default=6.0, help="half-width L of the square")
    fk.add_argument("--fk-sign", type=float, default=-1.0, dest="fk_sign", choices=(-1.0, 1.0))
    fk.add_argument("--trotter-steps", type=int, default=64, dest="trotter_steps")

    fe = sub.add_parser("fernique", parents=[common], help="Fernique moment under grid doubling")
    fe.add_argument("--alpha", type=float, default=0.1)
    fe.add_argument("--T", type=float)
    fe.add_argument("--grid", type=int, help="coarse number of time steps")

    ve = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    ve.add_argument("--only", type=int, nargs="+", default=(), help="criterion ids to run")
    ve.add_argument("--fk-sign", type=float, default=-1.0, dest="fk_sign", choices=(-1.0, 1.0))
    return p


def config_from_args(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values = {k: v for k, v in vars(args).items() if v is not None}
    if environ.get(SEED_ENV):
        try:
            values["seed"] = int(environ[SEED_ENV], 0)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} is not an integer: {environ[SEED_ENV]!r}") from exc
    if "only" in values:
        values["only"] = tuple(values["only"])
    return RunConfig(**values)


COMMANDS = {"sample-bm": cmd_sample_bm, "sample-fgf": cmd_sample_fgf,
            "fk-compare": cmd_fk_compare, "fernique": cmd_fernique}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        if config.command == "verify":
            text, ok = cmd_verify(config, lambda r: print(r.summary_line(), file=sys.stderr, flush=True))
            _emit(config, text)
            return 0 if ok else 1
        _emit(config, COMMANDS[config.command](config))
        return 0
    except ConfigError as exc:
        print(f"cwiener: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except NaNDetectedError as exc:
        print(f"cwiener: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"cwiener: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
