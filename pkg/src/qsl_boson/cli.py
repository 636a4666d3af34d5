"""Command-line runner: CSV traces, analytic-vs-oracle comparison, figure data.

Exit codes: 0 success, 2 configuration error, 3 tolerance failure,
4 truncation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import oracle
from .cf_dynamics import clock
from .coherent import (
    CoherentScenario,
    fidelity_exact,
    fidelity_smoothed,
    hs_distance_smoothed,
    purity_coherent,
    qslt_coherent_grid,
    speed_bound,
    vacuum_bundle,
    vacuum_sample,
)
from .figures import TRACE_HEADER, figure_curves, gnuplot_script, sample_row, write_csv
from .fock import FockScenario, fidelity_fock, hs_distance_fock, purity_fock, qslt_fock_grid, speed_fock
from .qsl_core import PhysParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_TRUNCATION = 4

SCENARIOS = ("coherent", "vacuum", "fock")
COMPARE_COLUMNS = ("fidelity", "purity", "hs_dist", "v_tilde")


class ConfigError(ValueError):
    pass


# JSON keys named after the physical symbols
_ALIASES = {"nbar_R": "nbar", "omega_over_gamma": "omega_ratio", "t_max": "tmax"}


@dataclass
class RunConfig:
    scenario: str = "coherent"
    alpha_re: float = 0.0
    alpha_im: float = 0.0
    M: int = 1
    nbar: float = 0.0
    gamma: float = 1.0
    omega_ratio: float = 10.0
    tmax: float = 3.0
    steps: int = 200
    picture: str = "interaction"
    tol: float = 1e-6
    dim: int | None = None
    speed_mode: str = "auto"
    out: str | None = None

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    def params(self) -> PhysParams:
        return PhysParams.from_ratio(self.omega_ratio, self.nbar, self.gamma)

    def grid(self) -> np.ndarray:
        """Physical times; γt runs over [0, tmax] in ``steps`` intervals."""
        return np.linspace(0.0, self.tmax, self.steps + 1) / self.gamma

    def validate(self) -> "RunConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}")
        if self.steps < 2:
            raise ConfigError("steps must be >= 2")
        if not self.tmax > 0:
            raise ConfigError("tmax must be positive")
        if self.gamma <= 0 or self.omega_ratio <= 0 or self.nbar < 0:
            raise ConfigError("need gamma > 0, omega-ratio > 0, nbar >= 0")
        if self.picture not in oracle.PICTURES:
            raise ConfigError(f"picture must be one of {oracle.PICTURES}")
        if self.scenario == "fock" and not 0 <= self.M <= 30:
            raise ConfigError("M must lie in [0, 30]")
        if self.scenario == "vacuum" and self.alpha != 0:
            raise ConfigError("vacuum scenario takes no amplitude")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        return self


def _thread_cap() -> int:
    env = os.environ.get("QSL_BOSON_THREADS")
    cpu = os.cpu_count() or 1
    if env is None:
        return cpu
    try:
        cap = int(env)
    except ValueError as exc:
        raise ConfigError("QSL_BOSON_THREADS must be an integer") from exc
    return max(1, min(cap, cpu))


def trace_rows(cfg: RunConfig) -> list[tuple[float, ...]]:
    p = cfg.params()
    grid = cfg.grid()
    if cfg.scenario == "coherent":
        samples = qslt_coherent_grid(CoherentScenario(p, cfg.alpha), grid, cfg.speed_mode)
    elif cfg.scenario == "vacuum":
        samples = [vacuum_sample(p, clock(p, float(t))) for t in grid]
    else:
        if cfg.M == 0:
            samples = [vacuum_sample(p, clock(p, float(t))) for t in grid]
        else:
            samples = qslt_fock_grid(FockScenario(p, cfg.M), grid)
    return [sample_row(s, p.gamma) for s in samples]


def run_trace(cfg: RunConfig, stream=None) -> list[tuple[float, ...]]:
    rows = trace_rows(cfg)
    if cfg.out:
        write_csv(Path(cfg.out), TRACE_HEADER, rows)
    else:
        out = stream or sys.stdout
        out.write(",".join(TRACE_HEADER) + "\n")
        for r in rows:
            out.write(",".join(f"{v:.15g}" for v in r) + "\n")
    return rows


def _analytic_columns(cfg: RunConfig, t: float) -> dict[str, float]:
    p = cfg.params()
    c = clock(p, t)
    if cfg.scenario == "coherent":
        s = CoherentScenario(p, cfg.alpha)
        if cfg.picture == "schroedinger":
            F = fidelity_exact(s, c)
            P = purity_coherent(c)
            G = math.sqrt(max(1 + P - 2 * F, 0.0))
        else:
            F, P, G = fidelity_smoothed("plus", s, c), purity_coherent(c), hs_distance_smoothed(s, c)
        return {"fidelity": F, "purity": P, "hs_dist": G, "v_tilde": speed_bound(s, c, "exact")}
    if cfg.scenario == "vacuum" or cfg.M == 0:
        vb = vacuum_bundle(p, c)
        return {"fidelity": vb.F0, "purity": vb.P0, "hs_dist": vb.G0,
                "v_tilde": speed_bound(CoherentScenario(p, 0j), c, "low_freq")}
    s = FockScenario(p, cfg.M)
    return {"fidelity": fidelity_fock(s, c), "purity": purity_fock(s, c),
            "hs_dist": hs_distance_fock(s, c), "v_tilde": speed_fock(s, c)}


def _initial_kind(cfg: RunConfig):
    if cfg.scenario == "coherent":
        return oracle.Coherent(cfg.alpha)
    if cfg.scenario == "vacuum":
        return oracle.Coherent(0j)
    return oracle.Fock(cfg.M)


def oracle_dim(cfg: RunConfig) -> int:
    if cfg.dim is not None:
        return cfg.dim
    a2 = abs(cfg.alpha) ** 2 if cfg.scenario == "coherent" else 0.0
    M = cfg.M if cfg.scenario == "fock" else 0
    return oracle.default_dim(a2, M, cfg.nbar)


@dataclass
class CompareReport:
    text: str
    errors: dict[str, float]
    passed: bool


def run_compare(cfg: RunConfig) -> CompareReport:
    """Oracle vs closed forms on the trace grid; raises oracle errors unchanged."""
    p = cfg.params()
    grid = cfg.grid()
    dim = oracle_dim(cfg)
    ocfg = oracle.OracleConfig(dim=dim, picture=cfg.picture)
    states = oracle.propagate(oracle.build_initial(_initial_kind(cfg), dim), p, grid, ocfg)
    errors = dict.fromkeys(COMPARE_COLUMNS, 0.0)
    envelope = 0.0
    for t, st in zip(grid, states):
        obs = oracle.observables(states[0], st, p)
        ana = _analytic_columns(cfg, float(t))
        got = {"fidelity": obs.F, "purity": obs.P, "hs_dist": obs.G, "v_tilde": obs.v_tilde}
        for k in COMPARE_COLUMNS:
            errors[k] = max(errors[k], abs(got[k] - ana[k]))
        if cfg.scenario == "coherent" and cfg.picture == "schroedinger":
            s = CoherentScenario(p, cfg.alpha)
            c = clock(p, float(t))
            lo, hi = fidelity_smoothed("minus", s, c), fidelity_smoothed("plus", s, c)
            envelope = max(envelope, lo - obs.F, obs.F - hi)
    lines = [
        f"scenario: {cfg.scenario}  alpha={cfg.alpha.real:g}{cfg.alpha.imag:+g}j  M={cfg.M}  "
        f"nbar={cfg.nbar:g}  omega/gamma={cfg.omega_ratio:g}",
        f"grid: gamma*t in [0, {cfg.tmax:g}], {cfg.steps} steps; oracle dim={dim}; picture={cfg.picture}",
        f"{'column':<12}{'max_abs_error':>16}",
    ]
    lines += [f"{k:<12}{errors[k]:>16.3e}" for k in COMPARE_COLUMNS]
    passed = all(e < cfg.tol for e in errors.values())
    if cfg.scenario == "coherent" and cfg.picture == "schroedinger":
        ok = envelope <= cfg.tol
        lines.append(f"envelope F(-1) <= F <= F(+1): worst excursion {envelope:.3e} "
                     f"({'ok' if ok else 'violated'})")
        passed = passed and ok
    lines.append(f"status: {'PASS' if passed else 'FAIL'} (tol {cfg.tol:g})")
    return CompareReport("\n".join(lines) + "\n", errors, passed)


def run_figure(n: int, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    curves = figure_curves(n)
    paths = []
    with ThreadPoolExecutor(max_workers=_thread_cap()) as pool:
        targets = [out / f"{c.name}.csv" for c in curves]
        list(pool.map(lambda pc: write_csv(pc[0], pc[1].header, pc[1].rows), zip(targets, curves)))
    paths.extend(targets)
    script = out / f"figure{n}.gp"
    script.write_text(gnuplot_script(n, curves), encoding="utf-8")
    paths.append(script)
    return paths


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig field names")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--alpha", type=float, help="real amplitude (shorthand for --alpha-re)")
    p.add_argument("--alpha-re", type=float)
    p.add_argument("--alpha-im", type=float)
    p.add_argument("--M", type=int)
    p.add_argument("--nbar", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--omega-ratio", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--picture", choices=oracle.PICTURES)
    p.add_argument("--tol", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--speed-mode", choices=("auto", "high_freq", "low_freq", "dissipative_exact", "numeric"))
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsl-boson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="write a CSV trace of QSL figures of merit"))
    _add_common(sub.add_parser("compare", help="compare closed forms with the Lindblad oracle"))
    fig = sub.add_parser("figure", help="emit curve data for a figure")
    fig.add_argument("n", type=int, choices=range(1, 7))
    fig.add_argument("--out", default=".")
    return parser


def _load_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        data = {_ALIASES.get(k.replace("-", "_"), k.replace("-", "_")): v for k, v in raw.items()}
        data.pop("outputs", None)
        if "alpha" in data:
            a = data.pop("alpha")
            re_im = (a, 0.0) if isinstance(a, (int, float)) else tuple(a)
            if len(re_im) != 2:
                raise ConfigError("alpha must be a number or a [re, im] pair")
            data.setdefault("alpha_re", re_im[0])
            data.setdefault("alpha_im", re_im[1])
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for name in known:
        val = getattr(args, name, None)
        if val is not None:
            data[name] = val
    if getattr(args, "alpha", None) is not None:
        data["alpha_re"] = args.alpha
    if "scenario" not in data:
        raise ConfigError(f"a scenario is required (--scenario or config file), one of {SCENARIOS}")
    try:
        return RunConfig(**data).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "figure":
            for path in run_figure(args.n, args.out):
                print(path)
            return EXIT_OK
        cfg = _load_config(args)
        if args.command == "run":
            run_trace(cfg)
            return EXIT_OK
        report = run_compare(cfg)
        sys.stdout.write(report.text)
        return EXIT_OK if report.passed else EXIT_TOLERANCE
    except oracle.TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except oracle.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def config_echo(cfg: RunConfig) -> str:
    """JSON form of a configuration, loadable with --config."""
    return json.dumps(asdict(cfg), indent=2, sort_keys=True)


if __name__ == "__main__":
    sys.exit(main())
