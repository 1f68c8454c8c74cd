"""``grasspath`` command-line driver.

Subcommands: ``verify-compose``, ``spin``, ``jc``, ``stationary``,
``convergence``. Parameters come from built-in defaults, then an optional
``--config`` file of ``key = value`` lines (``#`` starts a comment), then
command-line flags of the same name.

Exit status: 0 all checks passed, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from grasspath import brackets as br
from grasspath import oracle as orc
from grasspath import recursion as rec
from grasspath.algebra import max_coefficient_deviation
from grasspath.models import (
    ConstantField,
    JaynesCummingsModel,
    SinusoidField,
    SpinFieldModel,
    TimeGrid,
    field_at,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

COMPOSE_TOL = 1e-12
STATIONARY_TOL = 1e-12
ORACLE_TOL = 1e-6
SYMBOLIC_BRACKET_TOL = 1e-10
UNITARITY_TOL = 1e-8
HALVING_RANGE = (1.8, 2.2)
MODES = ("symbolic", "discrete", "ode", "stationary", "oracle")


class ConfigError(ValueError):
    pass


def _complex_pair(text: str) -> complex:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) == 1:
        parts.append("0")
    if len(parts) != 2:
        raise ConfigError(f"expected RE,IM but got {text!r}")
    return complex(_finite(parts[0]), _finite(parts[1]))


def _finite(text) -> float:
    try:
        x = float(text)
    except ValueError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc
    if not math.isfinite(x):
        raise ConfigError(f"non-finite value: {text!r}")
    return x


def _positive_int(text) -> int:
    try:
        n = int(text)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {text!r}") from exc
    if n < 1:
        raise ConfigError(f"expected a positive integer, got {n}")
    return n


def _triple(text) -> tuple[float, float, float]:
    parts = str(text).split(",")
    if len(parts) != 3:
        raise ConfigError(f"expected A,F,PH but got {text!r}")
    return tuple(_finite(p) for p in parts)


def _modes(text) -> frozenset[str]:
    names = {p.strip() for p in str(text).split(",") if p.strip()}
    if not names:
        raise ConfigError("mode set is empty")
    if "all" in names:
        names = set(MODES) | (names - {"all"})
    bad = names - set(MODES)
    if bad:
        raise ConfigError(f"unknown mode(s): {', '.join(sorted(bad))}")
    return frozenset(names)


def _model_name(text) -> str:
    if text not in ("spin", "jc"):
        raise ConfigError(f"model must be spin or jc, got {text!r}")
    return text


# key -> (parser, help)
OPTIONS = {
    "model": (_model_name, "spin or jc"),
    "omega": (_finite, "spin splitting (spin) or mode frequency (jc)"),
    "omega0": (_finite, "two-level splitting for jc"),
    "lambda": (_finite, "jc coupling (real)"),
    "b-const": (_complex_pair, "constant field RE,IM"),
    "b-sin": (_triple, "sinusoidal field A,F,PH: B(t) = A cos(F t + PH)"),
    "t": (_finite, "total time"),
    "steps": (_positive_int, "number of time slices N"),
    "m-max": (_positive_int, "bracket truncation order"),
    "n-max": (_positive_int, "Fock truncation of the oracle"),
    "dt": (_finite, "ODE step"),
    "mode": (_modes, "comma list of symbolic,discrete,ode,stationary,oracle,all"),
    "zi": (_complex_pair, "initial boson amplitude RE,IM"),
    "zf": (_complex_pair, "final boson amplitude (conjugated) RE,IM"),
    "zi-max": (_finite, "guard on |zi| for jc"),
    "samples": (_positive_int, "number of output times after t=0"),
    "out": (str, "CSV output path; a .json summary is written next to it"),
}


@dataclass(frozen=True)
class RunConfig:
    model: str | None = None
    omega: float = 1.0
    omega0: float = 1.0
    lam: float = 0.5
    b_const: complex | None = None
    b_sin: tuple[float, float, float] | None = None
    t: float = 1.0
    steps: int | None = None
    m_max: int | None = None
    n_max: int = orc.DEFAULT_N_MAX
    dt: float = 1e-3
    modes: frozenset[str] | None = None
    zi: complex = 0j
    zf: complex = 0j
    zi_max: float = 1.0
    samples: int = 10
    out: str | None = None

    def spin_model(self) -> SpinFieldModel:
        if self.b_sin is not None:
            a, f, ph = self.b_sin
            return SpinFieldModel(self.omega, SinusoidField(a, f, ph))
        b = 0.5 if self.b_const is None else self.b_const
        return SpinFieldModel(self.omega, ConstantField(b))

    def jc_model(self) -> JaynesCummingsModel:
        return JaynesCummingsModel(self.omega0, self.omega, self.lam)

    def model_obj(self):
        return self.jc_model() if self.model == "jc" else self.spin_model()

    def m_max_for(self, model) -> int:
        if self.m_max is not None:
            return self.m_max
        return br.DEFAULT_M_MAX_JC if isinstance(model, JaynesCummingsModel) else br.DEFAULT_M_MAX_SPIN


_FIELD_NAMES = {"lambda": "lam", "mode": "modes"}


def read_config_file(path: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = value
    return raw


def build_config(raw: dict[str, str]) -> RunConfig:
    values = {}
    for key, text in raw.items():
        parse, _ = OPTIONS[key]
        name = _FIELD_NAMES.get(key, key.replace("-", "_"))
        values[name] = parse(text)
    if values.get("b_const") is not None and values.get("b_sin") is not None:
        raise ConfigError("give either b-const or b-sin, not both")
    if values.get("dt", 1.0) <= 0:
        raise ConfigError("dt must be positive")
    if values.get("t", 1.0) < 0:
        raise ConfigError("t must be non-negative")
    return RunConfig(**values)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class Report:
    command: str
    header: list[str]
    rows: list[list] = field(default_factory=list)
    checks: dict[str, dict] = field(default_factory=dict)

    def check(self, name: str, value: float, threshold: float, passed: bool, **extra):
        self.checks[name] = {"passed": bool(passed), "value": float(value), "threshold": float(threshold), **extra}

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()


def _summary_path(out: str) -> Path:
    p = Path(out)
    return p.with_suffix(".json") if p.suffix != ".json" else p.with_name(p.name + ".summary.json")


def _write_outputs(report: Report, cfg: RunConfig, stdout) -> None:
    text = report.csv_text()
    if cfg.out is None:
        stdout.write(text)
    else:
        Path(cfg.out).write_text(text)
        conf = {k: (str(v) if isinstance(v, complex) else v) for k, v in asdict(cfg).items()}
        conf["modes"] = sorted(cfg.modes) if cfg.modes else None
        summary = {"command": report.command, "passed": report.passed, "checks": report.checks, "config": conf}
        _summary_path(cfg.out).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for name, c in report.checks.items():
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {name}: {c['value']:.3e} (threshold {c['threshold']:.3e})", file=sys.stderr)


def _symbolic_steps(cfg: RunConfig) -> int:
    n = cfg.steps or 4
    if n > rec.N_MAX_SYMBOLIC:
        raise ConfigError(f"symbolic runs need steps <= {rec.N_MAX_SYMBOLIC}, got {n}")
    return n


def cmd_verify_compose(cfg: RunConfig) -> Report:
    """Direct composition vs single-exponential recursion for N = 1..steps."""
    model = cfg.model_obj()
    n_max = _symbolic_steps(cfg)
    report = Report("verify-compose", ["check", "n", "max_dev", "threshold", "passed"])
    worst = 0.0
    for n in range(1, n_max + 1):
        grid = TimeGrid(cfg.t, n)
        k_comp = rec.compose_discrete(model, grid, cfg.zi, cfg.zf)
        k_rec = rec.assemble_propagator(rec.recurse_exponent(model, grid, cfg.zi), cfg.zf)
        dev = max_coefficient_deviation(k_comp, k_rec)
        worst = max(worst, dev)
        report.rows.append(["compose", n, dev, COMPOSE_TOL, int(dev <= COMPOSE_TOL)])
    report.check("compose_equals_recursion", worst, COMPOSE_TOL, worst <= COMPOSE_TOL)
    if isinstance(model, SpinFieldModel):
        grid = TimeGrid(cfg.t, 2)
        k_comp = rec.compose_discrete(model, grid, commuting_field=True)
        k_rec = rec.assemble_propagator(rec.recurse_exponent(model, grid, commuting_field=True))
        dev = max_coefficient_deviation(k_comp, k_rec)
        b2 = max(abs(field_at(model, grid.time(j))) ** 2 for j in (1, 2))
        floor = 1e-6 * grid.eps**2 * b2
        if b2 > 0:
            report.rows.append(["commuting_counterexample", 2, dev, floor, int(dev > floor)])
            report.check("commuting_field_deviates", dev, floor, dev > floor)
    return report


def _u_cols(prefix: str) -> list[str]:
    return [f"{prefix}_u{r}{c}_{part}" for r in (0, 1) for c in (0, 1) for part in ("re", "im")]


def _u_vals(u: np.ndarray) -> list[float]:
    return [float(getattr(u[r, c], part)) for r in (0, 1) for c in (0, 1) for part in ("real", "imag")]


def _sample_times(cfg: RunConfig) -> list[float]:
    return [cfg.t * k / cfg.samples for k in range(cfg.samples + 1)]


def _spin_oracle_series(model, times) -> list[np.ndarray]:
    out, u, t_prev = [], np.eye(2, dtype=complex), 0.0
    for t in times:
        if t > t_prev:
            u = orc.propagate_spin_exact(model, t, orc.DEFAULT_SPIN_DT, t0=t_prev).u @ u
        out.append(u)
        t_prev = t
    return out


def cmd_spin(cfg: RunConfig) -> Report:
    """Spin kernel samples from each enabled mode alongside the oracle."""
    model = cfg.spin_model()
    modes = cfg.modes or frozenset({"discrete", "ode", "oracle"})
    steps = cfg.steps or 200
    m_max = cfg.m_max_for(model)
    paths = [m for m in ("symbolic", "discrete", "ode") if m in modes]
    if "symbolic" in paths and steps > rec.N_MAX_SYMBOLIC:
        raise ConfigError(f"symbolic mode needs steps <= {rec.N_MAX_SYMBOLIC}, got {steps}")
    times = _sample_times(cfg)
    header = ["t"] + [c for m in paths + ["oracle"] for c in _u_cols(m)] + [f"dev_{m}" for m in paths]
    report = Report("spin", header)
    oracle_u = _spin_oracle_series(model, times)
    state = br.initial_state(model, m_max)
    worst = {m: 0.0 for m in paths}
    worst_unitary = 0.0
    worst_sym = 0.0
    for t, uo in zip(times, oracle_u):
        got = {}
        if "symbolic" in paths:
            grid = TimeGrid(t, steps)
            got["symbolic"] = rec.kernel_sectors(rec.compose_discrete(model, grid), steps)
        if "discrete" in paths:
            got["discrete"] = br.assemble_kernel_spin(br.run_discrete(model, TimeGrid(t, steps), m_max)).u
        if "ode" in paths:
            state = br.integrate_ode(state, model, t, cfg.dt)
            u = br.assemble_kernel_spin(state)
            worst_unitary = max(worst_unitary, u.unitarity_error())
            got["ode"] = u.u
        if "symbolic" in got and "discrete" in got:
            worst_sym = max(worst_sym, float(np.abs(got["symbolic"] - got["discrete"]).max()))
        devs = [float(np.abs(got[m] - uo).max()) for m in paths]
        for m, d in zip(paths, devs):
            worst[m] = max(worst[m], d)
        report.rows.append([t] + [x for m in paths for x in _u_vals(got[m])] + _u_vals(uo) + devs)
    if "ode" in paths:
        report.check("ode_vs_oracle", worst["ode"], ORACLE_TOL, worst["ode"] <= ORACLE_TOL)
        report.check("ode_unitarity", worst_unitary, UNITARITY_TOL, worst_unitary <= UNITARITY_TOL)
    if "symbolic" in paths and "discrete" in paths:
        report.check("symbolic_vs_discrete", worst_sym, SYMBOLIC_BRACKET_TOL, worst_sym <= SYMBOLIC_BRACKET_TOL)
    if "discrete" in paths:
        report.checks["discrete_vs_oracle"] = {"passed": True, "value": worst["discrete"], "threshold": math.inf,
                                               "note": "first order in eps; informational"}
    return report


def _jc_guards(cfg: RunConfig, m_max: int):
    if abs(cfg.zi) > cfg.zi_max:
        raise ConfigError(f"|zi| = {abs(cfg.zi):.3g} exceeds zi-max = {cfg.zi_max}")
    if m_max > cfg.n_max - 2:
        raise ConfigError(f"m-max {m_max} exceeds truncation guard n-max - 2 = {cfg.n_max - 2}")


def cmd_jc(cfg: RunConfig) -> Report:
    """Jaynes-Cummings kernel tables vs the truncated-Fock oracle."""
    model = cfg.jc_model()
    m_max = cfg.m_max_for(model)
    _jc_guards(cfg, m_max)
    modes = cfg.modes or frozenset({"ode", "oracle"})
    paths = [m for m in ("discrete", "ode") if m in modes]
    steps = cfg.steps or 200
    report = Report("jc", ["t", "mode", "sector", "m", "re", "im", "oracle_re", "oracle_im", "dev"])
    state = br.initial_state(model, m_max, cfg.zi)
    worst = {m: 0.0 for m in paths}
    resonant = model.omega == model.omega_o and cfg.zi == 0 and "ode" in paths
    worst_flip = 0.0
    for t in _sample_times(cfg):
        ref = orc.kernel_table_from_matrix(orc.propagate_jc_exact(model, t, cfg.n_max), cfg.zi, m_max)
        tables = {}
        if "discrete" in paths:
            tables["discrete"] = br.assemble_kernel_jc(br.run_discrete(model, TimeGrid(t, steps), m_max, cfg.zi))
        if "ode" in paths:
            state = br.integrate_ode(state, model, t, cfg.dt)
            tables["ode"] = br.assemble_kernel_jc(state)
        for mode, tab in tables.items():
            for (name, got), want in zip(tab.sectors().items(), ref.sectors().values()):
                for m in range(m_max + 1):
                    d = abs(got[m] - want[m])
                    worst[mode] = max(worst[mode], d)
                    report.rows.append([t, mode, name, m, got[m].real, got[m].imag, want[m].real, want[m].imag, d])
        if resonant:
            # |↓,1⟩ <- |↑,0⟩ amplitude is sqrt(1!) B_1
            p = abs(tables["ode"].b[1]) ** 2
            exact = math.sin(model.lam * t) ** 2
            worst_flip = max(worst_flip, abs(p - exact))
            report.rows.append([t, "ode", "flip", 1, p, 0.0, exact, 0.0, abs(p - exact)])
    if "ode" in paths:
        report.check("ode_vs_oracle", worst["ode"], ORACLE_TOL, worst["ode"] <= ORACLE_TOL)
    if "discrete" in paths:
        report.checks["discrete_vs_oracle"] = {"passed": True, "value": worst["discrete"], "threshold": math.inf,
                                               "note": "first order in eps; informational"}
    if resonant:
        report.check("flip_probability", worst_flip, ORACLE_TOL, worst_flip <= ORACLE_TOL)
    return report


def cmd_stationary(cfg: RunConfig) -> Report:
    """Stationary-path kernel vs exact recursion, both models unless one is chosen."""
    n_max = _symbolic_steps(cfg)
    models = {"spin": cfg.spin_model(), "jc": cfg.jc_model()}
    if cfg.model is not None:
        models = {cfg.model: models[cfg.model]}
    report = Report("stationary", ["model", "n", "max_dev", "threshold", "passed"])
    for name, model in models.items():
        worst = 0.0
        for n in range(1, n_max + 1):
            grid = TimeGrid(cfg.t, n)
            k_sp = rec.stationary_path(model, grid, cfg.zi, cfg.zf)
            k_ex = rec.assemble_propagator(rec.recurse_exponent(model, grid, cfg.zi), cfg.zf)
            dev = max_coefficient_deviation(k_sp, k_ex)
            worst = max(worst, dev)
            report.rows.append([name, n, dev, STATIONARY_TOL, int(dev <= STATIONARY_TOL)])
        report.check(f"stationary_{name}", worst, STATIONARY_TOL, worst <= STATIONARY_TOL)
    return report


def cmd_convergence(cfg: RunConfig) -> Report:
    """Halving study in eps (discrete brackets) and an m-max sweep (ODE brackets)."""
    model = cfg.model_obj()
    m_max = cfg.m_max_for(model)
    base = cfg.steps or 200
    spin = isinstance(model, SpinFieldModel)
    if spin:
        ref = orc.propagate_spin_exact(model, cfg.t)

        def dev_discrete(n):
            return br.assemble_kernel_spin(br.run_discrete(model, TimeGrid(cfg.t, n), m_max)).max_deviation(ref)

        def dev_ode(m):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", br.TruncationWarning)
                st = br.integrate_ode(br.initial_state(model, m), model, cfg.t, cfg.dt)
                return br.assemble_kernel_spin(st).max_deviation(ref)
    else:
        _jc_guards(cfg, m_max)
        ref = orc.kernel_table_from_matrix(orc.propagate_jc_exact(model, cfg.t, cfg.n_max), cfg.zi, m_max)

        def dev_discrete(n):
            tab = br.assemble_kernel_jc(br.run_discrete(model, TimeGrid(cfg.t, n), m_max, cfg.zi))
            return tab.max_deviation(ref)

        def dev_ode(m):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", br.TruncationWarning)
                st = br.integrate_ode(br.initial_state(model, m, cfg.zi), model, cfg.t, cfg.dt)
                return br.assemble_kernel_jc(st).max_deviation(ref)

    report = Report("convergence", ["sweep", "parameter", "max_dev", "ratio"])
    devs = []
    for k in range(4):
        n = base * 2**k
        devs.append(dev_discrete(n))
        ratio = devs[-2] / devs[-1] if k and devs[-1] > 0 else float("nan")
        report.rows.append(["eps", n, devs[-1], ratio])
    ratios = [a / b for a, b in zip(devs, devs[1:]) if b > 0]
    lo, hi = HALVING_RANGE
    off = max((abs(r - 2.0) for r in ratios), default=math.inf)
    ok = len(ratios) == 3 and all(lo <= r <= hi for r in ratios)
    report.check("eps_halving_ratio", off, hi - 2.0, ok, ratios=ratios)
    sweep = [m for m in (m_max - 4, m_max - 2, m_max) if m >= 1]
    last = None
    for m in sweep:
        last = dev_ode(m)
        report.rows.append(["m_max", m, last, float("nan")])
    report.check("ode_vs_oracle_at_m_max", last, ORACLE_TOL, last <= ORACLE_TOL)
    return report


COMMANDS = {
    "verify-compose": cmd_verify_compose,
    "spin": cmd_spin,
    "jc": cmd_jc,
    "stationary": cmd_stationary,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grasspath", description=__doc__.split("\n", 1)[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.split("\n", 1)[0], argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="key = value file")
        for key, (_, help_text) in OPTIONS.items():
            p.add_argument(f"--{key}", dest=key, help=help_text)
    return parser


def main(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    try:
        raw = read_config_file(args.pop("config")) if "config" in args else {}
        raw.update(args)
        cfg = build_config(raw)
        report = COMMANDS[command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, IndexError) as exc:
        # model construction rejected the parameters
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _write_outputs(report, cfg, stdout)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
