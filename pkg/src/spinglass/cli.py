"""Command-line surface for the spin-glass analytics toolkit.

One binary with subcommands.  Every run resolves to a ``RunConfig`` (command
name, inline mixture, parameters, seed, output path, format); the same config
can be replayed with ``spinglass run --config file.json`` and yields
byte-identical artifacts.  Flags override config-file values.

Exit codes: 0 success, 1 bad input, 2 solver failure (or failed validation /
failed sweep rows), 3 capacity exceeded.
"""
from __future__ import annotations

import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from .conditioning import BandGeometry, ConditioningEvent, band_kernel, hessian_decomposition
from .errors import (
    BadInputError,
    CapacityExceededError,
    KMismatchError,
    MixtureError,
    NotBracketedError,
    RegimeMismatchError,
    SingularBlockError,
    SingularMatrixError,
    SolverFailedError,
)
from .franz_parisi import FPQuery, fp_high, fp_low
from .landscape import (
    chain_bound,
    fprime_identity,
    ground_state_point,
    identity_esrs,
    theta,
)
from .mclab import (
    MCConfig,
    chain_constraint_set,
    dump_samples,
    empirical_complexity,
    exact_conditional_sampler,
    gibbs_mcmc,
    overlap_statistics,
    sample_field,
)
from .mixtures import Mixture
from .rsb import SolverConfig, beta_c, cs_minimize, zt_minimize

_EXIT_BAD_INPUT = 1
_EXIT_SOLVER_FAILED = 2
_EXIT_CAPACITY = 3

_INPUT_ERRORS = (BadInputError, MixtureError, RegimeMismatchError, KMismatchError)
_SOLVER_ERRORS = (
    SolverFailedError,
    NotBracketedError,
    SingularMatrixError,
    SingularBlockError,
)


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Self-contained, replayable description of one CLI run."""

    command: str
    mixture: dict | None = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise BadInputError(f"format must be json or csv, got {self.format!r}")

    def to_json(self) -> str:
        obj = {
            "command": self.command,
            "mixture": self.mixture,
            "params": self.params,
            "seed": self.seed,
            "out": self.out,
            "format": self.format,
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise BadInputError(f"run config parse error: {e}") from e
        if not isinstance(obj, dict) or "command" not in obj:
            raise BadInputError("run config must be an object with a 'command' field")
        return cls(
            command=str(obj["command"]),
            mixture=obj.get("mixture"),
            params=dict(obj.get("params", {})),
            seed=int(obj.get("seed", 0)),
            out=obj.get("out"),
            format=str(obj.get("format", "json")),
        )

    def mixture_obj(self) -> Mixture:
        if self.mixture is None:
            raise BadInputError("this command requires a mixture (--mixture FILE)")
        return Mixture.from_json(json.dumps(self.mixture))


def _mixture_dict(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            m = Mixture.from_json(fh.read())
    except OSError as e:
        raise BadInputError(f"cannot read mixture file: {e}") from e
    return json.loads(m.to_json())


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def _jsonable(obj):
    """Recursively convert results (namedtuples, dataclasses, arrays) to JSON."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return _jsonable(obj._asdict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return "nan"
    return obj


def _flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for k in obj:
            rows.extend(_flatten(obj[k], f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}{i}."))
    else:
        rows.append((prefix[:-1], obj))
    return rows


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines = ["key,value"]
    for key, value in _flatten(report):
        lines.append(f"{key},{value}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        click.echo(f"wrote {out}")


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(body, *args):
    try:
        return body(*args)
    except CapacityExceededError as e:
        _fail(str(e), _EXIT_CAPACITY)
    except _SOLVER_ERRORS as e:
        _fail(str(e), _EXIT_SOLVER_FAILED)
    except _INPUT_ERRORS as e:
        _fail(str(e), _EXIT_BAD_INPUT)


def _merge(ctx, config_path, flags):
    """File-first parameter resolution: explicit flags beat config values."""
    base = RunConfig.from_json(_read(config_path)) if config_path else None
    merged = {}
    file_params = dict(base.params) if base else {}
    for name, value in flags.items():
        src = ctx.get_parameter_source(name)
        if src is not None and src.name == "COMMANDLINE":
            merged[name] = value
        elif name in file_params:
            merged[name] = file_params[name]
        else:
            merged[name] = value
    return base, merged


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise BadInputError(f"cannot read config file: {e}") from e


def _carried(ctx, base: RunConfig | None, param: str, attr: str, value):
    if base is None:
        return value
    src = ctx.get_parameter_source(param)
    if src is not None and src.name == "COMMANDLINE":
        return value
    return getattr(base, attr)


def _grid(spec: str, what: str) -> list[float]:
    """Parse an inclusive lo:hi:step grid spec."""
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise BadInputError(f"{what} must look like lo:hi:step, got {spec!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as e:
        raise BadInputError(f"bad {what} value: {e}") from e
    if step <= 0 or hi < lo:
        raise BadInputError(f"{what} needs hi >= lo and step > 0")
    count = int(round((hi - lo) / step))
    vals = [lo + i * step for i in range(count + 1)]
    return [v for v in vals if v <= hi + 1e-12]


def _pair(spec: str, what: str) -> tuple[float, float]:
    parts = str(spec).split(":")
    if len(parts) != 2:
        raise BadInputError(f"{what} must look like lo:hi, got {spec!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as e:
        raise BadInputError(f"bad {what} value: {e}") from e
    if hi <= lo:
        raise BadInputError(f"{what} needs hi > lo")
    return lo, hi


def _solver_config(params: dict) -> SolverConfig:
    kw = {}
    if params.get("k_max") is not None:
        kw["k_max"] = int(params["k_max"])
    if params.get("starts") is not None:
        kw["starts"] = int(params["starts"])
    if params.get("solver_seed") is not None:
        kw["seed"] = int(params["solver_seed"])
    return SolverConfig(**kw)


# ---------------------------------------------------------------------------
# command bodies (shared by flag invocation and `run --config`)
# ---------------------------------------------------------------------------


def _body_parisi(cfg: RunConfig) -> int:
    m = cfg.mixture_obj()
    p = cfg.params
    solver = _solver_config(p)
    if p.get("zero_temp"):
        res = zt_minimize(m, k_max=solver.k_max if p.get("k_max") else 2, config=solver)
        report = {
            "mode": "zero_temp",
            "order": {"steps": _jsonable(res.order.steps), "c": res.order.c},
            "gs_energy": res.gs_energy,
            "certificate": _jsonable(res.certificate),
        }
        click.echo(f"steps: {_jsonable(res.order.steps)}  c: {res.order.c:.12g}")
        click.echo(f"gs_energy: {res.gs_energy:.12g}")
    else:
        if p.get("beta") is None:
            raise BadInputError("parisi requires --beta X or --zero-temp")
        beta = float(p["beta"])
        res = cs_minimize(m, beta, config=solver)
        report = {
            "mode": "finite_beta",
            "beta": beta,
            "atoms": {"qs": list(res.x_star.qs), "levels": list(res.x_star.levels)},
            "value": res.value,
            "certificate": _jsonable(res.certificate),
        }
        click.echo(f"atoms (qs): {list(res.x_star.qs)}")
        click.echo(f"levels: {list(res.x_star.levels)}")
        click.echo(f"value: {res.value:.12g}")
    cert = report["certificate"]
    click.echo(
        "certificate: sup_phi %.3e, worst support residual %.3e"
        % (cert["sup_phi"], max(abs(r) for r in cert["residuals_at_support"]))
    )
    report["config"] = json.loads(cfg.to_json())
    _emit(_render(report, cfg.format), cfg.out)
    return 0


def _body_landscape(cfg: RunConfig) -> int:
    m = cfg.mixture_obj()
    p = cfg.params
    modes = [name for name in ("theta", "identities", "gs") if p.get(name)]
    if len(modes) != 1:
        raise BadInputError("landscape needs exactly one of --theta, --identities, --gs")
    mode = modes[0]

    if mode == "identities":
        if p.get("beta") is None:
            raise BadInputError("landscape --identities requires --beta X")
        beta = float(p["beta"])
        solver = _solver_config(p)
        esrs = identity_esrs(m, beta, k_max=solver.k_max, config=solver)
        fpr = fprime_identity(m, beta, k_max=solver.k_max, config=solver)
        bound = chain_bound(m, beta, k_max=solver.k_max, config=solver)
        report = {
            "beta": beta,
            "energy_radial_identities": _jsonable(esrs),
            "free_energy_derivative": _jsonable(fpr),
            "chain_bound": bound,
            "worst_energy_dev": max(abs(row.e_dev) for row in esrs.rows),
            "worst_radial_dev_next": max(abs(row.r_dev_next) for row in esrs.rows),
            "config": json.loads(cfg.to_json()),
        }
        click.echo(
            "identities: worst energy dev %.3e, derivative dev %.3e, chain bound %.6g"
            % (report["worst_energy_dev"], fpr.deviation, bound)
        )
        _emit(_render(report, cfg.format), cfg.out)
        return 0

    # grid modes emit CSV tables regardless of --format json default
    if mode == "theta":
        grid = int(p.get("grid") or 41)
        if grid < 2:
            raise BadInputError("--grid must be at least 2")
        e_lo, e_hi = _pair(p.get("e_range") or "-2:2", "--e-range")
        r_lo, r_hi = _pair(p.get("r_range") or "-4:4", "--r-range")
        e_grid = [e_lo + (e_hi - e_lo) * i / (grid - 1) for i in range(grid)]
        r_grid = [r_lo + (r_hi - r_lo) * i / (grid - 1) for i in range(grid)]
        lines = ["E,R,theta"]
        try:
            for e in e_grid:
                for r in r_grid:
                    lines.append(f"{e:.12g},{r:.12g},{theta(m, e, r).theta:.12g}")
        except _SOLVER_ERRORS as e:
            return _partial(lines, cfg.out, str(e))
        _emit("\n".join(lines) + "\n", cfg.out)
        return 0

    qgrid = _grid(p.get("qgrid") or "0.1:1:0.1", "--qgrid")
    solver = _solver_config(p)
    k_max = int(p["k_max"]) if p.get("k_max") is not None else 2
    lines = ["q,E_star,R_star"]
    try:
        for q in qgrid:
            e_star, r_star, _ = ground_state_point(m, q, k_max=k_max, config=solver)
            lines.append(f"{q:.12g},{e_star:.12g},{r_star:.12g}")
    except _SOLVER_ERRORS as e:
        return _partial(lines, cfg.out, str(e))
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def _partial(lines: list[str], out: str | None, message: str) -> int:
    if out is not None:
        partial = out + ".partial"
        with open(partial, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        click.echo(f"wrote {partial}")
    _fail(f"grid point failed: {message}", _EXIT_SOLVER_FAILED)


def _body_fp(cfg: RunConfig) -> int:
    m = cfg.mixture_obj()
    p = cfg.params
    if p.get("beta") is None or p.get("beta_prime") is None:
        raise BadInputError("fp requires --beta X and --beta-prime X")
    beta = float(p["beta"])
    beta_prime = float(p["beta_prime"])
    r_values = _grid(p.get("r_grid") or "-0.8:0.8:0.2", "--r-grid")
    k_max = int(p.get("k_max") or 3)
    scan_points = int(p.get("scan_points") or 32)
    solver = SolverConfig(starts=2, seed=int(p["solver_seed"])) if p.get("solver_seed") else None
    both = bool(p.get("both_regimes"))
    failures = 0

    if both:
        lines = ["r,value_high,value_low,rho_star_low"]
    else:
        lines = ["r,regime,value,rho_star,mean,free_energy,volume"]

    regime = FPQuery.detect(m, beta, beta_prime, 0.0).regime
    for r in r_values:
        if abs(r) >= 1.0:
            continue
        if both:
            hi = fp_high(m, beta, beta_prime, r, config=solver, check_regime=False)
            try:
                lo = fp_low(m, beta, beta_prime, r, k_max=k_max, config=solver, scan_points=scan_points)
                lines.append(
                    f"{r:.12g},{hi.value:.12g},{lo.value:.12g},{lo.rho_star:.12g}"
                )
            except _SOLVER_ERRORS + _INPUT_ERRORS as e:
                failures += 1
                click.echo(f"r={r:g}: {e}", err=True)
                lines.append(f"{r:.12g},{hi.value:.12g},nan,nan")
            continue
        try:
            if regime == "high":
                res = fp_high(m, beta, beta_prime, r)
                rho = float("nan")
            else:
                res = fp_low(m, beta, beta_prime, r, k_max=k_max, config=solver, scan_points=scan_points)
                rho = res.rho_star
            t = res.terms
            lines.append(
                f"{r:.12g},{regime},{res.value:.12g},{rho:.12g},"
                f"{t.mean:.12g},{t.free_energy:.12g},{t.volume:.12g}"
            )
        except _SOLVER_ERRORS + _INPUT_ERRORS as e:
            failures += 1
            click.echo(f"r={r:g}: {e}", err=True)
            lines.append(f"{r:.12g},{regime},nan,nan,nan,nan,nan")
    _emit("\n".join(lines) + "\n", cfg.out)
    if failures:
        _fail(f"{failures} of {len(r_values)} sweep rows failed", _EXIT_SOLVER_FAILED)
    return 0


# ----------------------------------------------------------------- mc bodies


def _body_mc_validate(cfg: RunConfig) -> int:
    seed = cfg.seed
    tests = []

    def record(name, statistic, gate, ok):
        tests.append(
            {"name": name, "statistic": statistic, "gate": gate, "pass": bool(ok)}
        )
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}: {statistic:.6g} (gate {gate:g})")

    # exact contraction identity <x, grad H> = sum_p p H_p
    m = Mixture({2: 0.7, 3: 1.0})
    f = sample_field(m, 24, seed=seed)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(24)
    x *= math.sqrt(24) / np.linalg.norm(x)
    euler = abs(
        float(x @ f.gradient(x)) - sum(p * h for p, h in f.energy_terms(x).items())
    )
    record("euler-identity", euler, 1e-9, euler <= 1e-9)

    # empirical field covariance against the mixture
    n, fields = 32, 1500
    m2 = Mixture({2: 0.5, 3: 0.5})
    pts = np.array(
        [v * math.sqrt(n) / np.linalg.norm(v) for v in rng.standard_normal((6, n))]
    )
    vals = np.empty((fields, 6))
    for i in range(fields):
        vals[i] = sample_field(m2, n, seed=seed, field_index=i).energy_many(pts)
    worst = 0.0
    for a in range(6):
        for b in range(a, 6):
            prod = vals[:, a] * vals[:, b]
            se = prod.std(ddof=1) / math.sqrt(fields) / n
            z = abs(prod.mean() / n - m2(float(pts[a] @ pts[b]) / n)) / se
            worst = max(worst, z)
    record("field-covariance", worst, 3.0, worst <= 3.0)

    # conditional band kernel vs direct Gaussian draws
    geo = BandGeometry(n=30, ladder=(0.35, 0.6))
    ev = ConditioningEvent(e_vec=(0.5, 0.9), r_vec=(0.8, 0.3), geometry=geo)
    qa, _ = np.linalg.qr(np.array(geo.anchors).T)
    gen = np.random.default_rng(seed + 1)
    u1 = gen.standard_normal(30)
    u1 -= qa @ (qa.T @ u1)
    u1 /= np.linalg.norm(u1)
    y1 = geo.anchors[-1] + math.sqrt(30 * (1 - geo.q_top)) * u1
    funcs, _, vals_c = chain_constraint_set(geo, ev)
    draws = exact_conditional_sampler(
        m2, np.vstack([geo.anchors, y1]), funcs, vals_c, [("value", 2)], 30_000, seed=seed
    )
    mean_ref, var_ref = band_kernel(m2, geo, y1, y1, ev)
    z_mean = abs(draws[:, 0].mean() / 30 - mean_ref) / (
        draws[:, 0].std(ddof=1) / math.sqrt(30_000) / 30
    )
    record("band-kernel-mean", z_mean, 3.0, z_mean <= 3.0)
    emp_var = draws[:, 0].var(ddof=1) / 30
    z_var = abs(emp_var - var_ref) / (emp_var * math.sqrt(2.0 / 30_000))
    record("band-kernel-variance", z_var, 3.0, z_var <= 3.0)

    # conditioned tangential Hessian entries: GOE variances, no gradient leak
    n_h = 102
    dec = hessian_decomposition(m, 1, n_h)
    x1 = np.zeros(n_h)
    x1[0] = math.sqrt(n_h)
    eye = np.eye(n_h)
    draws_h = exact_conditional_sampler(
        m,
        x1[None, :],
        [("value", 0), ("deriv", 0, x1.copy())],
        [n_h * 0.4, n_h * 0.9],
        [("deriv", 0, eye[1]), ("deriv2", 0, eye[1], eye[2])],
        20_000,
        seed=seed,
    )
    scale = n_h / ((n_h - 1) * dec.goe_scale)
    var = draws_h[:, 1].var(ddof=1) * scale
    target = 1.0 / dec.goe_dim
    z_goe = abs(var - target) / (target * math.sqrt(2.0 / 20_000))
    record("hessian-goe-variance", z_goe, 3.0, z_goe <= 3.0)
    corr = abs(float(np.corrcoef(draws_h[:, 0], draws_h[:, 1])[0, 1]))
    gate = 3.0 / math.sqrt(20_000)
    record("gradient-hessian-independence", corr, gate, corr <= gate)

    # infinite-temperature chain stays uniform on the sphere
    run = gibbs_mcmc(
        sample_field(m2, 32, seed=seed), 0.0, MCConfig(steps=400, burn_in=100, thin=4)
    )
    norm_dev = float(np.max(np.abs(np.sum(run.samples**2, axis=1) - 32)))
    record("gibbs-uniform-norms", norm_dev, 1e-10, norm_dev <= 1e-10)
    acc_dev = abs(run.acceptance_rate - 1.0)
    record("gibbs-uniform-acceptance", acc_dev, 0.0, acc_dev == 0.0)

    report = {
        "tests": tests,
        "all_pass": all(t["pass"] for t in tests),
        "config": json.loads(cfg.to_json()),
    }
    _emit(_render(report, cfg.format), cfg.out)
    if not report["all_pass"]:
        _fail("one or more kernel validations failed", _EXIT_SOLVER_FAILED)
    return 0


def _body_mc_complexity(cfg: RunConfig) -> int:
    m = cfg.mixture_obj()
    p = cfg.params
    n = int(p.get("n") or 0)
    n_fields = int(p.get("fields") or 0)
    if n < 2 or n_fields < 1:
        raise BadInputError("mc complexity requires --N >= 2 and --fields >= 1")
    e_lo, e_hi, e_count = _edges(p.get("e_grid") or "-2:2:17", "--e-grid")
    r_lo, r_hi, r_count = _edges(p.get("r_grid") or "-6:6:13", "--r-grid")
    est = empirical_complexity(
        m,
        n,
        float(p.get("q") or 1.0),
        np.linspace(e_lo, e_hi, e_count),
        np.linspace(r_lo, r_hi, r_count),
        n_fields=n_fields,
        seed=cfg.seed,
        restarts=int(p.get("restarts") or 32),
        bootstrap=int(p.get("bootstrap") or 200),
    )
    ei, ri = est.argmax_bin()
    click.echo(
        "argmax bin: E in [%.6g, %.6g), R in [%.6g, %.6g), mean count %.6g"
        % (est.e_edges[ei], est.e_edges[ei + 1], est.r_edges[ri], est.r_edges[ri + 1], est.mean_counts[ei, ri])
    )
    _emit(est.to_csv(), cfg.out)
    return 0


def _edges(spec: str, what: str) -> tuple[float, float, int]:
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise BadInputError(f"{what} must look like lo:hi:count, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise BadInputError(f"bad {what} value: {e}") from e
    if hi <= lo or count < 2:
        raise BadInputError(f"{what} needs hi > lo and count >= 2")
    return lo, hi, count


def _body_mc_gibbs(cfg: RunConfig) -> int:
    m = cfg.mixture_obj()
    p = cfg.params
    n = int(p.get("n") or 0)
    if n < 2:
        raise BadInputError("mc gibbs requires --N >= 2")
    if p.get("beta") is None:
        raise BadInputError("mc gibbs requires --beta X")
    beta = float(p["beta"])
    mc = MCConfig(
        steps=int(p.get("steps") or 4000),
        burn_in=int(p.get("burn_in") or 1000),
        thin=int(p.get("thin") or 10),
        step_size=float(p.get("step_size") or 0.3),
        chain_index=int(p.get("chain_index") or 0),
    )
    f = sample_field(m, n, seed=cfg.seed, field_index=int(p.get("field_index") or 0))
    run = gibbs_mcmc(f, beta, mc)
    norm_dev = float(np.max(np.abs(np.sum(run.samples**2, axis=1) - n)))
    report = {
        "manifest": run.manifest(),
        "energy_mean_density": float(run.energies.mean() / n),
        "energy_std_density": float(run.energies.std(ddof=1) / n) if len(run.energies) > 1 else 0.0,
        "max_norm_dev": norm_dev,
        "config": json.loads(cfg.to_json()),
    }
    if run.samples.shape[0] >= 2:
        hist = overlap_statistics(run, run)
        report["overlap_mean"] = hist.mean
        report["overlap_std"] = hist.std
    click.echo(
        "acceptance %.4f, energy density %.6g, max norm dev %.2e"
        % (run.acceptance_rate, report["energy_mean_density"], norm_dev)
    )
    if p.get("dump"):
        dump_samples(p["dump"], run.samples)
        click.echo(f"wrote {p['dump']}")
    _emit(_render(report, cfg.format), cfg.out)
    return 0


_BODIES = {
    "parisi": _body_parisi,
    "landscape": _body_landscape,
    "fp": _body_fp,
    "mc.validate-conditioning": _body_mc_validate,
    "mc.complexity": _body_mc_complexity,
    "mc.gibbs": _body_mc_gibbs,
}


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None, help="RunConfig JSON file; flags override its values.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    fn = click.option("--out", type=click.Path(), default=None, help="Artifact path (stdout if omitted).")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(fn)
    return fn


def _build_config(ctx, command, config_path, mixture_path, seed, out, fmt, params):
    base, merged = _merge(ctx, config_path, params)
    mixture = _mixture_dict(mixture_path)
    if mixture is None and base is not None:
        mixture = base.mixture
    cfg = RunConfig(
        command=command,
        mixture=mixture,
        params=merged,
        seed=int(_carried(ctx, base, "seed", "seed", seed)),
        out=_carried(ctx, base, "out", "out", out),
        format=_carried(ctx, base, "fmt", "format", fmt),
    )
    return cfg


@click.group()
def main():
    """Analytics and Monte Carlo laboratory for spherical mixed p-spin models."""


@main.command("parisi")
@click.option("--mixture", "mixture_path", type=click.Path(), default=None, help="Mixture JSON file.")
@click.option("--beta", type=float, default=None)
@click.option("--zero-temp", "zero_temp", is_flag=True, default=False)
@click.option("--k-max", "k_max", type=int, default=None)
@click.option("--starts", type=int, default=None)
@click.option("--solver-seed", "solver_seed", type=int, default=None)
@_common
@click.pass_context
def cmd_parisi(ctx, mixture_path, beta, zero_temp, k_max, starts, solver_seed, config_path, seed, out, fmt):
    """Minimize the free-energy functional; print atoms, value, certificate."""
    params = {
        "beta": beta,
        "zero_temp": zero_temp,
        "k_max": k_max,
        "starts": starts,
        "solver_seed": solver_seed,
    }
    cfg = _guarded(_build_config, ctx, "parisi", config_path, mixture_path, seed, out, fmt, params)
    sys.exit(_guarded(_body_parisi, cfg))


@main.command("landscape")
@click.option("--mixture", "mixture_path", type=click.Path(), default=None)
@click.option("--theta", is_flag=True, default=False, help="Emit the complexity surface CSV.")
@click.option("--identities", is_flag=True, default=False, help="Report ladder identity deviations.")
@click.option("--gs", is_flag=True, default=False, help="Emit the ground-state curve CSV.")
@click.option("--beta", type=float, default=None)
@click.option("--grid", type=int, default=None)
@click.option("--e-range", "e_range", type=str, default=None, help="lo:hi for the energy axis.")
@click.option("--r-range", "r_range", type=str, default=None, help="lo:hi for the radial axis.")
@click.option("--qgrid", type=str, default=None, help="lo:hi:step for radius-squared values.")
@click.option("--k-max", "k_max", type=int, default=None)
@_common
@click.pass_context
def cmd_landscape(ctx, mixture_path, theta, identities, gs, beta, grid, e_range, r_range, qgrid, k_max, config_path, seed, out, fmt):
    """Complexity surface, ground-state curve, and ladder identity reports."""
    params = {
        "theta": theta,
        "identities": identities,
        "gs": gs,
        "beta": beta,
        "grid": grid,
        "e_range": e_range,
        "r_range": r_range,
        "qgrid": qgrid,
        "k_max": k_max,
    }
    cfg = _guarded(_build_config, ctx, "landscape", config_path, mixture_path, seed, out, fmt, params)
    sys.exit(_guarded(_body_landscape, cfg))


@main.command("fp")
@click.option("--mixture", "mixture_path", type=click.Path(), default=None)
@click.option("--beta", type=float, default=None)
@click.option("--beta-prime", "beta_prime", type=float, default=None)
@click.option("--r-grid", "r_grid", type=str, default=None, help="lo:hi:step overlap sweep.")
@click.option("--both-regimes", "both_regimes", is_flag=True, default=False)
@click.option("--k-max", "k_max", type=int, default=None)
@click.option("--scan-points", "scan_points", type=int, default=None)
@click.option("--solver-seed", "solver_seed", type=int, default=None)
@_common
@click.pass_context
def cmd_fp(ctx, mixture_path, beta, beta_prime, r_grid, both_regimes, k_max, scan_points, solver_seed, config_path, seed, out, fmt):
    """Sweep the constrained-overlap potential over r; auto-selects the regime."""
    params = {
        "beta": beta,
        "beta_prime": beta_prime,
        "r_grid": r_grid,
        "both_regimes": both_regimes,
        "k_max": k_max,
        "scan_points": scan_points,
        "solver_seed": solver_seed,
    }
    cfg = _guarded(_build_config, ctx, "fp", config_path, mixture_path, seed, out, fmt, params)
    sys.exit(_guarded(_body_fp, cfg))


@main.group("mc")
def cmd_mc():
    """Small-dimension Monte Carlo laboratory."""


@cmd_mc.command("validate-conditioning")
@_common
@click.pass_context
def cmd_mc_validate(ctx, config_path, seed, out, fmt):
    """Run the sampled-kernel validation battery; pass/fail per test."""
    cfg = _guarded(_build_config, ctx, "mc.validate-conditioning", config_path, None, seed, out, fmt, {})
    sys.exit(_guarded(_body_mc_validate, cfg))


@cmd_mc.command("complexity")
@click.option("--mixture", "mixture_path", type=click.Path(), default=None)
@click.option("--N", "n", type=int, default=None)
@click.option("--fields", type=int, default=None)
@click.option("--q", type=float, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--bootstrap", type=int, default=None)
@click.option("--e-grid", "e_grid", type=str, default=None, help="lo:hi:count bin edges.")
@click.option("--r-grid", "r_grid", type=str, default=None, help="lo:hi:count bin edges.")
@_common
@click.pass_context
def cmd_mc_complexity(ctx, mixture_path, n, fields, q, restarts, bootstrap, e_grid, r_grid, config_path, seed, out, fmt):
    """Exploratory critical-point census over (energy, radial-derivative) bins."""
    params = {
        "n": n,
        "fields": fields,
        "q": q,
        "restarts": restarts,
        "bootstrap": bootstrap,
        "e_grid": e_grid,
        "r_grid": r_grid,
    }
    cfg = _guarded(_build_config, ctx, "mc.complexity", config_path, mixture_path, seed, out, fmt, params)
    sys.exit(_guarded(_body_mc_complexity, cfg))


@cmd_mc.command("gibbs")
@click.option("--mixture", "mixture_path", type=click.Path(), default=None)
@click.option("--N", "n", type=int, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--burn-in", "burn_in", type=int, default=None)
@click.option("--thin", type=int, default=None)
@click.option("--step-size", "step_size", type=float, default=None)
@click.option("--chain-index", "chain_index", type=int, default=None)
@click.option("--field-index", "field_index", type=int, default=None)
@click.option("--dump", type=click.Path(), default=None, help="Write samples to a binary dump.")
@_common
@click.pass_context
def cmd_mc_gibbs(ctx, mixture_path, n, beta, steps, burn_in, thin, step_size, chain_index, field_index, dump, config_path, seed, out, fmt):
    """Run one Metropolis chain and report chain diagnostics."""
    params = {
        "n": n,
        "beta": beta,
        "steps": steps,
        "burn_in": burn_in,
        "thin": thin,
        "step_size": step_size,
        "chain_index": chain_index,
        "field_index": field_index,
        "dump": dump,
    }
    cfg = _guarded(_build_config, ctx, "mc.gibbs", config_path, mixture_path, seed, out, fmt, params)
    sys.exit(_guarded(_body_mc_gibbs, cfg))


@main.command("run")
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.pass_context
def cmd_run(ctx, config_path):
    """Replay a RunConfig file; artifacts are byte-identical to the flag run."""
    def body():
        cfg = RunConfig.from_json(_read(config_path))
        if cfg.command not in _BODIES:
            raise BadInputError(
                f"unknown command {cfg.command!r}; expected one of {sorted(_BODIES)}"
            )
        return _BODIES[cfg.command](cfg)

    sys.exit(_guarded(body))


if __name__ == "__main__":  # pragma: no cover
    main()
