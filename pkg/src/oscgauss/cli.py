"""Command-line front end: ``python -m oscgauss <command> [flags]``.

Each command writes one artifact (JSON or CSV) and a manifest next to it
recording the full configuration and library version.

Exit codes: 0 success, 2 bad configuration, 3 polynomial does not exist,
4 an iteration failed to converge or precision ran out.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import mpmath
from mpmath import mpc, mpf

from . import __version__
from . import asymptotics as asy
from . import export, orthopoly, potential, verify
from .errors import ExistenceFailure, NonConvergence, OscGaussError, PrecisionExhausted
from .precision import PrecisionContext

COMMANDS = ("lambda0", "moments", "recurrence", "zeros", "quadrature", "integrate", "curve",
            "trajectories", "classify", "asymptotics", "verify")

INTEGRANDS = {
    "one": lambda x: mpc(1),
    "x": lambda x: x,
    "x2": lambda x: x * x,
    "exp": mpmath.exp,
    "cos": mpmath.cos,
    "runge": lambda x: 1 / (1 + 25 * x * x),
}

_NEEDS_N = {"moments", "recurrence", "zeros", "quadrature", "integrate", "asymptotics"}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    omega: str | None = None
    lam: str | None = None
    digits: int | None = None
    step: float = 1e-3
    tol: str | None = None
    out: str | None = None
    format: str = "json"
    delta: float = asy.DEFAULT_DELTA
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.digits is not None and self.digits < 20:
            raise ConfigError("--digits must be at least 20")
        if self.command in _NEEDS_N:
            if self.n is None or self.n < 1:
                raise ConfigError(f"{self.command} needs --n >= 1")
            if (self.omega is None) == (self.lam is None):
                raise ConfigError("give exactly one of --omega and --lambda")
        if self.command in ("curve", "trajectories", "classify", "verify") and self.lam is None:
            raise ConfigError(f"{self.command} needs --lambda")
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")
        if self.step <= 0:
            raise ConfigError("--step must be positive")

    def params(self) -> orthopoly.ProblemParams:
        if self.omega is not None:
            return orthopoly.ProblemParams.from_omega(self.n, self.omega, self.digits)
        return orthopoly.ProblemParams.from_lambda(self.n, self.lam, self.digits)

    def ctx(self, default: int = 50) -> PrecisionContext:
        return PrecisionContext(self.digits or default)

    def output_path(self) -> Path:
        return Path(self.out) if self.out else Path(f"{self.command}.{self.format}")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--omega")
    common.add_argument("--lambda", dest="lam")
    common.add_argument("--digits", type=int)
    common.add_argument("--step", type=float, default=1e-3)
    common.add_argument("--tol")
    common.add_argument("--out")
    common.add_argument("--format", default="json", choices=("json", "csv"))
    common.add_argument("--delta", type=float, default=asy.DEFAULT_DELTA)

    p = argparse.ArgumentParser(
        prog="oscgauss",
        description="Orthogonal polynomials, quadrature and asymptotics for the weight exp(i omega x) on [-1, 1].")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "moments":
            sp.add_argument("--kmax", type=int, help="highest moment (default 2n)")
        if name == "zeros":
            sp.add_argument("--curve-init", action="store_true",
                            help="start the root finder from the S-curve")
        if name == "integrate":
            sp.add_argument("--integrand", default="exp", choices=sorted(INTEGRANDS))
        if name == "asymptotics":
            sp.add_argument("--formula", default="auto", choices=("auto", "outer", "inner", "endpoint"))
            sp.add_argument("--z", action="append", required=True,
                            help="evaluation point as re,im (repeatable)")
        if name == "verify":
            sp.add_argument("--report", default="convergence", choices=("zeros", "cdf", "convergence"))
            sp.add_argument("--ns", default="20,40,80")
            sp.add_argument("--quantity", default="a_sq_scaled", choices=verify.QUANTITIES)
            sp.add_argument("--z", help="evaluation point re,im for polynomial quantities")
    return p


def _point(text: str, digits: int = 50) -> mpc:
    with PrecisionContext(digits).scope():
        try:
            parts = [mpf(v) for v in text.split(",")]
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad point {text!r}") from exc
        if len(parts) not in (1, 2):
            raise ConfigError(f"bad point {text!r}")
        return mpc(*parts)


def _curve(cfg: RunConfig, lam) -> potential.SCurve:
    ctx = PrecisionContext(max(30, cfg.digits or 30))
    tol = mpf(cfg.tol) if cfg.tol else None
    return potential.trace_scurve(lam, step=cfg.step, curve_tol=tol, ctx=ctx)


def _recurrence(cfg: RunConfig):
    pp = cfg.params()
    mom, rec = orthopoly.build_recurrence(pp.n, pp.omega, cfg.digits)
    return pp, mom, rec


def _execute(cfg: RunConfig):
    c = cfg.command
    ex = cfg.extra
    if c == "lambda0":
        ctx = cfg.ctx(40)
        lam0 = potential.solve_lambda0(ctx)
        return {"lambda0": lam0, "h_at_lambda0": potential.h_of_lambda(lam0, ctx)}
    if c == "moments":
        pp = cfg.params()
        kmax = ex.get("kmax") if ex.get("kmax") is not None else 2 * pp.n
        return orthopoly.moments(pp.omega, kmax, pp.ctx)
    if c == "recurrence":
        _pp, mom, rec = _recurrence(cfg)
        rec.require(cfg.n)
        return rec
    if c in ("zeros", "quadrature"):
        pp, mom, rec = _recurrence(cfg)
        init = None
        if ex.get("curve_init") and pp.lam < potential.solve_lambda0() and pp.lam > 0:
            init = _curve(cfg, pp.lam)
        if c == "zeros":
            return tuple(orthopoly.zeros(rec, pp.n, init=init))
        return orthopoly.quadrature_rule(rec, pp.n, init=init)
    if c == "integrate":
        pp, mom, rec = _recurrence(cfg)
        rule = orthopoly.quadrature_rule(rec, pp.n)
        f = INTEGRANDS[ex["integrand"]]
        with rule.ctx.scope():
            value = orthopoly.integrate(rule, f)
        ref = orthopoly.oracle_integrate(f, pp.omega, PrecisionContext(max(30, (cfg.digits or 30))))
        return {"integrand": ex["integrand"], "n": pp.n, "omega": pp.omega, "value": value, "oracle": ref}
    if c == "curve":
        return _curve(cfg, cfg.lam)
    if c == "trajectories":
        ctx = PrecisionContext(max(30, cfg.digits or 30))
        with ctx.scope():
            lam = mpf(cfg.lam)
        zs = potential.z_star(lam, ctx)
        step = max(cfg.step, 1e-3)
        return tuple(potential.trace_trajectory(zs, lam, a, step=step, ctx=ctx)
                     for a in potential.launch_angles(lam, ctx))
    if c == "classify":
        return potential.classify(cfg.lam, cfg.ctx(30))
    if c == "asymptotics":
        pp = cfg.params()
        curve = _curve(cfg, pp.lam)
        ctx = cfg.ctx(50)
        out = []
        for text in ex["z"]:
            z = _point(text, ctx.digits)
            kind = ex["formula"]
            if kind == "auto":
                pred = asy.predict(z, pp.n, pp.lam, curve, ctx, delta=cfg.delta)
            elif kind == "outer":
                pred = asy.AsymptoticPrediction(asy.Formula.OUTER,
                                                asy.outer_pn(z, pp.n, pp.lam, curve, ctx, delta=cfg.delta), True)
            elif kind == "inner":
                pred = asy.AsymptoticPrediction(asy.Formula.INNER,
                                                asy.inner_pn(z, pp.n, pp.lam, curve, ctx, delta=cfg.delta), True)
            else:
                which = 1 if z.real > 0 else -1
                f = asy.Formula.ENDPOINT_P1 if which == 1 else asy.Formula.ENDPOINT_M1
                pred = asy.AsymptoticPrediction(
                    f, asy.endpoint_pn(z, pp.n, pp.lam, curve, which, ctx, delta=cfg.delta), True)
            _m, rec = orthopoly.build_recurrence(pp.n, pp.omega, cfg.digits)
            computed = orthopoly.eval_poly(rec, pp.n, z)
            with ctx.scope():
                rel = abs(pred.value / computed - 1)
            out.append({"z": z, "n": pp.n, "lambda": pp.lam, "formula": pred.formula.value,
                        "predicted": pred.value, "computed": computed, "rel_err": rel})
        return out
    if c == "verify":
        with cfg.ctx(50).scope():
            lam = mpf(cfg.lam)
        try:
            ns = [int(v) for v in ex["ns"].split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --ns {ex['ns']!r}") from exc
        if ex["report"] == "convergence":
            z = _point(ex["z"], cfg.digits or 50) if ex.get("z") else None
            curve = _curve(cfg, lam) if ex["quantity"] in ("outer", "inner", "endpoint") else None
            return verify.convergence_table(ex["quantity"], ns, lam, cfg.ctx(50), z=z, curve=curve,
                                            delta=cfg.delta, digits=cfg.digits)
        curve = _curve(cfg, lam)
        reports = []
        for n in ns:
            _m, rec = orthopoly.build_recurrence(n, lam * n, cfg.digits)
            zs = orthopoly.zeros(rec, n, init=curve if lam > 0 else None)
            if ex["report"] == "zeros":
                reports.append(verify.zero_curve_report(zs, curve))
            else:
                reports.append(verify.cdf_report(zs, curve))
        return tuple(reports)
    raise ConfigError(f"unknown command {c}")


def _render(result, cfg: RunConfig) -> str:
    if cfg.format == "json":
        return export.dumps(result, command=cfg.command)
    if isinstance(result, dict):
        keys = list(result)
        vals = [export.encode(v) for v in result.values()]
        flat = [json.dumps(v) if isinstance(v, dict) else v for v in vals]
        return ",".join(keys) + "\n" + ",".join(str(v) for v in flat) + "\n"
    if isinstance(result, list):
        keys = []
        for k, v in result[0].items():
            keys += [f"{k}_re", f"{k}_im"] if isinstance(v, mpc) else [k]
        lines = [",".join(keys)]
        for row in result:
            cells = []
            for v in row.values():
                e = export.encode(v)
                cells += [e["re"], e["im"]] if isinstance(e, dict) else [str(e)]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
    return export.to_csv(result)


def run(argv=None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    extra = {k: v for k, v in vars(ns).items()
             if k not in ("command", "n", "omega", "lam", "digits", "step", "tol", "out", "format", "delta")}
    cfg = RunConfig(ns.command, ns.n, ns.omega, ns.lam, ns.digits, ns.step, ns.tol, ns.out,
                    ns.format, ns.delta, extra)
    try:
        cfg.validate()
        result = _execute(cfg)
    except ConfigError as exc:
        print(f"oscgauss: configuration error: {exc}", file=sys.stderr)
        return 2
    except ExistenceFailure as exc:
        print(f"oscgauss: {exc}", file=sys.stderr)
        return 3
    except (NonConvergence, PrecisionExhausted) as exc:
        print(f"oscgauss: {exc}", file=sys.stderr)
        return 4
    except (OscGaussError, ValueError) as exc:
        print(f"oscgauss: {exc}", file=sys.stderr)
        return 2
    path = cfg.output_path()
    export.atomic_write(path, _render(result, cfg))
    manifest = {"schema": export.SCHEMA, "version": __version__, "artifact": path.name,
                "argv": list(argv) if argv is not None else sys.argv[1:], "config": asdict(cfg)}
    export.atomic_write(path.with_name(path.name + ".manifest.json"),
                        json.dumps(manifest, indent=1, default=str) + "\n")
    print(path)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
