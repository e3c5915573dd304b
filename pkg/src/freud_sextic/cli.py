"""Command-line front end: ``gamma``, ``moments``, ``zeros`` and ``verify``.

Tables go out as CSV, verification reports as JSON.  Settings come from
``--config`` (a JSON object) with command-line flags taking precedence.
Exit codes: 0 success, 1 a gating check failed (or a numerical error),
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field

from .errors import FreudError, PreconditionError
from .moments import check_agreement, check_derivative_identity, check_shift_identity, moment_table
from .numerics import PrecisionContext
from .report import combine_reports, fmt
from .weight import WeightParams

CHECKS = ("moments", "string", "toda", "dde2", "ladder", "m1", "m2prime", "ode", "quasi", "hankel",
          "zeros", "electro")
METHODS = ("stieltjes", "hankel", "string")

DEFAULTS = {"c": "1", "t": "0", "sigma": "0", "digits": 120, "n_max": 30, "method": "stieltjes",
            "moment_method": "series", "checks": ",".join(CHECKS), "n": None, "electrostatic": False,
            "tol_identity": None, "tol_quadrature": None, "out": None, "timings": False}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    c: str
    t: str
    sigma: str
    digits: int
    n_max: int
    method: str
    moment_method: str
    checks: list = field(default_factory=list)
    n: int | None = None
    electrostatic: bool = False
    tol_identity: float | None = None
    tol_quadrature: float | None = None
    out: str | None = None
    timings: bool = False

    def params(self) -> WeightParams:
        def exp10(tol):
            return None if tol is None else -math.log10(float(tol))

        ctx = PrecisionContext(self.digits, exp10(self.tol_identity), exp10(self.tol_quadrature))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return WeightParams(self.c, self.t, self.sigma, ctx)


def build_config(ns: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(k.replace("-", "_") for k in data) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update({k.replace("-", "_"): v for k, v in data.items()})
    for key in DEFAULTS:
        val = getattr(ns, key, None)
        if val is not None and val is not False:
            merged[key] = val
    checks = merged["checks"]
    if isinstance(checks, str):
        checks = [s.strip() for s in checks.split(",") if s.strip()]
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown check(s): {', '.join(bad)}; choose from {', '.join(CHECKS)}")
    if merged["method"] not in METHODS:
        raise UsageError(f"unknown method {merged['method']!r}")
    merged["checks"] = checks
    try:
        merged["digits"] = int(merged["digits"])
        merged["n_max"] = int(merged["n_max"])
        if merged["n"] is not None:
            merged["n"] = int(merged["n"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    for key in ("c", "t", "sigma"):
        merged[key] = str(merged[key])
    if merged["n_max"] < 1:
        raise UsageError("--n-max must be at least 1")
    return RunConfig(**merged)


def make_table(cfg: RunConfig, p: WeightParams, N: int | None = None):
    from .recurrence import gamma_hankel, gamma_stieltjes, gamma_string_recursion

    N = cfg.n_max if N is None else N
    if cfg.method == "hankel":
        return gamma_hankel(p, N)
    if cfg.method == "string":
        return gamma_string_recursion(p, N, reference=gamma_stieltjes(p, N))
    return gamma_stieltjes(p, N)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gamma(cfg: RunConfig) -> int:
    p = cfg.params()
    table = make_table(cfg, p)
    lines = ["n,gamma,Gamma_hat"]
    for n in range(table.N + 1):
        lines.append(f"{n},{fmt(table.gammas[n], cfg.digits)},{fmt(table.norms[n], cfg.digits)}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_moments(cfg: RunConfig) -> int:
    p = cfg.params()
    tab = moment_table(p, cfg.n_max, cfg.moment_method)
    lines = ["k,eta_2k"] + [f"{k},{fmt(v, cfg.digits)}" for k, v in enumerate(tab.values)]
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_zeros(cfg: RunConfig) -> int:
    from .zeros import compute_zeros, electrostatic_items

    n = cfg.n if cfg.n is not None else cfg.n_max
    if not 1 <= n <= cfg.n_max:
        raise UsageError(f"--n must lie in 1..n-max ({cfg.n_max})")
    p = cfg.params()
    # ladder coefficients of S_n need gamma_{n+2}
    table = make_table(cfg, p, max(cfg.n_max, n + 2) if cfg.electrostatic else cfg.n_max)
    zs = compute_zeros(table, n).zeros
    header = "j,zero"
    resid = {}
    if cfg.electrostatic:
        header += ",electrostatic_residual"
        if n >= 2:
            items, notes = electrostatic_items(table, n)
            resid = {int(it["label"].split("j=")[1]): it["residual"] for it in items}
            for note in notes:
                print(note, file=sys.stderr)
    lines = [header]
    for j, x in enumerate(zs):
        row = f"{j},{fmt(x, cfg.digits)}"
        if cfg.electrostatic:
            row += "," + (fmt(resid[j], 10) if j in resid else "")
        lines.append(row)
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def run_check(name: str, cfg: RunConfig, p: WeightParams, table):
    from . import ladder, polynomials, recurrence, zeros

    N = table.N
    top = N - 2  # largest n whose ladder coefficients are available
    if name == "moments":
        parts = [check_agreement(p, range(9)), check_shift_identity(p, range(7)),
                 check_derivative_identity(p, 1), check_derivative_identity(p, 2)]
        return combine_reports("moments", p.echo(), parts)
    if name == "string":
        return recurrence.check_string_equation(table, range(1, top + 1))
    if name == "toda":
        return recurrence.check_toda(p, range(1, min(15, top) + 1))
    if name == "dde2":
        return recurrence.check_second_order_dde(p, range(1, min(8, N) + 1))
    if name == "ladder":
        ns = range(1, min(10, top - 1) + 1)
        return combine_reports("ladder", p.echo(), [ladder.check_lowering(table, ns),
                                                     ladder.check_AnBn_lemma(table, ns)])
    if name == "m1":
        return ladder.check_M1(table, range(0, min(15, top - 1) + 1))
    if name == "m2prime":
        return ladder.check_M2prime(table, range(1, min(10, top) + 1))
    if name == "ode":
        return ladder.check_ode(table, range(1, min(10, top) + 1))
    if name == "quasi":
        hi = min(12, N - 4)
        if hi < 6:
            raise UsageError("quasi check needs --n-max >= 10")
        return ladder.check_quasi(table, range(6, hi + 1))
    if name == "hankel":
        return polynomials.check_hankel_product(p, range(1, min(10, N) + 1))
    if name == "zeros":
        return zeros.check_zeros(table, N)
    if name == "electro":
        return zeros.electrostatic_residual(table, range(2, min(12, top) + 1))
    raise UsageError(f"unknown check {name!r}")


def cmd_verify(cfg: RunConfig) -> int:
    p = cfg.params()
    table = make_table(cfg, p)
    reports = []
    for name in cfg.checks:
        rep = run_check(name, cfg, p, table)
        reports.append(rep)
        print(rep.summary(), file=sys.stderr)
    ok = all(r.passed for r in reports if r.gating)
    doc = {
        "params": p.echo(),
        "method": cfg.method,
        "n_max": cfg.n_max,
        "pass": ok,
        "reports": [r.to_dict(min(cfg.digits, 30), include_runtime=cfg.timings) for r in reports],
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with settings (flags override it)")
    common.add_argument("--c", help="sextic coefficient c > 0")
    common.add_argument("--t", help="deformation parameter t")
    common.add_argument("--sigma", help="exponent parameter sigma > -1/2")
    common.add_argument("--digits", type=int, help="decimal digits of working precision (default 120)")
    common.add_argument("--n-max", type=int, dest="n_max", help="largest index N (default 30)")
    common.add_argument("--method", choices=METHODS, help="producer of the recurrence table")
    common.add_argument("--moment-method", dest="moment_method", choices=("series", "quadrature"))
    common.add_argument("--tol-identity", dest="tol_identity", type=float,
                        help="tolerance for identity checks (default 10^(-digits/2))")
    common.add_argument("--tol-quadrature", dest="tol_quadrature", type=float,
                        help="tolerance for quadrature-level agreement (default 10^(10-digits))")
    common.add_argument("--out", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(prog="freud-sextic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gamma", parents=[common], help="recurrence coefficients as CSV")
    sub.add_parser("moments", parents=[common], help="even moments eta_2k, k = 0..n-max, as CSV")
    pz = sub.add_parser("zeros", parents=[common], help="zeros of S_n as CSV")
    pz.add_argument("--n", type=int, help="degree (default n-max)")
    pz.add_argument("--electrostatic", action="store_true", help="add the electrostatic residual column")
    pv = sub.add_parser("verify", parents=[common], help="run identity checks, write a JSON report")
    pv.add_argument("--checks", help="comma-separated subset of: " + ",".join(CHECKS))
    pv.add_argument("--timings", action="store_true", help="include runtimes (output no longer reproducible)")
    return parser


COMMANDS = {"gamma": cmd_gamma, "moments": cmd_moments, "zeros": cmd_zeros, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with 2 on malformed flags
    try:
        cfg = build_config(ns)
        return COMMANDS[ns.command](cfg)
    except (UsageError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FreudError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
