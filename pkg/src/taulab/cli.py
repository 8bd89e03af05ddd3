"""Command-line front end: every operation as a subcommand.

Exit codes: 0 success, 1 bad input, 2 a resource budget stopped the
computation or the result is partial, 3 a mathematical identity the
package promises failed (the loudest possible signal).

Identical configurations (including the seed) produce byte-identical
output regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import cyclotomic, density, factor, hecke, scans
from .errors import (
    BudgetExceededError,
    DataExhaustedError,
    IdentityViolationError,
    PartialFactorizationError,
    TableFormatError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_IDENTITY = 3


@dataclass
class RunConfig:
    """Validated parameters for one invocation."""

    command: str
    q: int | None = None
    ell: int | None = None
    n: int = 1
    weight: int = 12
    level: int = 1
    epsilon: float = 0.1
    grh_c: float | None = None
    x_bound: int = 10**4
    bins: int = 20
    limit: int = 100
    d: int | None = None
    p: int | None = None
    m: int | None = None
    two_n: int = 2
    budget: int = density.DEFAULT_ENUM_BUDGET
    trial_bound: int = factor.DEFAULT_TRIAL_BOUND
    rho_budget: int = factor.DEFAULT_RHO_BUDGET
    table: str | None = None
    out: str | None = None
    fmt: str = "text"
    workers: int = 1
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.q is not None and (self.q % 2 == 0 or not factor.is_prime(self.q)):
            raise ValueError(f"--q must be an odd prime, got {self.q}")
        if self.ell is not None and not factor.is_prime(self.ell):
            raise ValueError(f"--ell must be prime, got {self.ell}")
        if self.two_n % 2 or self.two_n < 2:
            raise ValueError(f"--two-n must be even and >= 2, got {self.two_n}")
        if self.epsilon < 0:
            raise ValueError(f"--eps must be >= 0, got {self.epsilon}")
        if self.workers < 1:
            raise ValueError(f"--workers must be >= 1, got {self.workers}")

    def form(self) -> hecke.EigenformSpec:
        if self.table:
            return hecke.ingest_table(self.table, self.weight, self.level)
        return hecke.EigenformSpec.delta()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_tau(cfg: RunConfig) -> int:
    if cfg.extra.get("find_first_prime"):
        hit = hecke.find_first_prime_tau(cfg.limit)
        if hit is None:
            _emit(cfg, f"no prime value up to {cfg.limit}")
            return EXIT_OK
        n, value = hit
        _emit(cfg, f"{n}" if cfg.fmt != "json" else json.dumps({"n": n, "value": str(value)}))
        return EXIT_OK
    series = hecke.tau_series(cfg.limit)
    _emit(cfg, "\n".join(str(series[n]) for n in range(1, cfg.limit + 1)))
    return EXIT_OK


def _cmd_coeff(cfg: RunConfig) -> int:
    f = cfg.form()
    fn = hecke.coeff_lucas if cfg.extra.get("lucas") else hecke.coeff_prime_power
    value = fn(f, cfg.p, cfg.m)
    if cfg.fmt == "json":
        _emit(cfg, json.dumps({"p": cfg.p, "m": cfg.m, "value": str(value)}))
    else:
        _emit(cfg, str(value))
    return EXIT_OK


def _cmd_psi(cfg: RunConfig) -> int:
    kind = cfg.extra.get("kind", "PSI").upper()
    upto = cfg.extra.get("upto")
    if upto:
        lines = [cyclotomic.dump_poly_line(kind, n) for n in range(3, upto + 1)]
        _emit(cfg, "\n".join(lines))
    else:
        _emit(cfg, cyclotomic.dump_poly_line(kind, cfg.n))
    return EXIT_OK


def _cmd_sympow(cfg: RunConfig) -> int:
    from .rings import ZZ, RingMatrix, Zmod, sym_pow, sym_pow_trace

    entries = [int(x) for x in cfg.extra["entries"].split(",")]
    if len(entries) != 4:
        raise ValueError("--entries must be four comma-separated integers a,b,c,d")
    ring = Zmod(cfg.extra["mod"]) if cfg.extra.get("mod") else ZZ
    mat = RingMatrix.make(ring, [entries[:2], entries[2:]])
    result = sym_pow(mat, cfg.n)
    if cfg.n >= 2 and result.trace() != sym_pow_trace(mat, cfg.n):
        raise IdentityViolationError("trace law failed for this input")
    if cfg.fmt == "json":
        _emit(cfg, json.dumps({"dim": result.dim, "rows": [list(r) for r in result.entries]}))
    else:
        _emit(cfg, "\n".join(" ".join(str(x) for x in row) for row in result.entries))
    return EXIT_OK


def _cmd_density(cfg: RunConfig) -> int:
    query = density.DensityQuery(cfg.q, cfg.ell, cfg.n, cfg.weight)
    report = density.enumerate_density(query, budget=cfg.budget, workers=cfg.workers)
    _emit(cfg, report.to_json())
    return EXIT_OK


def _cmd_lift(cfg: RunConfig) -> int:
    report = density.lift_factor(cfg.q, cfg.ell, cfg.weight, budget=cfg.budget)
    ratio = report.ratio
    payload = {
        "base": report.base.to_json_dict(),
        "lifted": report.lifted.to_json_dict(),
        "ratio": None if ratio is None else f"{ratio.numerator}/{ratio.denominator}",
        "zeroDensity": ratio is None,
    }
    _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_chebotarev(cfg: RunConfig) -> int:
    f = cfg.form()
    sample = density.chebotarev_sample(f, cfg.q, cfg.d, cfg.x_bound)
    _emit(cfg, json.dumps(sample.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_scan(cfg: RunConfig) -> int:
    f = cfg.form()
    rows, summary = scans.threshold_scan(
        f,
        cfg.two_n,
        cfg.x_bound,
        epsilon=None if cfg.grh_c is not None else cfg.epsilon,
        grh_c=cfg.grh_c,
        trial_bound=cfg.trial_bound,
        rho_budget=cfg.rho_budget,
    )
    if cfg.fmt == "csv":
        _emit(cfg, "\n".join([scans.CSV_HEADER] + [r.csv_line() for r in rows]))
        sys.stderr.write(summary.to_json() + "\n")
    elif cfg.fmt == "json":
        _emit(cfg, summary.to_json())
    else:
        _emit(cfg, summary.to_json())
    return EXIT_BUDGET if summary.unknown_count else EXIT_OK


def _cmd_tower(cfg: RunConfig) -> int:
    f = cfg.form()
    checked = 0
    for p in factor.primes_up_to(cfg.extra.get("p_max", 100)):
        if f.level % p == 0:
            continue
        for n in range(1, (cfg.extra.get("max_odd", 9) - 1) // 2 + 1):
            if not scans.check_divisibility_tower(f, p, n):
                raise IdentityViolationError(f"divisibility tower failed at p={p}, 2n={2 * n}")
            checked += 1
    _emit(cfg, f"tower verified on {checked} (p, n) pairs")
    return EXIT_OK


def _cmd_sato_tate(cfg: RunConfig) -> int:
    f = cfg.form()
    hist = scans.sato_tate_histogram(f, cfg.x_bound, cfg.bins)
    if cfg.fmt == "csv":
        _emit(cfg, "\n".join(hist.csv_lines()))
    else:
        _emit(cfg, json.dumps(hist.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _verify_identities(limit: int, report) -> bool:
    ok = True
    for n in range(3, limit + 1):
        lhs = cyclotomic.substitute_square_product(cyclotomic.psi_poly(n))
        if lhs.coeffs != cyclotomic.phi_poly(n).coeffs:
            report(f"FAIL square-product identity at n={n}")
            ok = False
        rhs = cyclotomic.substitute_square_product(cyclotomic.f_poly(n))
        if n % 2 == 0:
            rhs = cyclotomic.multiply_by_x_plus_y(rhs)
        if rhs.coeffs != cyclotomic.geometric_sum_poly(n).coeffs:
            report(f"FAIL geometric-sum identity at n={n}")
            ok = False
    report(f"PASS square-product and geometric-sum identities for n <= {limit}" if ok else "")
    euler_ok = True
    for q in [p for p in factor.primes_up_to(101) if p % 2]:
        psi = cyclotomic.psi_poly(q)
        dx, dy = cyclotomic.partial_derivatives(psi)
        m = psi.degree
        lhs_c = [0] * (m + 1)
        for i, c in enumerate(dx.coeffs):
            lhs_c[i] += c
        for i, c in enumerate(dy.coeffs):
            lhs_c[i + 1] += c
        if tuple(x * 1 for x in lhs_c) != tuple(m * c for c in psi.coeffs):
            report(f"FAIL scaling identity for partials at q={q}")
            euler_ok = False
    if euler_ok:
        report("PASS partial-derivative scaling identity for odd primes q <= 101")
    disc_ok = True
    for q in (3, 5, 7, 11, 13, 17, 19):
        tilde = cyclotomic.psi_poly(q).to_univariate()
        if abs(cyclotomic.discriminant(tilde)) != q ** ((q - 3) // 2) or abs(tilde(0)) != 1:
            report(f"FAIL discriminant law at q={q}")
            disc_ok = False
    if disc_ok:
        report("PASS discriminant magnitude law for q <= 19")
    return ok and euler_ok and disc_ok


def _verify_sympow(seed: int, report) -> bool:
    from .rings import RingMatrix, Zmod, is_torsion_scalar, sym_pow, sym_pow_kernel_test, sym_pow_trace

    ok = True
    for mod in (3, 5):
        ring = Zmod(mod)
        mats = [
            RingMatrix.make(ring, [[a, b], [c, d]])
            for a in range(mod)
            for b in range(mod)
            for c in range(mod)
            for d in range(mod)
        ]
        mats = [m for m in mats if m.is_invertible()]
        for mat in mats:
            for n in range(2, 6):
                if sym_pow(mat, n).trace() != sym_pow_trace(mat, n):
                    report(f"FAIL trace law mod {mod} at {mat.entries}, n={n}")
                    ok = False
                if sym_pow_kernel_test(mat, n) != is_torsion_scalar(mat, n):
                    report(f"FAIL kernel law mod {mod} at {mat.entries}, n={n}")
                    ok = False
    if ok:
        report("PASS trace and kernel laws exhaustively mod 3 and mod 5, n <= 5")
    rnd = random.Random(seed)
    ring = Zmod(11)

    def rand_invertible():
        while True:
            mat = RingMatrix.make(ring, [[rnd.randrange(11) for _ in range(2)] for _ in range(2)])
            if mat.is_invertible():
                return mat

    fun_ok = True
    for _ in range(200):
        x, y = rand_invertible(), rand_invertible()
        n = rnd.randrange(1, 11)
        if sym_pow(x @ y, n).entries != (sym_pow(x, n) @ sym_pow(y, n)).entries:
            report(f"FAIL functoriality at {x.entries} * {y.entries}, n={n}")
            fun_ok = False
    if fun_ok:
        report("PASS functoriality on 200 seeded random pairs mod 11")
    return ok and fun_ok


def _verify_density(report) -> bool:
    ok = True
    for q in (3, 5, 7):
        for ell in (2, 3, 5, 7, 11, 13):
            r = density.enumerate_density(density.DensityQuery(q, ell, 1, 12))
            if not r.agrees:
                report(f"FAIL closed form at q={q}, ell={ell}: {r.delta} != {r.closed_form}")
                ok = False
    if ok:
        report("PASS density closed forms for q in {3,5,7}, ell <= 13")
    lift_ok = True
    for q, ell in ((3, 5), (3, 7)):
        r = density.lift_factor(q, ell, 12)
        if r.ratio != Fraction(1, ell):
            report(f"FAIL lift ratio at (q={q}, ell={ell}): {r.ratio}")
            lift_ok = False
    if lift_ok:
        report("PASS lift ratio 1/ell at (3,5) and (3,7)")
    return ok and lift_ok


def _verify_tau(limit: int, report) -> bool:
    series = hecke.tau_series(limit)
    delta = hecke.EigenformSpec.delta()
    ok = True
    for p in factor.primes_up_to(limit):
        pm = p * p
        m = 2
        while pm <= limit:
            if series[pm] != hecke.coeff_prime_power(delta, p, m):
                report(f"FAIL series/recursion mismatch at {p}^{m}")
                ok = False
            pm *= p
            m += 1
    if ok:
        report(f"PASS series agrees with the recursion at all prime powers <= {limit}")
    psi_ok = True
    for q in (3, 5, 7):
        for p in (2, 3, 5, 7, 11, 13):
            lhs = hecke.coeff_prime_power(delta, p, q - 1)
            rhs = cyclotomic.eval_poly(cyclotomic.psi_poly(q), delta.ap(p) ** 2, p**11)
            if lhs != rhs:
                report(f"FAIL trace-polynomial identity at q={q}, p={p}")
                psi_ok = False
    if psi_ok:
        report("PASS coefficient identity a(p^(q-1)) = psi_q(a(p)^2, p^(k-1)) spot checks")
    return ok and psi_ok


def _cmd_verify(cfg: RunConfig) -> int:
    suite = cfg.extra.get("suite", "all")
    lines: list[str] = []

    def report(msg: str) -> None:
        if msg:
            lines.append(msg)

    results = []
    if suite in ("identities", "all"):
        results.append(_verify_identities(min(cfg.limit, 200) if cfg.limit > 3 else 200, report))
    if suite in ("sympow", "all"):
        results.append(_verify_sympow(cfg.seed, report))
    if suite in ("density", "all"):
        results.append(_verify_density(report))
    if suite in ("tau", "all"):
        results.append(_verify_tau(max(cfg.limit, 1000), report))
    _emit(cfg, "\n".join(lines))
    return EXIT_OK if all(results) else EXIT_IDENTITY


_COMMANDS = {
    "tau": _cmd_tau,
    "coeff": _cmd_coeff,
    "psi": _cmd_psi,
    "sympow": _cmd_sympow,
    "density": _cmd_density,
    "lift": _cmd_lift,
    "chebotarev": _cmd_chebotarev,
    "scan": _cmd_scan,
    "tower": _cmd_tower,
    "sato-tate": _cmd_sato_tate,
    "verify": _cmd_verify,
}


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", help="write output to this path instead of stdout")
    sp.add_argument("--format", dest="fmt", choices=("text", "csv", "json"), default="text")
    sp.add_argument("--workers", type=int, default=1, help="worker processes; never changes results")
    sp.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    sp.add_argument("--config", help="key=value file supplying defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taulab",
        description="Exact toolkit for eigenform coefficients at prime powers: "
        "series, trace polynomials, symmetric powers, trace-zero densities, and "
        "largest-prime-factor scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tau", help="coefficient series of the built-in weight-12 form")
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--find-first-prime", action="store_true",
                   help="print the smallest n with |tau(n)| prime instead of the series")
    _add_common(p)

    p = sub.add_parser("coeff", help="a_f(p^m) by recursion or the Lucas ladder")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--table", help="CSV table of a_p values")
    p.add_argument("--lucas", action="store_true", help="use the Lucas ladder path")
    _add_common(p)

    p = sub.add_parser("psi", help="dump trace / cyclotomic polynomial coefficients")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--kind", choices=("psi", "phi", "f"), default="psi")
    p.add_argument("--upto", type=int, help="dump all indices 3..UPTO")
    _add_common(p)

    p = sub.add_parser("sympow", help="symmetric power of a 2x2 matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--entries", required=True, help="a,b,c,d")
    p.add_argument("--mod", type=int, help="work mod this integer (default: integers)")
    _add_common(p)

    p = sub.add_parser("density", help="trace-zero density over GL2(Z/ell^n) by enumeration")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", dest="weight", type=int, default=12)
    p.add_argument("--budget", type=int, default=density.DEFAULT_ENUM_BUDGET)
    _add_common(p)

    p = sub.add_parser("lift", help="density ratio between levels ell^2 and ell")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--k", dest="weight", type=int, default=12)
    p.add_argument("--budget", type=int, default=density.DEFAULT_ENUM_BUDGET)
    _add_common(p)

    p = sub.add_parser("chebotarev", help="empirical frequency of d | a_f(p^(q-1))")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x-bound", type=int, default=10**5)
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--table")
    _add_common(p)

    p = sub.add_parser("scan", help="largest-prime-factor threshold scan over primes")
    p.add_argument("--two-n", type=int, default=2)
    p.add_argument("--eps", dest="epsilon", type=float, default=0.1)
    p.add_argument("--grh-c", type=float, help="use the power-threshold mode with this constant")
    p.add_argument("--x-bound", type=int, default=10**3)
    p.add_argument("--trial-bound", type=int, default=factor.DEFAULT_TRIAL_BOUND)
    p.add_argument("--rho-budget", type=int, default=factor.DEFAULT_RHO_BUDGET)
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--table")
    _add_common(p)

    p = sub.add_parser("tower", help="verify the prime-power divisibility tower")
    p.add_argument("--p-max", type=int, default=100)
    p.add_argument("--max-odd", type=int, default=9, help="largest odd exponent bound 2n+1")
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--table")
    _add_common(p)

    p = sub.add_parser("sato-tate", help="normalized coefficient histogram vs the semicircle law")
    p.add_argument("--x-bound", type=int, default=10**4)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--table")
    _add_common(p)

    p = sub.add_parser("verify", help="run built-in identity suites (exit 3 on failure)")
    p.add_argument("--suite", choices=("identities", "sympow", "density", "tau", "all"),
                   default="all")
    p.add_argument("--limit", type=int, default=100)
    _add_common(p)

    parser.subcommand_parsers = {name: sp for name, sp in sub.choices.items()}
    return parser


def _load_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _config_from_namespace(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for key, value in vars(ns).items():
        if key in ("command", "config") or value is None:
            continue
        if hasattr(cfg, key):
            setattr(cfg, key, value)
        else:
            cfg.extra[key] = value
    return cfg


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """A key=value file supplies defaults; explicit flags still win."""
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    overlay = {}
    for key, value in _load_config(path).items():
        for cast in (int, float, str):
            try:
                overlay[key] = cast(value)
                break
            except ValueError:
                continue
    for sp in getattr(parser, "subcommand_parsers", {}).values():
        known = {action.dest for action in sp._actions}
        sp.set_defaults(**{k: v for k, v in overlay.items() if k in known})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_defaults(parser, argv)
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except (OSError, IndexError) as exc:
        sys.stderr.write(f"error: bad --config: {exc}\n")
        return EXIT_USAGE
    try:
        cfg = _config_from_namespace(ns)
        cfg.validate()
        return _COMMANDS[cfg.command](cfg)
    except (ValueError, TableFormatError, DataExhaustedError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (BudgetExceededError, PartialFactorizationError) as exc:
        sys.stderr.write(f"budget: {exc}\n")
        return EXIT_BUDGET
    except IdentityViolationError as exc:
        sys.stderr.write(f"IDENTITY VIOLATION: {exc}\n")
        return EXIT_IDENTITY


if __name__ == "__main__":
    raise SystemExit(main())
