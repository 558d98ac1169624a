"""Command-line front end: verification sweeps and reports as JSON or CSV.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .bk_spectral import block_for_level, block_spectrum
from .errors import LocalRHError
from .mellin_real import fit_normalization, gamma_real_closed, gamma_real_oracle, s_from_E
from .padic_core import is_prime
from .padic_spectral import (PadicEigenfunctionSpec, SelfInversivePoly, padic_mellin_closed,
                             padic_mellin_shell_oracle, padic_record, zeros_in_E)
from .riemann_reference import (T_MAX, PlaceAssignment, chi_mod4, critical_zero_scan,
                                dirichlet_sum, euler_product, functional_equation_residuals,
                                modified_zero_scan, real_place_constant, weyl_count)
from .zero_cert import certify_level

SCHEMA = 1


class ConfigError(Exception):
    pass


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _check(residual: float, tol: float) -> dict:
    return {"residual": float(residual), "tol": float(tol), "pass": bool(residual <= tol)}


def _primes(text: str) -> list[int]:
    try:
        ps = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse prime list {text!r}") from None
    if not ps:
        raise ConfigError("empty prime list")
    for p in ps:
        if p == 2:
            raise ConfigError("p = 2 is refused: the p-adic eigenfunction construction "
                              "holds only for odd primes (p != 2)")
        if not is_prime(p):
            raise ConfigError(f"{p} is not prime")
    return ps


def _place(text: str, assign: dict) -> None:
    """inf:N or p:N[:lam] into the assignment dict."""
    parts = text.split(":")
    try:
        if parts[0] == "inf" and len(parts) == 2:
            assign["inf"] = int(parts[1])
            return
        if len(parts) in (2, 3):
            p, N = int(parts[0]), int(parts[1])
            lam = int(parts[2]) if len(parts) == 3 else 1
            assign.setdefault("finite", []).append((p, N, lam))
            return
    except ValueError:
        pass
    raise ConfigError(f"cannot parse place modification {text!r}")


# ------------------------------------------------------------------ commands

def cmd_real_verify(args) -> list[dict]:
    if args.n_max < 1:
        raise ConfigError("empty N range: --n-max must be at least 1")
    tol = args.tol if args.tol is not None else 1e-8
    records = []
    for N in range(1, args.n_max + 1):
        t0 = time.perf_counter()
        rep = certify_level(N)
        fit = fit_normalization(N)
        K = len(rep.eigenvalues)
        rec = {
            "N": N, "delta": N % 2, "K": K,
            "eigenvalues": rep.eigenvalues,
            "oracle_zeros": rep.real_zeros,
            "pair_distances": rep.pair_distances,
            "c_N": _cplx(fit.c_N),
            "winding": rep.winding,
            "poles_enclosed": rep.poles_enclosed,
            "contour_count": rep.contour_count,
            "checks": {
                "pairing": _check(rep.max_pair_distance if rep.certified else math.inf, tol),
                "zero_count": _check(abs(len(rep.real_zeros) - K), 0),
                "contour_count": _check(abs(rep.contour_count - K), 0),
                "neg_ratio_spread": _check(fit.spread, tol),
            },
        }
        if args.timing:
            rec["wall_time"] = time.perf_counter() - t0
        records.append(rec)
    return records


def real_verify_csv(records) -> list[list]:
    rows = [["N", "delta", "K", "eigenvalue", "oracle_zero", "pair_dist"]]
    for r in records:
        if not r["K"]:
            rows.append([r["N"], r["delta"], 0, "", "", ""])
        for i, e in enumerate(r["eigenvalues"]):
            z = r["oracle_zeros"][i] if i < len(r["oracle_zeros"]) else ""
            d = r["pair_distances"][i] if i < len(r["pair_distances"]) else ""
            rows.append([r["N"], r["delta"], r["K"], repr(e), repr(z) if z != "" else "",
                         repr(d) if d != "" else ""])
    return rows


def cmd_padic_verify(args) -> list[dict]:
    primes = _primes(args.primes)
    if args.n_max < 1:
        raise ConfigError("empty N range: --n-max must be at least 1")
    tol = args.tol if args.tol is not None else 1e-12
    records = []
    for p in primes:
        for N in range(1, args.n_max + 1):
            for lam in (1, -1):
                t0 = time.perf_counter()
                rec = padic_record(p, N, lam, f_seed=args.seed if args.with_f_part else None)
                rec["checks"] = {
                    "coefficients": _check(rec["coef_residual"], tol),
                    "unitarity": _check(rec["unitarity_residual"], tol),
                    "root_modulus": _check(rec["root_modulus_deviation"], 1e-10),
                    "oracle_closed": _check(rec["oracle_closed_deviation"], tol),
                }
                if "f_invariance_deviation" in rec:
                    rec["checks"]["f_invariance"] = _check(rec["f_invariance_deviation"], tol)
                if args.timing:
                    rec["wall_time"] = time.perf_counter() - t0
                records.append(rec)
    return records


def padic_verify_csv(records) -> list[list]:
    rows = [["p", "N", "lambda", "coef_residual", "unitarity_residual",
             "root_modulus_deviation", "oracle_closed_deviation"]]
    for r in records:
        rows.append([r["p"], r["N"], r["lambda"], repr(r["coef_residual"]),
                     repr(r["unitarity_residual"]), repr(r["root_modulus_deviation"]),
                     repr(r["oracle_closed_deviation"])])
    return rows


def _assignment(args) -> PlaceAssignment | None:
    if not args.modify:
        return None
    raw: dict = {}
    for text in args.modify:
        _place(text, raw)
    try:
        return PlaceAssignment(raw.get("inf", 0), tuple(raw.get("finite", ())))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _expected_extra(assign: PlaceAssignment, t_max: float) -> list[float]:
    extra = []
    if assign.n_inf:
        extra.extend(float(e) for e in block_spectrum(block_for_level(assign.n_inf)))
    for p, N, lam in assign.finite:
        if N:
            extra.extend(float(e) for e in zeros_in_E(SelfInversivePoly(p, N, lam), t_max))
    return sorted(e for e in extra if abs(e) <= t_max)


def cmd_zeta_report(args) -> list[dict]:
    if not 0 < args.t_max <= T_MAX:
        raise ConfigError(f"--t-max must lie in (0, {T_MAX:g}]")
    assign = _assignment(args)
    tol = args.tol if args.tol is not None else 1e-8
    t0 = time.perf_counter()
    zeros = critical_zero_scan(args.t_max)
    smooth = weyl_count(args.t_max)
    fe = functional_equation_residuals(10, seed=args.seed)
    euler = {}
    for name, chi in (("zeta", None), ("L_mod4", chi_mod4)):
        prod, direct = euler_product(2.0, 10 ** 5, chi), dirichlet_sum(2.0, 10 ** 6, chi)
        euler[name] = {"s": 2.0, "prime_cutoff": 10 ** 5, "terms": 10 ** 6,
                       "euler_product": prod, "dirichlet_sum": direct,
                       **_check(abs(prod - direct), 1e-4)}
    rec = {
        "t_max": args.t_max,
        "zeros": zeros,
        "zero_count": len(zeros),
        "weyl_count": smooth,
        "functional_equation": [{"s": _cplx(r["s"]), **_check(r["residual"], tol)} for r in fe],
        "euler_products": euler,
        "checks": {
            "count_vs_smooth": _check(abs(len(zeros) - smooth), 2.0),
            "functional_equation": _check(max(r["residual"] for r in fe), tol),
            "euler_zeta": _check(abs(euler["zeta"]["euler_product"]
                                      - euler["zeta"]["dirichlet_sum"]), 1e-4),
            "euler_L_mod4": _check(abs(euler["L_mod4"]["euler_product"]
                                        - euler["L_mod4"]["dirichlet_sum"]), 1e-4),
        },
    }
    if assign is not None:
        mod = modified_zero_scan(assign, args.t_max)
        known = sorted(zeros + [-z for z in zeros])
        extra = [z for z in mod if min((abs(z - k) for k in known), default=math.inf) > 1e-6]
        expected = _expected_extra(assign, args.t_max)
        if len(extra) == len(expected):
            dev = max((abs(a - b) for a, b in zip(extra, expected)), default=0.0)
        else:
            dev = math.inf
        rec["modified"] = {
            "n_inf": assign.n_inf,
            "finite": [list(v) for v in assign.finite],
            "c_N": _cplx(real_place_constant(assign)),
            "zeros": mod,
            "extra_zeros": extra,
            "expected_extra_zeros": expected,
            "extra_zeros_s": [_cplx(complex(0.5, e)) for e in extra],
        }
        rec["checks"]["modified_zero_set"] = _check(dev, 1e-6)
        rec["checks"]["zeta_zeros_retained"] = _check(
            len(mod) - len(extra) - len(known), 0)
    if args.timing:
        rec["wall_time"] = time.perf_counter() - t0
    return [rec]


def zeta_report_csv(records) -> list[list]:
    rows = [["kind", "t"]]
    for r in records:
        rows.extend(["zeta_zero", repr(z)] for z in r["zeros"])
        if "modified" in r:
            rows.extend(["extra_zero", repr(z)] for z in r["modified"]["extra_zeros"])
    return rows


def _grid(args) -> np.ndarray:
    if args.points < 1:
        raise ConfigError("--points must be at least 1")
    if not args.e_min <= args.e_max:
        raise ConfigError("need --e-min <= --e-max")
    return np.linspace(args.e_min, args.e_max, args.points)


def cmd_mellin_eval(args) -> list[dict]:
    if args.n < 0:
        raise ConfigError("--n must be nonnegative")
    E = _grid(args)
    records = []
    if args.prime is None:
        if args.n > 40:
            raise ConfigError("quadrature oracle supports N <= 40")
        s = s_from_E(E)
        oracle = np.atleast_1d(gamma_real_oracle(args.n, s))
        closed = np.atleast_1d(gamma_real_closed(args.n, s))
        for e, o, c in zip(E, oracle, closed):
            # the closed form vanishes exactly at E = 0 for odd K
            ratio = _cplx(o / c) if c != 0 else None
            records.append({"place": "inf", "N": args.n, "E": float(e),
                            "oracle": _cplx(o), "closed": _cplx(c), "ratio": ratio})
    else:
        _primes(str(args.prime))
        if args.lam not in (1, -1):
            raise ConfigError("--lam must be 1 or -1")
        spec = PadicEigenfunctionSpec(args.prime, args.n, args.lam)
        oracle = np.atleast_1d(padic_mellin_shell_oracle(spec, E))
        closed = np.atleast_1d(padic_mellin_closed(spec, E))
        for e, o, c in zip(E, oracle, closed):
            records.append({"place": args.prime, "N": args.n, "lambda": args.lam,
                            "E": float(e), "oracle": _cplx(o), "closed": _cplx(c)})
    return records


def mellin_eval_csv(records) -> list[list]:
    rows = [["E", "oracle_re", "oracle_im", "closed_re", "closed_im"]]
    for r in records:
        rows.append([repr(r["E"]), repr(r["oracle"]["re"]), repr(r["oracle"]["im"]),
                     repr(r["closed"]["re"]), repr(r["closed"]["im"])])
    return rows


def cmd_bk_spectrum(args) -> list[dict]:
    if args.n_max < 1:
        raise ConfigError("empty N range: --n-max must be at least 1")
    records = []
    for N in range(1, args.n_max + 1):
        eig = block_spectrum(block_for_level(N))
        records.append({"N": N, "delta": N % 2, "K": N // 2,
                        "eigenvalues": [float(e) for e in eig]})
    return records


def bk_spectrum_csv(records) -> list[list]:
    rows = [["N", "delta", "K", "index", "eigenvalue"]]
    for r in records:
        rows.extend([r["N"], r["delta"], r["K"], i, repr(e)]
                    for i, e in enumerate(r["eigenvalues"]))
    return rows


COMMANDS = {
    "real-verify": (cmd_real_verify, real_verify_csv),
    "padic-verify": (cmd_padic_verify, padic_verify_csv),
    "zeta-report": (cmd_zeta_report, zeta_report_csv),
    "mellin-eval": (cmd_mellin_eval, mellin_eval_csv),
    "bk-spectrum": (cmd_bk_spectrum, bk_spectrum_csv),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="localrh",
                                 description="Local Riemann hypothesis verification lab")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--tol", type=float, help="override the main tolerance of the command")
    common.add_argument("--seed", type=int, default=0, help="seed for random f_part / samples")
    common.add_argument("--timing", action="store_true",
                        help="include wall times (output is then not reproducible)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("real-verify", parents=[common], help="zeros vs BK eigenvalues over R")
    p.add_argument("--n-max", type=int, default=16)

    p = sub.add_parser("padic-verify", parents=[common], help="p-adic determinant and Mellin checks")
    p.add_argument("--primes", default="3,5,7")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--with-f-part", action="store_true",
                   help="also add a seeded random f with zero shell integrals")

    p = sub.add_parser("zeta-report", parents=[common], help="zeta zeros and global checks")
    p.add_argument("--t-max", type=float, default=50.0)
    p.add_argument("--modify", action="append", metavar="PLACE",
                   help="modify a place: inf:N or p:N[:lam]; repeatable")

    p = sub.add_parser("mellin-eval", parents=[common], help="tabulate oracle and closed form")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--prime", type=int, help="p-adic place instead of the real one")
    p.add_argument("--lam", type=int, default=1)
    p.add_argument("--e-min", type=float, default=-5.0)
    p.add_argument("--e-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=21)

    p = sub.add_parser("bk-spectrum", parents=[common], help="eigenvalues of the parity blocks")
    p.add_argument("--n-max", type=int, default=16)
    return ap


def _passed(records) -> bool:
    return all(c["pass"] for r in records for c in r.get("checks", {}).values())


def render(command: str, args, records) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(COMMANDS[command][1](records))
        return buf.getvalue()
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command", "format", "out", "timing")}
    doc = {"schema": SCHEMA, "command": command, "config": config,
           "pass": _passed(records), "records": records}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _finite(obj):
    """Replace inf/nan (failed checks) by strings so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        records = _finite(func(args))
    except ConfigError as exc:
        print(f"localrh: configuration error: {exc}", file=sys.stderr)
        return 2
    except (LocalRHError, ValueError) as exc:
        print(f"localrh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = render(args.command, args, records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if _passed(records) else 1


if __name__ == "__main__":
    sys.exit(main())
