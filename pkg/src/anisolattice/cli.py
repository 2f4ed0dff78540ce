"""Command-line front end.

Subcommands: lattice, count, leading, sweep, fit, spectral, verify, run and
reproduce.  Rational inputs are "num/den" strings; JSON reports carry a
``schema_version`` field.  Exit codes: 0 success, 1 failed invariant checks,
2 malformed input, 3 enumeration budget exceeded, 4 degenerate fit.  Every
nonzero exit writes an error JSON object to stderr.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import _linalg as la
from .asymptotics import (FitError, dual_points, fit_remainder, leading_term, records_from_csv,
                          records_to_csv, sweep)
from .counting import BudgetExceeded, DEFAULT_BUDGET, count_points, gauss_reference
from .domains import OracleDomain, domain_from_json, domain_to_json
from .exact import format_rational, parse_rational
from .kernels import HAVE_COMPILED
from .lattice import SubspaceData, covolume_sq, project_V
from .spectral import SpectralConfig, counting_function, spectral_ball, spectral_leading_term

SCHEMA_VERSION = 1
MODES = ("count", "sweep", "fit", "spectral", "verify")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_FIT = 4


class InputError(ValueError):
    """Malformed or inconsistent input."""


# -- problem specifications -----------------------------------------------------

@dataclass
class ProblemSpec:
    subspace: dict
    domain: dict | None = None
    eps_grid: list = field(default_factory=list)
    mode: str = "count"
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    A: list | None = None
    mu: Fraction | None = None
    samples: int = 10**5
    name: str = ""

    @classmethod
    def from_json(cls, obj) -> "ProblemSpec":
        if not isinstance(obj, dict):
            raise InputError("problem spec must be a JSON object")
        try:
            mode = obj.get("mode", "count")
            if mode not in MODES:
                raise InputError(f"mode must be one of {', '.join(MODES)}")
            eps_grid = [_strict_rational(e) for e in obj.get("eps_grid", [])]
            if any(e <= 0 for e in eps_grid):
                raise InputError("eps_grid entries must be positive")
            if any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
                raise InputError("eps_grid must be strictly decreasing")
            spectral = obj.get("spectral") or {}
            spec = cls(
                subspace=dict(obj["subspace"]),
                domain=obj.get("domain"),
                eps_grid=eps_grid,
                mode=mode,
                seed=int(obj.get("seed", 0)),
                budget=int(obj.get("budget", DEFAULT_BUDGET)),
                A=[_strict_rational(a) for a in spectral["A"]] if "A" in spectral else None,
                mu=_strict_rational(spectral["mu"]) if "mu" in spectral else None,
                samples=int(obj.get("samples", 10**5)),
                name=str(obj.get("name", "")),
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed problem spec: {exc!r}") from exc
        if mode in ("count", "sweep", "fit") and spec.domain is None:
            raise InputError(f"mode {mode} needs a domain")
        if mode != "verify" and not eps_grid:
            raise InputError("eps_grid must not be empty")
        if mode == "spectral" and (spec.A is None or spec.mu is None):
            raise InputError("mode spectral needs spectral.A and spectral.mu")
        return spec

    def to_json(self) -> dict:
        obj = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "mode": self.mode,
            "subspace": self.subspace,
            "domain": self.domain,
            "eps_grid": [format_rational(e) for e in self.eps_grid],
            "seed": self.seed,
            "budget": self.budget,
            "samples": self.samples,
        }
        if self.A is not None:
            obj["spectral"] = {"A": [format_rational(a) for a in self.A], "mu": format_rational(self.mu)}
        return obj


def _strict_rational(x) -> Fraction:
    # floats are refused so that exact paths never see a rounded value
    if isinstance(x, float) or isinstance(x, bool):
        raise InputError(f"expected a rational string, got {x!r}")
    try:
        return parse_rational(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc


def _rational_list(text: str) -> list[Fraction]:
    return [_strict_rational(t.strip()) for t in text.split(",") if t.strip()]


def _load_json(path):
    try:
        if str(path) == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _subspace(obj) -> SubspaceData:
    try:
        return SubspaceData.from_json(obj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad subspace: {exc}") from exc


def _domain(obj):
    try:
        return domain_from_json(obj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad domain: {exc}") from exc


# -- reports --------------------------------------------------------------------

def count_report(S: SubspaceData, D, eps_grid, budget: int, threads=None, backend: str = "auto") -> dict:
    results = [count_points(D, S, e, budget=budget, threads=threads, backend=backend).to_json()
               for e in eps_grid]
    return {"schema_version": SCHEMA_VERSION, "mode": "count", "domain": domain_to_json(D),
            "subspace": S.to_json(), "results": results}


def spectral_report(S: SubspaceData, A, eps_grid, mu, budget: int, threads=None) -> dict:
    rows = []
    for eps in eps_grid:
        cfg = SpectralConfig(S, tuple(A), eps, mu)
        n_spec = counting_function(cfg, budget=budget)
        n_lat = count_points(spectral_ball(cfg), S, eps, budget=budget, threads=threads).total
        rows.append({
            "epsilon": format_rational(cfg.eps),
            "count": n_spec,
            "lattice_count": n_lat,
            "agree": n_spec == n_lat,
            "leading_term": spectral_leading_term(cfg),
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": "spectral",
        "n": S.n,
        "A": [format_rational(a) for a in A],
        "mu": format_rational(Fraction(mu)),
        "lambda": 4 * math.pi ** 2 * float(mu),
        "subspace": S.to_json(),
        "results": rows,
    }


def fit_report(records) -> dict:
    fit = fit_remainder(records)
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": "fit",
        "slope": fit.slope,
        "intercept": fit.intercept,
        "stderr_slope": fit.stderr_slope,
        "n_points": fit.n_points,
        "dropped": fit.dropped,
        "predicted_exponent": records[0].predicted_exponent if records else None,
    }


# -- verification -----------------------------------------------------------------

def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _saturation(S: SubspaceData) -> dict:
    B = [list(v) for v in S.gamma.basis]
    if not B:
        # r = 0: no nonzero integer vector may lie in F
        box = range(-3, 4)
        hits = [k for k in itertools.product(box, repeat=S.n)
                if any(k) and all(sum((h[i] * k[i] for i in range(S.n)), 0 * h[0]) == 0 for h in S.H_basis)]
        return _check("saturation", not hits, "r=0, no integer vector of [-3,3]^n lies in F")
    in_F = all(sum((h[i] * v[i] for i in range(S.n)), 0 * h[0]) == 0 for h in S.H_basis for v in B)
    r = len(B)
    minors = [abs(la.det([[Fraction(row[c]) for c in cols] for row in B]))
              for cols in itertools.combinations(range(S.n), r)]
    g = 0
    for m in minors:
        g = math.gcd(g, int(m))
    return _check("saturation", in_F and g == 1, f"basis in F: {in_F}, gcd of maximal minors: {g}")


def _duality(S: SubspaceData) -> dict:
    B = [list(v) for v in S.gamma.basis]
    D = [list(v) for v in S.gamma_star.basis]
    ok = all(la.dot(D[i], B[j]) == (1 if i == j else 0) for i in range(len(B)) for j in range(len(B)))
    ok = ok and all(project_V(v, S) == v for v in D)
    return _check("duality", ok, "<l*_i, l_j> = delta_ij and l*_i in V")


def _inclusion(S: SubspaceData, radius: int = 3) -> dict:
    G = la.gram([list(v) for v in S.gamma_star.basis]) if S.r else []
    bad = 0
    for k in itertools.product(range(-radius, radius + 1), repeat=S.n):
        if not S.r:
            bad += any(project_V(k, S))
            continue
        P = project_V(k, S)
        coeffs = la.solve(G, [la.dot(v, P) for v in S.gamma_star.basis])
        pairing = [sum(a * b for a, b in zip(k, v)) for v in S.gamma.basis]
        bad += any(c.denominator != 1 for c in coeffs) or list(coeffs) != pairing
    return _check("inclusion", bad == 0,
                  f"pi_V(k) has integer dual coordinates <k, l_j> for all k in [-{radius},{radius}]^n")


def _volume(S: SubspaceData) -> dict:
    a, b = covolume_sq(S.gamma_perp), S.covolume_sq
    return _check("volume", a == b, f"covol^2(Gamma_perp) = {format_rational(a)}, |Q|^2 = {format_rational(b)}")


def verify_suite(spec: ProblemSpec, threads=None) -> dict:
    """Run every exact invariant that applies to ``spec``; failures are report content."""
    S = _subspace(spec.subspace)
    D = _domain(spec.domain) if spec.domain is not None else None
    checks = [_saturation(S), _duality(S), _inclusion(S), _volume(S)]
    eps_grid = spec.eps_grid or [Fraction(1, 2)]

    if D is not None:
        for eps in eps_grid:
            try:
                res = count_points(D, S, eps, budget=spec.budget, threads=threads)
            except BudgetExceeded as exc:
                checks.append(_check(f"fiber_sum eps={format_rational(eps)}", False, str(exc)))
                continue
            valid = {tuple(c) for c, _ in dual_points(D, S)}
            ok = sum(res.by_fiber.values()) == res.total and set(res.by_fiber) <= valid
            checks.append(_check(f"fiber_sum eps={format_rational(eps)}", ok,
                                 f"total {res.total} over {len(res.by_fiber)} fibers"))
            if HAVE_COMPILED and not res.ambiguous and not isinstance(D, OracleDomain):
                checks.append(_backend_check(D, S, eps, res.total))
            if S.p == 0:
                ref = gauss_reference(D, eps, budget=spec.budget)
                checks.append(_check(f"gauss_equivalence eps={format_rational(eps)}", ref == res.total,
                                     f"count {res.total}, reference {ref}"))

    A = spec.A if spec.A is not None else [Fraction(0)] * S.n
    mu = spec.mu if spec.mu is not None else Fraction(1)
    for eps in eps_grid:
        cfg = SpectralConfig(S, tuple(A), eps, mu)
        try:
            n_spec = counting_function(cfg, budget=spec.budget)
            n_lat = count_points(spectral_ball(cfg), S, eps, budget=spec.budget, threads=threads).total
        except BudgetExceeded as exc:
            checks.append(_check(f"spectral_equivalence eps={format_rational(eps)}", False, str(exc)))
            continue
        lead_s = spectral_leading_term(cfg)
        lead_l = leading_term(spectral_ball(cfg), S, eps)
        checks.append(_check(f"spectral_equivalence eps={format_rational(eps)}", n_spec == n_lat,
                             f"N = {n_spec}, lattice count = {n_lat}"))
        checks.append(_check(f"spectral_leading_term eps={format_rational(eps)}",
                             math.isclose(lead_s, lead_l, rel_tol=1e-9, abs_tol=1e-12),
                             f"{lead_s!r} vs {lead_l!r}"))

    return {
        "schema_version": SCHEMA_VERSION,
        "mode": "verify",
        "name": spec.name,
        "subspace": S.to_json(),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }


def _backend_check(D, S, eps, total) -> dict:
    res = count_points(D, S, eps, backend="python")
    return _check(f"backends_agree eps={format_rational(eps)}", res.total == total,
                  f"compiled {total}, python {res.total}")


# -- dispatch ---------------------------------------------------------------------

def run(spec: ProblemSpec, threads=None):
    """Execute a problem spec; returns (exit code, report text, suffix)."""
    if spec.mode == "verify":
        report = verify_suite(spec, threads=threads)
        code = EXIT_OK if report["all_passed"] else EXIT_CHECK_FAILED
        return code, _dumps(report), ".json"
    S = _subspace(spec.subspace)
    if spec.mode == "spectral":
        return EXIT_OK, _dumps(spectral_report(S, spec.A, spec.eps_grid, spec.mu, spec.budget, threads)), ".json"
    D = _domain(spec.domain)
    if spec.mode == "count":
        return EXIT_OK, _dumps(count_report(S, D, spec.eps_grid, spec.budget, threads)), ".json"
    records = sweep(D, S, spec.eps_grid, budget=spec.budget, threads=threads,
                    samples=spec.samples, seed=spec.seed)
    if spec.mode == "sweep":
        return EXIT_OK, records_to_csv(records), ".csv"
    report = fit_report(records)
    report["records"] = records_to_csv(records)
    return EXIT_OK, _dumps(report), ".json"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def bundled_problems() -> list[tuple[str, dict]]:
    root = resources.files("anisolattice") / "problems"
    out = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            out.append((entry.name[:-5], json.loads(entry.read_text())))
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(EXIT_INPUT, "usage", message)


def _fail(code: int, kind: str, message: str):
    sys.stderr.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": kind, "message": message}) + "\n")
    raise SystemExit(code)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anisolattice", description="Lattice points in anisotropically expanded domains.")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for enumeration (default: $ANISOLATTICE_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("lattice", help="lattice data Gamma, Gamma*, Gamma_perp and |Q|^2 of a subspace")
    s.add_argument("--subspace", required=True)
    s.add_argument("--out")

    s = sub.add_parser("count", help="exact count of integer points in T_eps(D)")
    s.add_argument("--domain", required=True)
    s.add_argument("--subspace", required=True)
    s.add_argument("--eps", required=True, help="one rational or a comma separated list")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    s.add_argument("--out")

    s = sub.add_parser("leading", help="leading term of the count")
    s.add_argument("--domain", required=True)
    s.add_argument("--subspace", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--samples", type=int, default=10**5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")

    s = sub.add_parser("sweep", help="count, leading term and remainder over an eps grid (CSV)")
    s.add_argument("--domain", required=True)
    s.add_argument("--subspace", required=True)
    s.add_argument("--eps-grid", required=True, help="strictly decreasing, comma separated")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--samples", type=int, default=10**5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")

    s = sub.add_parser("fit", help="log-log fit of |remainder| against 1/eps from a sweep CSV")
    s.add_argument("--csv", required=True)
    s.add_argument("--out")

    s = sub.add_parser("spectral", help="eigenvalue counting function of the magnetic Laplacian")
    s.add_argument("--subspace", required=True)
    s.add_argument("--A", required=True, help='potential, e.g. "1/2,0"')
    s.add_argument("--eps", required=True)
    s.add_argument("--mu", required=True, help="energy as lambda / (4 pi^2)")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--report", choices=("json", "text"), default="json")
    s.add_argument("--out")

    s = sub.add_parser("verify", help="exact invariant checks for a problem spec")
    s.add_argument("spec")
    s.add_argument("--out")

    s = sub.add_parser("run", help="execute a problem spec")
    s.add_argument("spec")
    s.add_argument("--out")

    s = sub.add_parser("reproduce", help="run the bundled example problems")
    s.add_argument("--out-dir", default=None)
    return p


def _main(args) -> int:
    threads = args.threads
    cmd = args.command
    if cmd == "lattice":
        S = _subspace(_load_json(args.subspace))
        _emit(_dumps(S.to_json()), args.out)
    elif cmd == "count":
        S = _subspace(_load_json(args.subspace))
        D = _domain(_load_json(args.domain))
        _emit(_dumps(count_report(S, D, _rational_list(args.eps), args.budget, threads, args.backend)), args.out)
    elif cmd == "leading":
        S = _subspace(_load_json(args.subspace))
        D = _domain(_load_json(args.domain))
        rows = []
        for eps in _rational_list(args.eps):
            value, err = leading_term(D, S, eps, samples=args.samples, seed=args.seed, with_error=True)
            rows.append({"epsilon": format_rational(eps), "leading_term": value, "stderr": err})
        _emit(_dumps({"schema_version": SCHEMA_VERSION, "mode": "leading", "results": rows}), args.out)
    elif cmd == "sweep":
        S = _subspace(_load_json(args.subspace))
        D = _domain(_load_json(args.domain))
        grid = _rational_list(args.eps_grid)
        if any(b >= a for a, b in zip(grid, grid[1:])) or any(e <= 0 for e in grid):
            raise InputError("eps grid must be positive and strictly decreasing")
        records = sweep(D, S, grid, budget=args.budget, threads=threads, samples=args.samples, seed=args.seed)
        _emit(records_to_csv(records), args.out)
    elif cmd == "fit":
        try:
            records = records_from_csv(Path(args.csv).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.csv}: {exc.strerror}") from exc
        except (KeyError, ValueError) as exc:
            raise InputError(f"malformed sweep CSV: {exc}") from exc
        _emit(_dumps(fit_report(records)), args.out)
    elif cmd == "spectral":
        S = _subspace(_load_json(args.subspace))
        A = _rational_list(args.A)
        if len(A) != S.n:
            raise InputError(f"A has {len(A)} entries, subspace has n={S.n}")
        mu = _strict_rational(args.mu)
        if mu < 0:
            raise InputError("mu must be nonnegative")
        report = spectral_report(S, A, _rational_list(args.eps), mu, args.budget, threads)
        if args.report == "json":
            _emit(_dumps(report), args.out)
        else:
            lines = [f"eps={r['epsilon']} N={r['count']} lattice={r['lattice_count']} "
                     f"leading={r['leading_term']:.12g}" for r in report["results"]]
            _emit("\n".join(lines) + "\n", args.out)
    elif cmd in ("verify", "run"):
        spec = ProblemSpec.from_json(_load_json(args.spec))
        if cmd == "verify":
            spec.mode = "verify"
        code, text, _ = run(spec, threads=threads)
        _emit(text, args.out)
        return code
    elif cmd == "reproduce":
        out_dir = Path(args.out_dir) if args.out_dir else None
        if out_dir:
            out_dir.mkdir(parents=True, exist_ok=True)
        summary = []
        worst = EXIT_OK
        for name, obj in bundled_problems():
            spec = ProblemSpec.from_json(obj)
            code, text, suffix = run(spec, threads=threads)
            worst = max(worst, code)
            if out_dir:
                (out_dir / (name + suffix)).write_text(text)
            entry = {"name": name, "mode": spec.mode, "exit_code": code}
            if spec.mode == "verify":
                entry["all_passed"] = json.loads(text)["all_passed"]
            elif spec.mode == "fit":
                entry["slope"] = json.loads(text)["slope"]
            summary.append(entry)
        _emit(_dumps({"schema_version": SCHEMA_VERSION, "mode": "reproduce", "problems": summary}), None)
        return worst
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _main(args)
    except InputError as exc:
        _fail(EXIT_INPUT, "input", str(exc))
    except BudgetExceeded as exc:
        _fail(EXIT_BUDGET, "budget_exceeded", str(exc))
    except FitError as exc:
        _fail(EXIT_FIT, "fit_degenerate", str(exc))
    except ValueError as exc:
        _fail(EXIT_INPUT, "input", str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
