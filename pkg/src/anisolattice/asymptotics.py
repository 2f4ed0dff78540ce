"""Leading terms, predicted remainder orders, eps sweeps and log-log fits."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .counting import BudgetExceeded, DEFAULT_BUDGET, _positive_eps, count_points
from .domains import Box, Ellipsoid, OracleDomain, bounding_box, slice_volume
from .exact import format_rational
from .lattice import SubspaceData

__all__ = [
    "SweepRecord",
    "FitResult",
    "FitError",
    "dual_points",
    "leading_term",
    "predicted_exponent",
    "remainder_exponent",
    "slices_strictly_convex",
    "within_hypotheses",
    "sweep",
    "fit_remainder",
    "records_to_csv",
    "records_from_csv",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ["eps_num", "eps_den", "count", "leading", "remainder",
               "predicted_exponent", "ambiguous_count", "note"]


class FitError(ValueError):
    """Too few usable rows for a regression."""


@dataclass(frozen=True)
class SweepRecord:
    epsilon: Fraction
    count: int | None
    leading: float
    remainder: float
    predicted_exponent: float
    ambiguous: int = 0
    note: str = ""


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr_slope: float
    n_points: int
    dropped: int = 0


def dual_points(D, S: SubspaceData):
    """Dual-lattice points gamma* whose fiber can meet the bounding box of D.

    Yields (coords, gamma*) with integer coords c_j = <gamma*, l_j>.  The
    range of c_j is that of the linear map x -> <x, l_j> over the box.
    """
    if S.r == 0:
        yield (), [Fraction(0)] * S.n
        return
    box = bounding_box(D)
    ranges = []
    for l in S.gamma.basis:
        lo = sum((a * (box.lower[i] if a > 0 else box.upper[i]) for i, a in enumerate(l)), Fraction(0))
        hi = sum((a * (box.upper[i] if a > 0 else box.lower[i]) for i, a in enumerate(l)), Fraction(0))
        ranges.append(range(math.floor(lo), math.ceil(hi) + 1))
    for coords in itertools.product(*ranges):
        g = [sum((c * v[i] for c, v in zip(coords, S.gamma_star.basis)), Fraction(0)) for i in range(S.n)]
        yield coords, g


def leading_term(D, S: SubspaceData, eps, samples: int = 10**5, seed: int = 0, with_error: bool = False):
    """eps^{-q} / |Q| * sum over gamma* of vol_{n-r}(P_{gamma*} ∩ D).

    Ellipsoid slices are closed form and box slices are exact polytope
    volumes; oracle domains use Monte Carlo, and ``with_error=True`` then
    returns (value, propagated stderr).
    """
    eps = _positive_eps(eps)
    total = 0.0
    var = 0.0
    for i, (_, g) in enumerate(dual_points(D, S)):
        v, se = slice_volume(D, g, S, samples=samples, seed=seed + i)
        total += v
        var += se * se
    scale = float(1 / eps ** S.q)
    root = math.sqrt(S.covolume_sq)
    value = total / root * scale
    if with_error:
        return value, math.sqrt(var) / root * scale
    return value


def remainder_exponent(p: int, r: int, q: int, strictly_convex: bool) -> Fraction:
    """Exponent e with remainder O(eps^e).

    General smooth case: 1/(p - r + 1) - q.  Strictly convex slices: k - q
    with k = (q + 1)/(2(p - r + 1)) when (q - 1)/2 <= p - r, else
    2q/(q + 1 + 2(p - r)).
    """
    if not 0 <= r <= p or q < 1:
        raise ValueError(f"invalid dimensions p={p}, r={r}, q={q}")
    if not strictly_convex:
        return Fraction(1, p - r + 1) - q
    if Fraction(q - 1, 2) <= p - r:
        k = Fraction(q + 1, 2 * (p - r + 1))
    else:
        k = Fraction(2 * q, q + 1 + 2 * (p - r))
    return k - q


def predicted_exponent(S: SubspaceData, strictly_convex_slices: bool) -> Fraction:
    return remainder_exponent(S.p, S.r, S.q, strictly_convex_slices)


def slices_strictly_convex(D) -> bool:
    if isinstance(D, Ellipsoid):
        return True
    if isinstance(D, OracleDomain):
        return D.slicewise_strictly_convex
    return False


def within_hypotheses(D) -> bool:
    """Whether D has the smooth boundary the asymptotic formulas assume."""
    if isinstance(D, Ellipsoid):
        return True
    if isinstance(D, OracleDomain):
        return D.smooth
    return False


def sweep(D, S: SubspaceData, eps_list: Sequence, budget: int = DEFAULT_BUDGET,
          threads: int | None = None, samples: int = 10**5, seed: int = 0) -> list[SweepRecord]:
    """One record per eps, in input order; budget failures give flagged rows."""
    eps_list = [_positive_eps(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    exponent = float(predicted_exponent(S, slices_strictly_convex(D)))
    base_note = "" if within_hypotheses(D) else "non-smooth boundary: outside the asymptotic hypotheses"
    records = []
    for eps in eps_list:
        lead = leading_term(D, S, eps, samples=samples, seed=seed)
        try:
            res = count_points(D, S, eps, budget=budget, threads=threads)
        except BudgetExceeded as exc:
            note = "; ".join(x for x in (base_note, f"skipped: {exc}") if x)
            records.append(SweepRecord(eps, None, lead, math.nan, exponent, 0, note))
            continue
        records.append(SweepRecord(eps, res.total, lead, res.total - lead, exponent, res.ambiguous, base_note))
    return records


def fit_remainder(records: Iterable[SweepRecord]) -> FitResult:
    """OLS of log|remainder| on log(1/eps); rows with zero or missing remainder are dropped."""
    from scipy.stats import linregress

    records = list(records)
    usable = [r for r in records if r.count is not None and math.isfinite(r.remainder) and r.remainder != 0]
    dropped = len(records) - len(usable)
    if len(usable) < 3:
        raise FitError(f"need at least 3 rows with nonzero remainder, have {len(usable)}")
    x = np.array([math.log(1 / float(r.epsilon)) for r in usable])
    y = np.array([math.log(abs(r.remainder)) for r in usable])
    if np.ptp(x) == 0:
        raise FitError("all rows share the same eps")
    res = linregress(x, y)
    return FitResult(float(res.slope), float(res.intercept), float(res.stderr), len(usable), dropped)


# -- CSV -----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def records_to_csv(records: Iterable[SweepRecord], fh=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.epsilon.numerator, r.epsilon.denominator,
                    "" if r.count is None else r.count, _fmt(r.leading), _fmt(r.remainder),
                    _fmt(r.predicted_exponent), r.ambiguous, r.note])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def records_from_csv(text: str) -> list[SweepRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(SweepRecord(
            epsilon=Fraction(int(row["eps_num"]), int(row["eps_den"])),
            count=int(row["count"]) if row["count"] != "" else None,
            leading=float(row["leading"]),
            remainder=float(row["remainder"]),
            predicted_exponent=float(row["predicted_exponent"]),
            ambiguous=int(row.get("ambiguous_count") or 0),
            note=row.get("note", "") or "",
        ))
    return out
