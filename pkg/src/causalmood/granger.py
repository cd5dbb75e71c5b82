"""Bivariate Granger-causality F-tests over (activity, happiness) pairs.

For each user and lag L, two autoregressions of the happiness series are
fit by OLS: a restricted model on its own L lags and an unrestricted model
adding L lags of the activity series. The SSR-form F statistic

    F = ((SSR_r - SSR_u) / L) / (SSR_u / (T_eff - 2L - 1))

is referred to the F(L, T_eff - 2L - 1) distribution. Degenerate inputs
(too short, constant, collinear, perfectly fit) yield a NotCalculable
verdict rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.linalg

from causalmood.series import SeriesPair

DEFAULT_ALPHA = 0.05
DEFAULT_LAGS = (1, 2, 3, 4, 5)
DEFAULT_HEADLINE_LAG = 5


# ---------------------------------------------------------------------------
# F / chi-square tail probabilities (continued-fraction incomplete functions)

_MAX_ITER = 300
_CF_EPS = 3e-16
_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise RuntimeError("incomplete beta continued fraction failed to converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), abs. error < 1e-10."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_survival(f: float, d1: int, d2: int) -> float:
    """P(F_{d1,d2} > f) via the incomplete beta identity."""
    if d1 < 1 or d2 < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got d1={d1}, d2={d2}")
    if not math.isfinite(f) or f < 0:
        raise ValueError(f"f statistic must be finite and >= 0, got {f}")
    x = d2 / (d2 + d1 * f)
    return reg_inc_beta(d2 / 2.0, d1 / 2.0, x)


def _gamma_p_series(a: float, x: float) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER * 2):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _CF_EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise RuntimeError("incomplete gamma series failed to converge")


def _gamma_q_cf(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER * 2):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise RuntimeError("incomplete gamma continued fraction failed to converge")


def chi2_survival(x: float, k: int) -> float:
    """P(chi2_k > x); used by the LM variant of the test."""
    if k < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {k}")
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"statistic must be finite and >= 0, got {x}")
    a, half = k / 2.0, x / 2.0
    if half == 0.0:
        return 1.0
    if half < a + 1.0:
        return 1.0 - _gamma_p_series(a, half)
    return _gamma_q_cf(a, half)


# ---------------------------------------------------------------------------
# OLS

@dataclass
class OlsFit:
    coeffs: np.ndarray
    ssr: float
    rank: int
    full_rank: bool


def lag_matrix(
    y: Sequence[float], x: Sequence[float], lag: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Targets and [intercept | y-lags | x-lags] design matrices.

    Row t holds 1, y_{t-1..t-lag} and (unrestricted only) x_{t-1..t-lag}.
    """
    ya = np.asarray(y, dtype=np.float64)
    xa = np.asarray(x, dtype=np.float64)
    if ya.shape != xa.shape or ya.ndim != 1:
        raise ValueError(f"series shapes differ: {ya.shape} vs {xa.shape}")
    if lag < 1:
        raise ValueError(f"lag must be >= 1, got {lag}")
    t_eff = len(ya) - lag
    if t_eff < 1:
        raise ValueError(f"series of length {len(ya)} too short for lag {lag}")
    targets = ya[lag:]
    own = np.column_stack([ya[lag - i:len(ya) - i] for i in range(1, lag + 1)])
    src = np.column_stack([xa[lag - i:len(xa) - i] for i in range(1, lag + 1)])
    ones = np.ones((t_eff, 1))
    restricted = np.hstack([ones, own])
    unrestricted = np.hstack([ones, own, src])
    return targets, restricted, unrestricted


def ols(design: np.ndarray, targets: np.ndarray) -> OlsFit:
    """Least squares via column-pivoted QR; flags rank deficiency."""
    a = np.asarray(design, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if a.ndim != 2 or a.shape[0] != len(y):
        raise ValueError(f"design {a.shape} does not match {len(y)} targets")
    m, n = a.shape
    if m < n:
        raise ValueError(f"underdetermined system: {m} rows < {n} columns")
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(m, n) * np.finfo(np.float64).eps * (diag.max() if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    full = rank == n
    if full:
        permuted = scipy.linalg.solve_triangular(r, q.T @ y)
        coeffs = np.empty(n)
        coeffs[piv] = permuted
    else:
        coeffs = np.linalg.lstsq(a, y, rcond=None)[0]
    resid = y - a @ coeffs
    return OlsFit(coeffs, float(resid @ resid), rank, full)


# ---------------------------------------------------------------------------
# The test

class Verdict(str, Enum):
    REJECT = "Reject"
    KEEP = "Keep"
    NOT_CALCULABLE = "NotCalculable"


@dataclass
class GrangerFit:
    lag: int
    intercept: float
    alpha: np.ndarray       # own-lag coefficients
    beta: np.ndarray        # source-lag coefficients
    ssr_restricted: float
    ssr_unrestricted: float
    t_eff: int


@dataclass
class GrangerResult:
    user_id: str
    lag: int
    f_stat: Optional[float]
    p_value: Optional[float]
    verdict: Verdict
    reason: str = ""


_ZERO_RESIDUAL_REL = 1e-12


def _degeneracy(pair: SeriesPair, lag: int) -> Optional[str]:
    t_eff = pair.n_bins - lag
    if t_eff < 1 or t_eff - 2 * lag - 1 < 1:
        return "insufficient data"
    if np.ptp(pair.a) == 0 or np.ptp(pair.p) == 0:
        return "constant series"
    return None


def granger_fit(pair: SeriesPair, lag: int) -> GrangerFit:
    """Unrestricted/restricted fits for introspection; raises on degeneracy."""
    reason = _degeneracy(pair, lag)
    if reason is not None:
        raise ValueError(f"cannot fit user {pair.user_id!r} at lag {lag}: {reason}")
    targets, restricted, unrestricted = lag_matrix(pair.p, pair.a, lag)
    fit_r = ols(restricted, targets)
    fit_u = ols(unrestricted, targets)
    if not (fit_r.full_rank and fit_u.full_rank):
        raise ValueError(
            f"cannot fit user {pair.user_id!r} at lag {lag}: rank-deficient design"
        )
    return GrangerFit(
        lag=lag,
        intercept=float(fit_u.coeffs[0]),
        alpha=fit_u.coeffs[1:lag + 1].copy(),
        beta=fit_u.coeffs[lag + 1:].copy(),
        ssr_restricted=fit_r.ssr,
        ssr_unrestricted=fit_u.ssr,
        t_eff=len(targets),
    )


def granger_test(
    pair: SeriesPair,
    lag: int,
    alpha_level: float = DEFAULT_ALPHA,
    statistic: str = "f",
) -> GrangerResult:
    """Test "activity does not Granger-cause happiness" for one user.

    ``statistic`` selects the F test (default) or the chi-square LM variant
    ("lm"); either way the statistic lands in the f_stat field.
    """
    if not 0.0 < alpha_level < 1.0:
        raise ValueError(f"alpha_level must be in (0, 1), got {alpha_level}")
    if statistic not in ("f", "lm"):
        raise ValueError(f"statistic must be 'f' or 'lm', got {statistic!r}")

    def nc(reason: str) -> GrangerResult:
        return GrangerResult(pair.user_id, lag, None, None,
                             Verdict.NOT_CALCULABLE, reason)

    reason = _degeneracy(pair, lag)
    if reason is not None:
        return nc(reason)
    targets, restricted, unrestricted = lag_matrix(pair.p, pair.a, lag)
    fit_r = ols(restricted, targets)
    fit_u = ols(unrestricted, targets)
    if not (fit_r.full_rank and fit_u.full_rank):
        return nc("rank-deficient design")
    sst = float(np.sum((targets - targets.mean()) ** 2))
    if fit_u.ssr <= _ZERO_RESIDUAL_REL * max(sst, np.finfo(float).tiny):
        return nc("perfect fit")
    t_eff = len(targets)
    dof2 = t_eff - 2 * lag - 1
    if statistic == "f":
        stat = max(((fit_r.ssr - fit_u.ssr) / lag) / (fit_u.ssr / dof2), 0.0)
        p = f_survival(stat, lag, dof2)
    else:
        stat = max(t_eff * (fit_r.ssr - fit_u.ssr) / fit_r.ssr, 0.0)
        p = chi2_survival(stat, lag)
    verdict = Verdict.REJECT if p <= alpha_level else Verdict.KEEP
    return GrangerResult(pair.user_id, lag, float(stat), float(p), verdict)


def batch_test(
    pairs: Sequence[SeriesPair],
    lags: Sequence[int] = DEFAULT_LAGS,
    alpha_level: float = DEFAULT_ALPHA,
    statistic: str = "f",
    bonferroni: bool = False,
) -> list[GrangerResult]:
    """Per-user x per-lag results, ordered by (user_id, lag).

    The Bonferroni flag divides alpha by the number of lags tested.
    """
    if not lags:
        raise ValueError("need at least one lag")
    effective_alpha = alpha_level / len(lags) if bonferroni else alpha_level
    results = []
    for pair in sorted(pairs, key=lambda sp: sp.user_id):
        for lag in sorted(lags):
            results.append(granger_test(pair, lag, effective_alpha, statistic))
    return results


# ---------------------------------------------------------------------------
# Reporting

@dataclass
class GrangerSummary:
    headline_lag: int
    n_users: int
    rn: int                 # rejected the null (causality found)
    kn: int                 # kept the null
    nc: int                 # not calculable
    top_fraction: float
    top_n: int
    top_rn: int
    top_kn: int
    top_nc: int

    def as_dict(self) -> dict:
        return {
            "headline_lag": self.headline_lag,
            "all": {"users": self.n_users, "rn": self.rn, "kn": self.kn,
                    "nc": self.nc},
            "top": {"fraction": self.top_fraction, "users": self.top_n,
                    "rn": self.top_rn, "kn": self.top_kn, "nc": self.top_nc},
        }


def _count(verdicts: Sequence[Verdict]) -> tuple[int, int, int]:
    rn = sum(1 for v in verdicts if v is Verdict.REJECT)
    kn = sum(1 for v in verdicts if v is Verdict.KEEP)
    nc = sum(1 for v in verdicts if v is Verdict.NOT_CALCULABLE)
    return rn, kn, nc


def summarize(
    results: Sequence[GrangerResult],
    activity_totals: Mapping[str, float],
    headline_lag: int = DEFAULT_HEADLINE_LAG,
    top_fraction: float = 0.1,
) -> GrangerSummary:
    """Verdict counts at the headline lag, overall and for the most-active
    top fraction of users (ranked by total activity, ties by user_id)."""
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError(f"top_fraction must be in (0, 1], got {top_fraction}")
    at_lag = {r.user_id: r.verdict for r in results if r.lag == headline_lag}
    users = sorted(at_lag)
    rn, kn, nc = _count([at_lag[u] for u in users])
    ranked = sorted(users, key=lambda u: (-float(activity_totals.get(u, 0.0)), u))
    top_n = max(1, math.floor(len(users) * top_fraction)) if users else 0
    top = ranked[:top_n]
    top_rn, top_kn, top_nc = _count([at_lag[u] for u in top])
    return GrangerSummary(
        headline_lag=headline_lag, n_users=len(users), rn=rn, kn=kn, nc=nc,
        top_fraction=top_fraction, top_n=top_n,
        top_rn=top_rn, top_kn=top_kn, top_nc=top_nc,
    )


def render_summary(summary: GrangerSummary) -> str:
    """Aligned text table; count fields are single-space separated."""
    label = f"top-{summary.top_fraction:.0%}"
    width = max(len("group"), len("all"), len(label))
    lines = [
        f"lag = {summary.headline_lag}",
        f"{'group':<{width}} users rn kn nc",
        f"{'all':<{width}} {summary.n_users} {summary.rn} {summary.kn} {summary.nc}",
        f"{label:<{width}} {summary.top_n} {summary.top_rn} {summary.top_kn} "
        f"{summary.top_nc}",
    ]
    return "\n".join(lines) + "\n"


def write_results_csv(results: Sequence[GrangerResult], path: str) -> None:
    """``user_id,lag,f_stat,p_value,verdict,reason``; blanks when degenerate."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("user_id,lag,f_stat,p_value,verdict,reason\n")
        for r in results:
            f_stat = "" if r.f_stat is None else repr(r.f_stat)
            p_value = "" if r.p_value is None else repr(r.p_value)
            fh.write(
                f"{r.user_id},{r.lag},{f_stat},{p_value},"
                f"{r.verdict.value},{r.reason}\n"
            )


_RESULTS_HEADER = ["user_id", "lag", "f_stat", "p_value", "verdict", "reason"]


def read_results_csv(path: str) -> list[GrangerResult]:
    import csv

    results = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _RESULTS_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            if len(row) != 6:
                raise ValueError(f"{path}: malformed row {row}")
            uid, lag, f_stat, p_value, verdict, reason = row
            results.append(GrangerResult(
                user_id=uid,
                lag=int(lag),
                f_stat=None if f_stat == "" else float(f_stat),
                p_value=None if p_value == "" else float(p_value),
                verdict=Verdict(verdict),
                reason=reason,
            ))
    return results


def write_totals_csv(totals: Mapping[str, float], path: str) -> None:
    """Per-user total activity, used for the top-fraction ranking."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("user_id,total_activity\n")
        for uid in sorted(totals):
            fh.write(f"{uid},{float(totals[uid])!r}\n")


def read_totals_csv(path: str) -> dict[str, float]:
    import csv

    totals: dict[str, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["user_id", "total_activity"]:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            if len(row) != 2:
                raise ValueError(f"{path}: malformed row {row}")
            totals[row[0]] = float(row[1])
    return totals
