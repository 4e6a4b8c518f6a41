"""Achievable-rate formulas for the erasure shotgun channel.

All rates are in bits per transmitted symbol.  ``c`` is the expected
coverage depth ``K * L / n`` and ``lbar`` is the read length normalized by
``log2 n``; the formulas live in the asymptotic regime and take those
normalized quantities directly.  ``coverage_depth`` maps a finite instance
onto ``c``.

Evaluating ``rate_gap`` at small separation ``d`` is numerically delicate:
the closed form subtracts two terms that each blow up like ``1/d``.  Below
a fixed switch-over on ``alpha * d`` the computation runs in 60-digit
arithmetic via mpmath, above it in ordinary floats with ``expm1`` keeping
the small differences stable.  The tests pin continuity across the
switch-over and agreement of ``rate_gap`` with ``rate_gap_limit`` as the
separation shrinks.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from mpmath import mp

from .errors import DomainError

#: Below this value of ``alpha * d`` the float evaluation of ``rate_gap``
#: loses digits to cancellation and the mpmath path takes over.
SMALL_SEPARATION = 1e-3


def coverage_depth(n: int, L: int, K: int) -> float:
    """Expected coverage depth ``K * L / n``."""
    if n <= 0 or L <= 0 or K <= 0:
        raise DomainError("n, L, K must all be positive")
    return K * L / n


def _check_erasure_regime(c: float, lbar: float, delta: float) -> None:
    if not c > 0:
        raise DomainError(f"coverage depth must be positive; got {c!r}")
    if not 0 <= delta < 1:
        raise DomainError(f"erasure probability must lie in [0; 1); got {delta!r}")
    if not lbar * (1 - delta) > 1:
        raise DomainError(
            "normalized read length after erasures must exceed 1; "
            f"got lbar * (1 - delta) = {lbar * (1 - delta)!r}"
        )


def sse_rate_bound(c: float, lbar: float, delta: float) -> float:
    """Achievable rate of the erasure channel at coverage ``c``.

    Requires ``c > 0`` and ``lbar * (1 - delta) > 1``.  At ``delta = 0``
    this reduces exactly to ``ssc_capacity(c, lbar)``.
    """
    _check_erasure_regime(c, lbar, delta)
    keep = 1.0 - delta
    ec = math.exp(-c)
    return (1.0 - math.exp(-c * keep)) - keep * (
        math.exp(-c * (1.0 - 1.0 / (lbar * keep))) - ec
    )


def ssc_capacity(c: float, lbar: float) -> float:
    """Capacity of the erasure-free channel: ``1 - exp(-c (1 - 1/lbar))``.

    Requires ``c > 0`` and ``lbar > 1``.
    """
    if not c > 0:
        raise DomainError(f"coverage depth must be positive; got {c!r}")
    if not lbar > 1:
        raise DomainError(f"normalized read length must exceed 1; got {lbar!r}")
    return 1.0 - math.exp(-c * (1.0 - 1.0 / lbar))


def ssc_short_rate(c: float, lbar: float, delta: float) -> float:
    """Erasure-free capacity at the shortened length ``lbar * (1 - delta)``.

    The natural comparison point for ``sse_rate_bound``: pretend each read
    simply lost a ``delta`` fraction of its length instead of random
    positions.
    """
    if not 0 <= delta < 1:
        raise DomainError(f"erasure probability must lie in [0; 1); got {delta!r}")
    return ssc_capacity(c, lbar * (1.0 - delta))


def _gap_terms(alpha, d, exp, expm1):
    """The bracketed difference in the gap formula, generic in the backend."""
    ed = exp(alpha * d)
    em_d = expm1(alpha * d)
    em_1 = expm1(alpha)
    em_1d = expm1(alpha * (1 + d))
    ea = exp(alpha)
    term1 = ed * em_1 / em_d
    # (e^{a(1+d)} - e^a) - d (e^{a(1+d)} - 1), with the first difference
    # rewritten as e^a (e^{ad} - 1) to keep it exact at small a*d.
    numer = ea * em_d - d * em_1d
    term2 = ed * ed * numer / (em_d * em_d)
    return term1 - term2


def rate_gap(c: float, lbar: float, delta: float, d: float) -> float:
    """Rate lost to merge ambiguity at positional separation ``d > 0``.

    Non-increasing in ``d`` and converging to ``rate_gap_limit`` as
    ``d -> 0``.
    """
    _check_erasure_regime(c, lbar, delta)
    if not d > 0:
        raise DomainError(f"separation must be positive; got {d!r}")
    keep = 1.0 - delta
    alpha = c / (lbar * keep)
    scale = (d / keep) * (c / lbar) ** 2 * math.exp(-c)
    if alpha * d < SMALL_SEPARATION:
        with mp.workdps(60):
            bracket = _gap_terms(mp.mpf(alpha), mp.mpf(d), mp.exp, mp.expm1)
            return float(mp.mpf(scale) * bracket)
    return scale * _gap_terms(alpha, d, math.exp, math.expm1)


def rate_gap_limit(c: float, lbar: float, delta: float) -> float:
    """The ``d -> 0`` limit of ``rate_gap``:
    ``(1 - delta) exp(-c) (exp(alpha) - 1 - alpha)`` with
    ``alpha = c / (lbar (1 - delta))``.
    """
    _check_erasure_regime(c, lbar, delta)
    keep = 1.0 - delta
    alpha = c / (lbar * keep)
    return keep * math.exp(-c) * (math.expm1(alpha) - alpha)


def candidate_growth_bound(
    c: float, lbar: float, delta: float, d: float, p: float
) -> float:
    """Exponential growth rate of the surviving-candidate count:
    ``(1 + 2p) exp(alpha p d) * rate_gap(c, lbar, delta, d)``.

    ``p`` is the slack factor on the typicality thresholds; ``p = 0``
    recovers ``rate_gap`` itself.
    """
    if p < 0:
        raise DomainError(f"slack factor must be nonnegative; got {p!r}")
    gap = rate_gap(c, lbar, delta, d)
    alpha = c / (lbar * (1.0 - delta))
    return (1.0 + 2.0 * p) * math.exp(alpha * p * d) * gap


@dataclass(frozen=True)
class CurveRow:
    """One point of a rate curve; invalid points carry a reason instead."""

    c: float
    delta: float
    lbar: float
    rate_sse: float | None
    rate_ssc_short: float | None
    valid: bool
    reason: str


def rate_curve(
    c_values: Sequence[float], lbar: float, deltas: Iterable[float]
) -> list[CurveRow]:
    """Evaluate both rate formulas on a grid of coverage depths.

    Points violating a hypothesis become rows with ``valid = False`` and
    the reason recorded; no exception escapes.
    """
    rows = []
    for delta in deltas:
        for c in c_values:
            c = float(c)
            delta = float(delta)
            try:
                sse = sse_rate_bound(c, lbar, delta)
                ssc = ssc_short_rate(c, lbar, delta)
            except DomainError as exc:
                rows.append(CurveRow(c, delta, lbar, None, None, False, str(exc)))
            else:
                rows.append(CurveRow(c, delta, lbar, sse, ssc, True, ""))
    return rows


def rates_csv(rows: Iterable[CurveRow]) -> str:
    """Render curve rows as CSV with full-precision floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["c", "delta", "lbar", "rate_sse", "rate_ssc_short", "valid", "reason"]
    )
    for r in rows:
        writer.writerow(
            [
                repr(r.c),
                repr(r.delta),
                repr(r.lbar),
                "" if r.rate_sse is None else repr(r.rate_sse),
                "" if r.rate_ssc_short is None else repr(r.rate_ssc_short),
                "true" if r.valid else "false",
                r.reason,
            ]
        )
    return buf.getvalue()
