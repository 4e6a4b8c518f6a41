"""Channel statistics: coverage, suffix-size spectra, prefix-match counts,
deviation bounds, and a seeded Monte Carlo harness for all of them.

Conventions.  Logs are base 2 throughout.  For a read, its *successor
distance* is the smallest forward cyclic distance to any other read start
(coincident starts give distance 0), the induced overlap is
``max(0, L - distance)``, and the *suffix size* is the number of unerased
symbols in that overlap-length suffix.  ``expected_suffix_size_count`` is the
exact law of that statistic:

    P(D >= g) = ((n - g) / n)^(K-1)          (uniform independent starts)
    size | overlap = l   ~  Binomial(l, 1 - delta)

and the expected count at size ``s`` is ``K * sum_l P(overlap = l) *
P(Binomial(l, 1 - delta) = s)``.  Passing a ``Fraction`` delta keeps the
whole computation in exact rational arithmetic.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .channel import (
    STAGE_CODEBOOK,
    STAGE_MZ,
    STAGE_TRIAL,
    ChannelOutput,
    ChannelParams,
    child_seed,
    random_codeword,
    stage_rng,
    transmit_codeword,
)
from .errors import DomainError
from .tritstring import TritString

__all__ = [
    "CoverageReport",
    "SuffixSizeHistogram",
    "TypicalityThresholds",
    "MzSample",
    "ConcentrationSummary",
    "coverage",
    "forward_successor_distances",
    "chain_island_count",
    "suffix_size_histogram",
    "expected_suffix_size_count",
    "expected_suffix_size_counts",
    "count_prefix_compatible",
    "hoeffding_two_sided",
    "hoeffding_one_sided",
    "typicality_thresholds",
    "concentration_experiment",
]


@dataclass(frozen=True)
class CoverageReport:
    """Fraction of positions covered by any read (``phi``) and covered by an
    unerased symbol of some read (``phi_v``)."""

    phi: float
    phi_v: float

    def __post_init__(self) -> None:
        if not 0 <= self.phi_v <= self.phi <= 1:
            raise ValueError("need 0 <= phi_v <= phi <= 1")


def coverage(output: ChannelOutput) -> CoverageReport:
    """Coverage fractions against the ground-truth start positions."""
    if output.truth is None:
        raise ValueError("coverage needs the truth record")
    n, L = output.params.n, output.params.L
    starts0 = np.asarray(output.truth.starts, dtype=np.int64) - 1
    idx = (starts0[:, None] + np.arange(L)[None, :]) % n
    covered = np.zeros(n, dtype=bool)
    covered[idx.ravel()] = True
    visible = np.zeros(n, dtype=bool)
    visible[idx[output.known]] = True
    return CoverageReport(phi=float(covered.mean()), phi_v=float(visible.mean()))


def forward_successor_distances(starts: np.ndarray, n: int) -> np.ndarray:
    """Per read, the smallest forward cyclic distance to another read start.

    Coincident starts give distance 0.  A single read gets distance ``n``.
    """
    starts = np.asarray(starts, dtype=np.int64)
    k = len(starts)
    if k == 1:
        return np.array([n], dtype=np.int64)
    order = np.argsort(starts, kind="stable")
    s = starts[order]
    gaps = np.empty(k, dtype=np.int64)
    gaps[:-1] = s[1:] - s[:-1]
    gaps[-1] = s[0] + n - s[-1]
    # A read sharing its start with any other read is at distance 0 from it.
    tied = np.zeros(k, dtype=bool)
    tied[:-1] = gaps[:-1] == 0
    tied[1:] |= gaps[:-1] == 0
    dist_sorted = np.where(tied, 0, gaps)
    out = np.empty(k, dtype=np.int64)
    out[order] = dist_sorted
    return out


def chain_island_count(starts: np.ndarray, n: int, L: int) -> int:
    """Number of islands in the true cyclic ordering: one per gap >= L."""
    starts = np.asarray(starts, dtype=np.int64)
    k = len(starts)
    if k == 1:
        return 1
    s = np.sort(starts, kind="stable")
    gaps = np.empty(k, dtype=np.int64)
    gaps[:-1] = s[1:] - s[:-1]
    gaps[-1] = s[0] + n - s[-1]
    return int(np.count_nonzero(gaps >= L))


@dataclass(frozen=True)
class SuffixSizeHistogram:
    """Counts of reads by true merging-suffix size; index = size, 0..L."""

    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)


def _suffix_sizes(output: ChannelOutput) -> np.ndarray:
    n, L = output.params.n, output.params.L
    dist = forward_successor_distances(output.truth.starts - 1, n)
    overlaps = np.maximum(0, L - dist).astype(np.int64)
    # revcum[i, j] = unerased count in the last (j+1) symbols of read i
    revcum = np.cumsum(output.known[:, ::-1].astype(np.int64), axis=1)
    col = np.clip(overlaps - 1, 0, None)[:, None]
    sizes = np.take_along_axis(revcum, col, axis=1).ravel()
    return np.where(overlaps > 0, sizes, 0)


def suffix_size_histogram(output: ChannelOutput) -> SuffixSizeHistogram:
    """Histogram of true merging-suffix sizes over all K reads."""
    if output.truth is None:
        raise ValueError("suffix sizes need the truth record")
    sizes = _suffix_sizes(output)
    counts = np.bincount(sizes, minlength=output.params.L + 1)
    return SuffixSizeHistogram(counts=tuple(int(c) for c in counts))


def _overlap_law(n: int, L: int, K: int, exact: bool):
    """P(overlap = l) for l = 0..L under the successor-distance law."""

    def p_dist_ge(g):
        # K = 1 has no other reads, so the empty product is 1.
        if exact:
            return Fraction(n - g, n) ** (K - 1)
        return ((n - g) / n) ** (K - 1)

    law = [p_dist_ge(L)]
    for l in range(1, L + 1):
        d = L - l
        law.append(p_dist_ge(d) - p_dist_ge(d + 1))
    return law


def expected_suffix_size_count(params: ChannelParams, suffix_size: int):
    """Exact expected number of reads with the given merging-suffix size.

    Returns a float for float ``delta`` and a Fraction for Fraction
    ``delta``.
    """
    if not 0 <= suffix_size <= params.L:
        raise DomainError(f"suffix size {suffix_size} outside [0, {params.L}]")
    return expected_suffix_size_counts(params)[suffix_size]


def expected_suffix_size_counts(params: ChannelParams):
    """The full expected histogram, index = suffix size 0..L."""
    # The exactness flag is part of the cache key: a float delta and an equal
    # Fraction delta hash alike but must not share an entry.
    exact = isinstance(params.delta, Fraction)
    return list(
        _expected_counts_cached(params.n, params.L, params.K, params.delta, exact)
    )


@lru_cache(maxsize=64)
def _expected_counts_cached(n: int, L: int, K: int, delta, exact: bool) -> tuple:
    law = _overlap_law(n, L, K, exact)
    keep = delta if exact else float(delta)
    out = []
    for s in range(L + 1):
        total = Fraction(0) if exact else 0.0
        for l in range(s, L + 1):
            pmf = math.comb(l, s) * (1 - keep) ** s * keep ** (l - s)
            total += K * law[l] * pmf
        out.append(total)
    return tuple(out)


def count_prefix_compatible(reads: Sequence[TritString], z: TritString) -> int:
    """Number of reads whose |z|-prefix is compatible with ``z`` (multiset
    count, so duplicates count separately)."""
    l = z.length
    if l < 1:
        raise ValueError("z must be non-empty")
    cnt = 0
    mask = (1 << l) - 1
    zb, zk = z.bits, z.known
    for y in reads:
        if y.length < l:
            raise ValueError(f"read shorter than z: {y.length} < {l}")
        if (((y.bits ^ zb) & (y.known & zk) & mask)) == 0:
            cnt += 1
    return cnt


def hoeffding_two_sided(N: int, p: float, eps: float) -> float:
    """2*exp(-N*p*eps^2/(1-p)): deviation bound for |S/N - p| >= eps*p."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if N < 1 or eps < 0:
        raise DomainError("need N >= 1 and eps >= 0")
    return 2.0 * math.exp(-N * p * eps * eps / (1.0 - p))


def hoeffding_one_sided(N: int, p: float, x: float) -> float:
    """exp(-x^2/(2*N*p*(1-p))): deviation bound for S - N*p >= x."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if N < 1 or x < 0:
        raise DomainError("need N >= 1 and x >= 0")
    return math.exp(-x * x / (2.0 * N * p * (1.0 - p)))


@dataclass(frozen=True)
class TypicalityThresholds:
    """The four screening thresholds used by the typicality analysis."""

    params: ChannelParams
    epsilon: float

    @property
    def island_count_cap(self) -> float:
        """(1 + eps) * K * exp(-c)."""
        return (1 + self.epsilon) * self.params.K * math.exp(-self.params.c)

    @property
    def visible_coverage_floor(self) -> float:
        """(1 - eps) * (1 - exp(-c(1 - delta)))."""
        c, d = self.params.c, float(self.params.delta)
        return (1 - self.epsilon) * (1 - math.exp(-c * (1 - d)))

    def prefix_match_cap(self, tau: float) -> float:
        """(1 + eps) * n^(1 - tau) for tau <= 1 - eps, else n^eps."""
        n = self.params.n
        if tau <= 1 - self.epsilon:
            return (1 + self.epsilon) * n ** (1 - tau)
        return float(n) ** self.epsilon

    def suffix_count_cap(self, suffix_size: int) -> float:
        """Expected count at this size plus the eps * n / log2(n)^2 slack."""
        n = self.params.n
        slack = self.epsilon * n / math.log2(n) ** 2
        return float(expected_suffix_size_count(self.params, suffix_size)) + slack


def typicality_thresholds(params: ChannelParams, epsilon: float) -> TypicalityThresholds:
    if epsilon < 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    return TypicalityThresholds(params=params, epsilon=epsilon)


@dataclass(frozen=True)
class MzSample:
    """Prefix-match counts for probes at one target normalized size."""

    tau_target: float
    suffix_size: int
    tau_realized: float
    counts: tuple[tuple[int, ...], ...]  # per trial
    reference: float  # K * 2^(-suffix_size)

    @property
    def flat(self) -> tuple[int, ...]:
        return tuple(c for trial in self.counts for c in trial)

    @property
    def mean(self) -> float:
        flat = self.flat
        return math.fsum(flat) / len(flat) if flat else math.nan

    @property
    def worst_relative_deviation(self) -> float:
        flat = self.flat
        if not flat or self.reference == 0:
            return math.nan
        return max(abs(c - self.reference) for c in flat) / self.reference


def _mean_se(values) -> tuple[float, float]:
    vals = list(values)
    t = len(vals)
    mean = math.fsum(vals) / t
    if t < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in vals) / (t - 1)
    return mean, math.sqrt(var / t)


@dataclass(frozen=True)
class ConcentrationSummary:
    """Per-trial statistics plus order-insensitive aggregates and the
    reference values they should concentrate around."""

    params: ChannelParams
    trials: int
    seed: int
    island_counts: tuple[int, ...]
    phi: tuple[float, ...]
    phi_v: tuple[float, ...]
    suffix_counts: tuple[tuple[int, ...], ...]
    mz: tuple[MzSample, ...]

    @property
    def island_ratio_mean(self) -> float:
        return _mean_se(k / self.params.K for k in self.island_counts)[0]

    @property
    def island_ratio_se(self) -> float:
        return _mean_se(k / self.params.K for k in self.island_counts)[1]

    @property
    def island_ratio_ref(self) -> float:
        return math.exp(-self.params.c)

    @property
    def phi_mean(self) -> float:
        return _mean_se(self.phi)[0]

    @property
    def phi_se(self) -> float:
        return _mean_se(self.phi)[1]

    @property
    def phi_ref(self) -> float:
        return 1 - math.exp(-self.params.c)

    @property
    def phi_v_mean(self) -> float:
        return _mean_se(self.phi_v)[0]

    @property
    def phi_v_se(self) -> float:
        return _mean_se(self.phi_v)[1]

    @property
    def phi_v_ref(self) -> float:
        return 1 - math.exp(-self.params.c * (1 - float(self.params.delta)))

    @property
    def suffix_count_means(self) -> tuple[float, ...]:
        arr = np.asarray(self.suffix_counts, dtype=np.float64)
        return tuple(math.fsum(arr[:, s]) / self.trials for s in range(arr.shape[1]))

    @property
    def suffix_count_refs(self) -> tuple[float, ...]:
        return tuple(float(v) for v in expected_suffix_size_counts(self.params))

    def to_json(self) -> str:
        doc = {
            "params": {
                "n": self.params.n,
                "L": self.params.L,
                "K": self.params.K,
                "delta": float(self.params.delta),
                "c": self.params.c,
                "lbar": self.params.lbar,
            },
            "trials": self.trials,
            "seed": self.seed,
            "island_ratio": {
                "mean": self.island_ratio_mean,
                "se": self.island_ratio_se,
                "reference": self.island_ratio_ref,
            },
            "phi": {"mean": self.phi_mean, "se": self.phi_se, "reference": self.phi_ref},
            "phi_v": {
                "mean": self.phi_v_mean,
                "se": self.phi_v_se,
                "reference": self.phi_v_ref,
            },
            "suffix_counts": {
                "mean": list(self.suffix_count_means),
                "reference": list(self.suffix_count_refs),
            },
            "mz": [
                {
                    "tau_target": m.tau_target,
                    "suffix_size": m.suffix_size,
                    "tau_realized": m.tau_realized,
                    "mean": m.mean,
                    "reference": m.reference,
                    "worst_relative_deviation": m.worst_relative_deviation,
                    "samples": len(m.flat),
                }
                for m in self.mz
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def trials_csv(self) -> str:
        L = self.params.L
        header = ["trial", "islands", "phi", "phi_v"]
        header += [f"mz{j}_mean" for j in range(len(self.mz))]
        header += [f"g{s}" for s in range(L + 1)]
        lines = [",".join(header)]
        for t in range(self.trials):
            row = [
                str(t),
                str(self.island_counts[t]),
                repr(self.phi[t]),
                repr(self.phi_v[t]),
            ]
            for m in self.mz:
                vals = m.counts[t]
                row.append(repr(math.fsum(vals) / len(vals)) if vals else "")
            row += [str(c) for c in self.suffix_counts[t]]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def _probe_z(
    rng: np.random.Generator,
    values: np.ndarray,
    known: np.ndarray,
    suffix_size: int,
) -> tuple[np.ndarray, np.ndarray]:
    """A probe string: a random read re-erased down to exactly
    ``suffix_size`` visible symbols."""
    k_reads = values.shape[0]
    for _ in range(64):
        r = int(rng.integers(k_reads))
        visible = np.flatnonzero(known[r])
        if len(visible) >= suffix_size:
            keep = rng.choice(visible, size=suffix_size, replace=False)
            zk = np.zeros(values.shape[1], dtype=bool)
            zk[keep] = True
            return np.where(zk, values[r], 0).astype(np.uint8), zk
    raise DomainError(
        f"no read with {suffix_size} visible symbols found; delta too high for this probe"
    )


def _count_matches(clean_values, zv, zk) -> int:
    """Reads whose true window agrees with the probe's visible symbols.

    Matching is against the pre-erasure windows: each read at an
    independent start agrees with probability exactly 2**-size."""
    conflict = (clean_values != zv[None, :]) & zk[None, :]
    return int(np.count_nonzero(~conflict.any(axis=1)))


def _run_trial(params: ChannelParams, seed: int, t: int, mz_sizes, mz_per_trial: int):
    trial = child_seed(seed, STAGE_TRIAL, t)
    x = random_codeword(params.n, child_seed(trial, STAGE_CODEBOOK))
    out = transmit_codeword(x, params, trial)
    rep = coverage(out)
    islands = chain_island_count(out.truth.starts - 1, params.n, params.L)
    hist = suffix_size_histogram(out)
    rng = stage_rng(trial, STAGE_MZ)
    mz_counts = []
    if mz_sizes:
        clean = out.pre_erasure_values
        for s in mz_sizes:
            counts = []
            for _ in range(mz_per_trial):
                zv, zk = _probe_z(rng, out.values, out.known, s)
                counts.append(_count_matches(clean, zv, zk))
            mz_counts.append(tuple(counts))
    return islands, rep.phi, rep.phi_v, hist.counts, mz_counts


def concentration_experiment(
    params: ChannelParams,
    trials: int,
    seed: int,
    *,
    mz_targets: Sequence[float] = (0.5,),
    mz_per_trial: int = 2,
    threads: int = 1,
) -> ConcentrationSummary:
    """Independent channel uses with a fresh uniform codeword per trial.

    Each trial records the island count, coverage fractions, the suffix-size
    histogram, and prefix-match counts for probes at each target normalized
    size.  Results are identical for any ``threads`` value.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if params.n < 2:
        raise DomainError("concentration experiment needs n >= 2")
    log_n = math.log2(params.n)
    mz_sizes = []
    for tau in mz_targets:
        s = round(tau * log_n)
        if not 1 <= s <= params.L:
            raise DomainError(f"target tau={tau} maps to suffix size {s} outside [1, L]")
        mz_sizes.append(s)

    def job(t: int):
        return _run_trial(params, seed, t, mz_sizes, mz_per_trial)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(job, range(trials)))
    else:
        results = [job(t) for t in range(trials)]

    mz_samples = []
    for j, (tau, s) in enumerate(zip(mz_targets, mz_sizes)):
        per_trial = tuple(results[t][4][j] for t in range(trials))
        mz_samples.append(
            MzSample(
                tau_target=float(tau),
                suffix_size=s,
                tau_realized=s / log_n,
                counts=per_trial,
                reference=params.K * 2.0 ** (-s),
            )
        )
    return ConcentrationSummary(
        params=params,
        trials=trials,
        seed=seed,
        island_counts=tuple(r[0] for r in results),
        phi=tuple(r[1] for r in results),
        phi_v=tuple(r[2] for r in results),
        suffix_counts=tuple(r[3] for r in results),
        mz=tuple(mz_samples),
    )
