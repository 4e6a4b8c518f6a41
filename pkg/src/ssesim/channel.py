"""Random codebooks and the cyclic-read erasure channel.

A length-``n`` binary codeword is read ``K`` times.  Each read starts at a
uniformly random position (1-based, wrapping around the end), spans ``L``
symbols, and then every symbol is independently erased with probability
``delta``.  The decoder sees the multiset of reads only; start positions and
the codeword stay in a separate ground-truth record.

Randomness follows a splittable scheme: every consumer derives its stream
from a master seed plus a fixed integer path, so results never depend on
call order or thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError
from .tritstring import TritString

__all__ = [
    "STAGE_CODEBOOK",
    "STAGE_STARTS",
    "STAGE_ERASURES",
    "STAGE_MESSAGE",
    "STAGE_TRIAL",
    "STAGE_MZ",
    "DEFAULT_CODEBOOK_CAP",
    "child_seed",
    "stage_rng",
    "ChannelParams",
    "Read",
    "Truth",
    "ChannelOutput",
    "random_codeword",
    "generate_codebook",
    "random_codebook",
    "sample_reads",
    "apply_erasures",
    "transmit_codeword",
    "transmit",
]

# Stream labels for the splittable seed scheme.
STAGE_CODEBOOK = 0
STAGE_STARTS = 1
STAGE_ERASURES = 2
STAGE_MESSAGE = 3
STAGE_TRIAL = 4
STAGE_MZ = 5

DEFAULT_CODEBOOK_CAP = 4096


def child_seed(seed, *path: int) -> np.random.SeedSequence:
    """Derive a child SeedSequence from ``seed`` along a fixed integer path."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + path
        )
    return np.random.SeedSequence(entropy=seed, spawn_key=path)


def stage_rng(seed, *path: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, *path))


@dataclass(frozen=True)
class ChannelParams:
    """Channel geometry: codeword length ``n``, read length ``L``, read
    count ``K``, per-symbol erasure probability ``delta``."""

    n: int
    L: int
    K: int
    delta: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.L <= self.n:
            raise DomainError(f"L must lie in [1, n={self.n}], got {self.L}")
        if self.K < 1:
            raise DomainError(f"K must be >= 1, got {self.K}")
        if not 0 <= self.delta <= 1:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta}")

    @property
    def c(self) -> float:
        """Coverage depth K*L/n."""
        return self.K * self.L / self.n

    @property
    def lbar(self) -> float:
        """Read length normalized by log2(n)."""
        if self.n < 2:
            raise DomainError("normalized read length needs n >= 2")
        return self.L / math.log2(self.n)

    @classmethod
    def resolve(
        cls,
        n: int,
        delta: float,
        *,
        L: int | None = None,
        lbar: float | None = None,
        K: int | None = None,
        c: float | None = None,
    ) -> "ChannelParams":
        """Build params from exactly one of (L, lbar) and one of (K, c).

        ``lbar`` fixes L = round(lbar * log2 n); ``c`` fixes K = round(c*n/L).
        """
        if (L is None) == (lbar is None):
            raise DomainError("supply exactly one of L and lbar")
        if (K is None) == (c is None):
            raise DomainError("supply exactly one of K and c")
        if L is None:
            if n < 2:
                raise DomainError("lbar needs n >= 2")
            L = round(lbar * math.log2(n))
        if K is None:
            if L < 1:
                raise DomainError(f"derived read length L={L} is not positive")
            K = round(c * n / L)
        return cls(n=n, L=L, K=K, delta=delta)


@dataclass(frozen=True)
class Read:
    """One read: its (possibly erased) symbols plus the 1-based start."""

    symbols: TritString
    start: int


@dataclass(frozen=True, eq=False)
class Truth:
    """Ground truth sealed away from the decoder."""

    message: int | None
    codeword: TritString
    starts: np.ndarray  # (K,) int64, 1-based

    def __post_init__(self) -> None:
        self.starts.setflags(write=False)


@dataclass(eq=False)
class ChannelOutput:
    """Multiset of reads plus (optionally) the ground-truth record.

    ``values``/``known`` are (K, L) arrays: symbol values with zeros at
    erased positions, and the erasure mask.
    """

    params: ChannelParams
    values: np.ndarray
    known: np.ndarray
    truth: Truth | None = None

    def __post_init__(self) -> None:
        expect = (self.params.K, self.params.L)
        if self.values.shape != expect or self.known.shape != expect:
            raise ValueError(f"read arrays must have shape {expect}")
        self.values.setflags(write=False)
        self.known.setflags(write=False)

    @cached_property
    def reads(self) -> tuple[Read, ...]:
        if self.truth is None:
            raise ValueError("reads with start positions need the truth record")
        return tuple(
            Read(symbols=sym, start=int(s))
            for sym, s in zip(self.decoder_view(), self.truth.starts)
        )

    @cached_property
    def _symbols(self) -> tuple[TritString, ...]:
        return tuple(
            _pack_row(self.values[i], self.known[i]) for i in range(self.params.K)
        )

    def decoder_view(self) -> tuple[TritString, ...]:
        """Read symbols only; no starts, no truth."""
        return self._symbols

    @property
    def pre_erasure_values(self) -> np.ndarray:
        """(K, L) symbol array as it left the sampler, before erasures."""
        if self.truth is None:
            raise ValueError("pre-erasure reads need the truth record")
        x_arr = _to_array(self.truth.codeword)
        starts0 = np.asarray(self.truth.starts, dtype=np.int64) - 1
        clean = _gather_reads(x_arr, starts0, self.params.L, self.params.n)
        clean.setflags(write=False)
        return clean

    @property
    def pre_erasure_reads(self) -> tuple[TritString, ...]:
        """Reads as they left the sampler, before the erasure stage."""
        clean = self.pre_erasure_values
        ones = np.ones(self.params.L, dtype=bool)
        return tuple(_pack_row(clean[i], ones) for i in range(self.params.K))

    def to_json(self, include_truth: bool = True) -> str:
        doc: dict = {
            "params": {
                "n": self.params.n,
                "L": self.params.L,
                "K": self.params.K,
                "delta": float(self.params.delta),
            },
            "reads": [{"symbols": s.text} for s in self.decoder_view()],
        }
        if include_truth and self.truth is not None:
            doc["truth"] = {
                "w": self.truth.message,
                "x": self.truth.codeword.text,
                "starts": [int(s) for s in self.truth.starts],
            }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ChannelOutput":
        doc = json.loads(text)
        p = doc["params"]
        params = ChannelParams(n=p["n"], L=p["L"], K=p["K"], delta=p["delta"])
        values = np.zeros((params.K, params.L), dtype=np.uint8)
        known = np.zeros((params.K, params.L), dtype=bool)
        for i, entry in enumerate(doc["reads"]):
            sym = TritString.from_text(entry["symbols"])
            if sym.length != params.L:
                raise ValueError(f"read {i} has length {sym.length}, expected {params.L}")
            values[i] = _to_array(sym)
            known[i] = _known_array(sym)
        truth = None
        if "truth" in doc:
            t = doc["truth"]
            truth = Truth(
                message=t["w"],
                codeword=TritString.from_text(t["x"]),
                starts=np.asarray(t["starts"], dtype=np.int64),
            )
        return cls(params=params, values=values, known=known, truth=truth)


def _to_array(u: TritString) -> np.ndarray:
    raw = u.bits.to_bytes((u.length + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[
        : u.length
    ]


def _known_array(u: TritString) -> np.ndarray:
    raw = u.known.to_bytes((u.length + 7) // 8 or 1, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[: u.length].astype(bool)


def _bits_from_array(arr: np.ndarray) -> int:
    packed = np.packbits(arr.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _pack_row(values: np.ndarray, known: np.ndarray) -> TritString:
    known = known.astype(bool)
    vals = np.where(known, values, 0)
    return TritString(_bits_from_array(vals), _bits_from_array(known), len(values))


def random_codeword(n: int, seed) -> TritString:
    """Uniform binary codeword of length n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    bits = stage_rng(seed, STAGE_CODEBOOK).integers(0, 2, size=n, dtype=np.uint8)
    return _pack_row(bits, np.ones(n, dtype=bool))


def generate_codebook(
    n: int, rate: float, seed, *, cap: int = DEFAULT_CODEBOOK_CAP
) -> tuple[TritString, ...]:
    """ceil(2**(n*rate)) i.i.d. uniform binary codewords.

    Refuses sizes beyond ``cap``; this is a desk-scale tool.
    """
    if rate <= 0:
        raise DomainError(f"rate must be positive, got {rate}")
    exponent = n * rate
    if exponent > math.log2(cap) + 1e-9:
        raise DomainError(
            f"codebook size 2**{exponent:.4g} exceeds the cap of {cap} codewords"
        )
    if abs(exponent - round(exponent)) < 1e-9:
        count = 2 ** round(exponent)
    else:
        # Tolerate float fuzz from rates derived as log2(count) / n.
        count = math.ceil(2**exponent - 1e-9)
    return random_codebook(n, count, seed, cap=cap)


def random_codebook(
    n: int, count: int, seed, *, cap: int = DEFAULT_CODEBOOK_CAP
) -> tuple[TritString, ...]:
    """``count`` i.i.d. uniform binary codewords; the explicit-size variant."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 1 <= count <= cap:
        raise DomainError(f"codebook size {count} outside [1, {cap}]")
    rng = stage_rng(seed, STAGE_CODEBOOK)
    rows = rng.integers(0, 2, size=(count, n), dtype=np.uint8)
    ones = np.ones(n, dtype=bool)
    return tuple(_pack_row(rows[i], ones) for i in range(count))


def _sample_starts(params: ChannelParams, seed) -> np.ndarray:
    rng = stage_rng(seed, STAGE_STARTS)
    return rng.integers(0, params.n, size=params.K)


def _gather_reads(x_arr: np.ndarray, starts0: np.ndarray, L: int, n: int) -> np.ndarray:
    idx = (starts0[:, None] + np.arange(L)[None, :]) % n
    return x_arr[idx]


def _erasure_mask(params: ChannelParams, seed) -> np.ndarray:
    rng = stage_rng(seed, STAGE_ERASURES)
    return rng.random((params.K, params.L)) >= float(params.delta)


def sample_reads(x: TritString, params: ChannelParams, seed) -> list[Read]:
    """K pre-erasure reads of x at uniform cyclic starts (with replacement)."""
    if x.length != params.n:
        raise DomainError(f"codeword length {x.length} != n={params.n}")
    if x.size != params.n:
        raise DomainError("channel input must be a fully visible binary string")
    x_arr = _to_array(x)
    starts0 = _sample_starts(params, seed)
    clean = _gather_reads(x_arr, starts0, params.L, params.n)
    ones = np.ones(params.L, dtype=bool)
    return [
        Read(symbols=_pack_row(clean[i], ones), start=int(starts0[i]) + 1)
        for i in range(params.K)
    ]


def apply_erasures(reads: list[Read], delta: float, seed) -> list[Read]:
    """Erase every symbol independently with probability delta."""
    if not 0 <= delta <= 1:
        raise DomainError(f"delta must lie in [0, 1], got {delta}")
    if not reads:
        return []
    L = reads[0].symbols.length
    if any(r.symbols.length != L for r in reads):
        raise DomainError("reads must share one length")
    rng = stage_rng(seed, STAGE_ERASURES)
    keep = rng.random((len(reads), L)) >= float(delta)
    out = []
    for i, r in enumerate(reads):
        vals = _to_array(r.symbols)
        known = _known_array(r.symbols) & keep[i]
        out.append(Read(symbols=_pack_row(vals, known), start=r.start))
    return out


def transmit_codeword(
    x: TritString, params: ChannelParams, seed, message: int | None = None
) -> ChannelOutput:
    """One full channel use of the codeword ``x``.

    Equivalent to ``apply_erasures(sample_reads(x, params, seed), delta, seed)``
    with the same master seed; the two stages draw from separate substreams.
    """
    if x.length != params.n:
        raise DomainError(f"codeword length {x.length} != n={params.n}")
    if x.size != params.n:
        raise DomainError("channel input must be a fully visible binary string")
    x_arr = _to_array(x)
    starts0 = _sample_starts(params, seed)
    clean = _gather_reads(x_arr, starts0, params.L, params.n)
    known = _erasure_mask(params, seed)
    values = np.where(known, clean, 0).astype(np.uint8)
    truth = Truth(message=message, codeword=x, starts=(starts0 + 1).astype(np.int64))
    return ChannelOutput(params=params, values=values, known=known, truth=truth)


def transmit(
    codebook: tuple[TritString, ...], w: int, params: ChannelParams, seed
) -> ChannelOutput:
    """Transmit codeword ``w`` (0-based index into the codebook)."""
    if not 0 <= w < len(codebook):
        raise DomainError(f"message index {w} outside [0, {len(codebook) - 1}]")
    return transmit_codeword(codebook[w], params, seed, message=w)
