"""Donor -> recipient transfer of FALQON gain schedules.

A donor graph is run closed-loop; its gain sequence is then replayed layer
for layer (no re-indexing, interpolation or rescaling) on a batch of larger
recipient graphs.  Recipient ``k`` uses seed ``recipient_seed_base + k``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .falqon import FalqonConfig, FalqonTrace, Problem, replay_schedule, run_falqon, write_trace_csv
from .graph import SEED_MASK, Family, Graph, GraphError, generate


@dataclass(frozen=True)
class GraphSpec:
    family: Family
    n: int
    p: float | None = None

    def __post_init__(self):
        fam = Family.parse(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "n", int(self.n))
        if fam is Family.ERDOS_RENYI:
            if self.p is None or not 0.0 < float(self.p) <= 1.0:
                raise GraphError(f"Erdos-Renyi spec needs p in (0, 1], got {self.p!r}")
            object.__setattr__(self, "p", float(self.p))
        elif fam is Family.THREE_REGULAR:
            if self.p is not None:
                raise GraphError("3-regular spec takes no edge probability")
            if self.n < 4 or self.n % 2:
                raise GraphError(f"3-regular graphs need even n >= 4, got {self.n}")
        else:
            raise GraphError(f"family {fam.value!r} cannot be sampled")

    def sample(self, seed: int) -> Graph:
        return generate(self.family, self.n, self.p, seed)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "n": self.n, "p": self.p}

    @classmethod
    def from_dict(cls, d: Mapping) -> "GraphSpec":
        return cls(d["family"], d["n"], d.get("p"))

    def label(self) -> str:
        if self.p is None:
            return f"{self.family.value}{self.n}"
        return f"{self.family.value}{self.n}-p{self.p:g}"


@dataclass(frozen=True)
class TransferSpec:
    donor: GraphSpec
    donor_seed: int
    recipient: GraphSpec
    recipient_seed_base: int
    recipients_count: int = 10
    cfg: FalqonConfig = field(default_factory=FalqonConfig)

    def __post_init__(self):
        if self.recipients_count < 1:
            raise ValueError(f"recipients_count must be >= 1, got {self.recipients_count}")
        for name in ("donor_seed", "recipient_seed_base"):
            v = int(getattr(self, name))
            if not 0 <= v <= SEED_MASK:
                raise GraphError(f"{name} must be a 64-bit unsigned integer, got {v}")
        if self.recipient_seed_base + self.recipients_count - 1 > SEED_MASK:
            raise GraphError("recipient seeds overflow 64 bits")

    def recipient_seeds(self) -> list[int]:
        return [self.recipient_seed_base + k for k in range(self.recipients_count)]

    def to_dict(self) -> dict:
        return {
            "donor": self.donor.to_dict(),
            "donor_seed": self.donor_seed,
            "recipient": self.recipient.to_dict(),
            "recipient_seed_base": self.recipient_seed_base,
            "recipients_count": self.recipients_count,
            "cfg": self.cfg.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TransferSpec":
        known = {"donor", "donor_seed", "recipient", "recipient_seed_base", "recipients_count", "cfg"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown transfer spec keys: {sorted(unknown)}")
        return cls(
            donor=GraphSpec.from_dict(d["donor"]),
            donor_seed=int(d["donor_seed"]),
            recipient=GraphSpec.from_dict(d["recipient"]),
            recipient_seed_base=int(d["recipient_seed_base"]),
            recipients_count=int(d.get("recipients_count", 10)),
            cfg=FalqonConfig.from_dict(d.get("cfg", {})),
        )


@dataclass(eq=False)
class TransferResult:
    spec: TransferSpec
    donor_trace: FalqonTrace
    recipient_traces: list[FalqonTrace]
    mean_ratio: np.ndarray
    std_ratio: np.ndarray

    @property
    def final_mean(self) -> float:
        return float(self.mean_ratio[-1])

    @property
    def final_std(self) -> float:
        return float(self.std_ratio[-1])

    @property
    def donor_final_ratio(self) -> float:
        return self.donor_trace.final_ratio

    def recipient_final_ratios(self) -> list[float]:
        return [t.final_ratio for t in self.recipient_traces]


def ratio_statistics(ratios: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-layer mean and sample std (N-1 divisor; 0 for a single recipient)."""
    ratios = np.asarray(ratios, dtype=np.float64)
    mean = ratios.mean(axis=0)
    if ratios.shape[0] < 2:
        return mean, np.zeros_like(mean)
    return mean, ratios.std(axis=0, ddof=1)


def run_transfer(spec: TransferSpec, workers: int = 1) -> TransferResult:
    donor_graph = spec.donor.sample(spec.donor_seed)
    donor_trace = run_falqon(donor_graph, spec.cfg)
    schedule = donor_trace.betas

    def replay(seed: int) -> FalqonTrace:
        prob = Problem.from_graph(spec.recipient.sample(seed))
        return replay_schedule(prob, schedule, spec.cfg)

    seeds = spec.recipient_seeds()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(replay, seeds))
    else:
        traces = [replay(s) for s in seeds]
    mean, std = ratio_statistics(np.stack([t.ratio for t in traces]))
    return TransferResult(spec, donor_trace, traces, mean, std)


# -- donor-size resilience ---------------------------------------------------


@dataclass(frozen=True)
class SizeStats:
    n: int
    final_mean: float
    final_std: float
    samples: int

    @property
    def interval(self) -> tuple[float, float]:
        return (self.final_mean - self.final_std, self.final_mean + self.final_std)


@dataclass(frozen=True)
class ResilienceSummary:
    per_size: tuple[SizeStats, ...]
    overlap: bool


def intervals_overlap(means: Sequence[float], stds: Sequence[float]) -> bool:
    """True when every pair of ``[mean - std, mean + std]`` intervals intersects."""
    iv = [(m - s, m + s) for m, s in zip(means, stds)]
    return all(
        max(iv[a][0], iv[b][0]) <= min(iv[a][1], iv[b][1])
        for a in range(len(iv))
        for b in range(a + 1, len(iv))
    )


def aggregate_by_donor_size(
    results: "Mapping[int, TransferResult | Sequence[TransferResult]]",
) -> ResilienceSummary:
    """Final-ratio mean/std per donor size and whether the 1-std bands all overlap.

    Several results for one size (different donor seeds) are pooled: the
    statistics run over every recipient final ratio from all of them.
    """
    recipient_key = None
    stats = []
    for n in sorted(results):
        group = results[n]
        group = [group] if isinstance(group, TransferResult) else list(group)
        if not group:
            raise ValueError(f"no results for donor size {n}")
        finals = []
        for r in group:
            key = (r.spec.recipient, r.spec.recipients_count, r.spec.cfg)
            if recipient_key is None:
                recipient_key = key
            elif key != recipient_key:
                raise ValueError("results use different recipient specs or configs")
            if r.spec.donor.n != n:
                raise ValueError(f"result keyed by n={n} has donor n={r.spec.donor.n}")
            finals.extend(r.recipient_final_ratios())
        finals = np.asarray(finals)
        std = float(finals.std(ddof=1)) if finals.size > 1 else 0.0
        stats.append(SizeStats(n, float(finals.mean()), std, int(finals.size)))
    overlap = intervals_overlap([s.final_mean for s in stats], [s.final_std for s in stats])
    return ResilienceSummary(tuple(stats), overlap)


# -- persistence -------------------------------------------------------------


def _finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite value in transfer result")
    return x


def result_to_json(result: TransferResult, donor_trace_path: str = "donor_trace.csv") -> dict:
    """JSON-ready summary; floats are written at full round-trip precision."""
    return {
        "spec": result.spec.to_dict(),
        "donor_graph": result.donor_trace.graph,
        "donor_optimum": result.donor_trace.optimum,
        "donor_trace": donor_trace_path,
        "donor_final_ratio": _finite(result.donor_final_ratio),
        "recipient_seeds": result.spec.recipient_seeds(),
        "recipient_optima": [t.optimum for t in result.recipient_traces],
        "recipient_traces": [f"recipient_{k}.csv" for k in range(len(result.recipient_traces))],
        "recipient_final_ratios": [_finite(r) for r in result.recipient_final_ratios()],
        "mean_ratio": [_finite(v) for v in result.mean_ratio],
        "std_ratio": [_finite(v) for v in result.std_ratio],
        "final_mean": _finite(result.final_mean),
        "final_std": _finite(result.final_std),
    }


def save_transfer(result: TransferResult, out_dir: "str | Path", extra: Mapping | None = None) -> Path:
    """Write ``result.json``, ``donor_trace.csv`` and ``recipient_<k>.csv``; returns the JSON path.

    ``result.json`` is written last so its presence marks a complete directory.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(result.donor_trace, out / "donor_trace.csv")
    for k, tr in enumerate(result.recipient_traces):
        write_trace_csv(tr, out / f"recipient_{k}.csv")
    payload = dict(extra or {})
    payload.update(result_to_json(result))
    path = out / "result.json"
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path
