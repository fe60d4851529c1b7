"""Closed-loop FALQON and open-loop replay of a fixed gain schedule.

Each layer applies the cost phase, then the mixer with the current gain, then
records the commutator observable and the cost / cut expectations of the new
state.  In the closed loop the next gain is the negated commutator value.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .graph import Graph, GraphError, max_cut_brute_force
from .hamiltonian import MIXERS, build_cost_diagonal, build_cut_diagonal
from .simulator import MAX_QUBITS, init_plus_state

TRACE_COLUMNS = ("layer", "beta", "a_value", "cost", "cut", "ratio")
INITIAL_STATES = ("plus",)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FalqonConfig:
    dt: float = 0.03
    layers: int = 300
    beta_init: float = 0.0
    mixer: str = "x"
    initial_state: str = "plus"

    def __post_init__(self):
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be a positive finite number, got {self.dt!r}")
        if int(self.layers) != self.layers or self.layers < 1:
            raise ConfigError(f"layers must be an integer >= 1, got {self.layers!r}")
        if not math.isfinite(self.beta_init):
            raise ConfigError(f"beta_init must be finite, got {self.beta_init!r}")
        if self.mixer not in MIXERS:
            raise ConfigError(f"unsupported mixer {self.mixer!r}; choose from {MIXERS}")
        if self.initial_state not in INITIAL_STATES:
            raise ConfigError(f"unsupported initial state {self.initial_state!r}")
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "layers", int(self.layers))
        object.__setattr__(self, "beta_init", float(self.beta_init))

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "layers": self.layers,
            "beta_init": self.beta_init,
            "mixer": self.mixer,
            "initial_state": self.initial_state,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FalqonConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown FALQON config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(eq=False)
class FalqonTrace:
    betas: np.ndarray
    a_values: np.ndarray
    cost: np.ndarray
    cut: np.ndarray
    ratio: np.ndarray
    optimum: int
    graph: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.betas)

    @property
    def final_ratio(self) -> float:
        return float(self.ratio[-1])


@dataclass(frozen=True, eq=False)
class Problem:
    """Precomputed tables for one graph, reusable across runs."""

    graph: Graph
    cut: np.ndarray
    cost: np.ndarray
    optimum: int

    @classmethod
    def from_graph(cls, g: Graph) -> "Problem":
        if not 2 <= g.n <= MAX_QUBITS:
            raise GraphError(f"FALQON needs 2 <= n <= {MAX_QUBITS}, got {g.n}")
        if g.m == 0:
            raise GraphError("graph has no edges; approximation ratio undefined")
        cut = build_cut_diagonal(g)
        cost = build_cost_diagonal(g, cut)
        return cls(g, cut.values, cost.values, max_cut_brute_force(g).optimum)


def _as_problem(g: "Graph | Problem") -> Problem:
    return g if isinstance(g, Problem) else Problem.from_graph(g)


def _evolve(prob: Problem, cfg: FalqonConfig, schedule: np.ndarray | None) -> FalqonTrace:
    n = prob.graph.n
    L = cfg.layers
    psi = init_plus_state(n)
    factors = np.exp(-1j * cfg.dt * prob.cost)
    betas = np.empty(L)
    a_values = np.empty(L)
    cost = np.empty(L)
    cut = np.empty(L)
    beta = cfg.beta_init
    for k in range(L):
        if schedule is not None:
            beta = float(schedule[k])
        theta = beta * cfg.dt
        _kernels.phase(psi, factors)
        _kernels.rotate_all(psi, n, math.cos(theta), math.sin(theta))
        a = _kernels.commutator(psi, prob.cost, n)
        betas[k] = beta
        a_values[k] = a
        cost[k] = _kernels.expectation(psi, prob.cost)
        cut[k] = _kernels.expectation(psi, prob.cut)
        beta = -a
    ratio = cut / prob.optimum
    return FalqonTrace(betas, a_values, cost, cut, ratio, prob.optimum, prob.graph.provenance())


def run_falqon(g: "Graph | Problem", cfg: FalqonConfig = FalqonConfig()) -> FalqonTrace:
    """Closed-loop run: gain ``k+1`` is minus the commutator measured after layer ``k``."""
    return _evolve(_as_problem(g), cfg, None)


def replay_schedule(
    g: "Graph | Problem", betas: Sequence[float], cfg: FalqonConfig | None = None
) -> FalqonTrace:
    """Open-loop run with gains taken position by position from ``betas``.

    The commutator is still recorded per layer but never fed back.
    """
    schedule = np.asarray(betas, dtype=np.float64)
    if schedule.ndim != 1 or schedule.size == 0:
        raise ConfigError("gain schedule must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(schedule)):
        raise ConfigError("gain schedule contains non-finite values")
    if cfg is None:
        cfg = FalqonConfig(layers=schedule.size)
    if cfg.layers != schedule.size:
        raise ConfigError(f"schedule has {schedule.size} gains but config asks for {cfg.layers} layers")
    return _evolve(_as_problem(g), cfg, schedule)


# -- CSV --------------------------------------------------------------------


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def format_trace_csv(trace: FalqonTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for k in range(len(trace)):
        w.writerow(
            [k + 1]
            + [_g17(v[k]) for v in (trace.betas, trace.a_values, trace.cost, trace.cut, trace.ratio)]
        )
    return buf.getvalue()


def write_trace_csv(trace: FalqonTrace, path: "str | Path") -> None:
    Path(path).write_text(format_trace_csv(trace))


def read_trace_csv(path: "str | Path") -> dict[str, np.ndarray]:
    """Columns of a trace CSV as float arrays (``layer`` as int)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRACE_COLUMNS:
        raise ValueError(f"{path}: expected header {','.join(TRACE_COLUMNS)}")
    body = np.array(rows[1:], dtype=np.float64).reshape(-1, len(TRACE_COLUMNS))
    out = {name: body[:, i] for i, name in enumerate(TRACE_COLUMNS)}
    out["layer"] = out["layer"].astype(np.int64)
    return out
