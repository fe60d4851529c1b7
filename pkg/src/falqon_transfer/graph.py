"""Random graph ensembles and exact Max-Cut by exhaustive enumeration.

Two ensembles are supported: uniformly sampled 3-regular graphs (pairing /
configuration model with rejection) and Erdos-Renyi G(n, p).  All randomness
goes through :func:`make_rng`, a PCG64 generator seeded with a single 64-bit
integer, so a ``(family, n, p, seed)`` tuple always reproduces the same graph
on any platform.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

RNG_NAME = "numpy.random.PCG64"
SEED_MASK = (1 << 64) - 1
MAX_BRUTE_FORCE_N = 30
MAX_REGULAR_ATTEMPTS = 10_000
MAX_ER_ATTEMPTS = 10_000


class GraphError(ValueError):
    """Invalid graph parameters or malformed graph data."""


class Family(str, enum.Enum):
    THREE_REGULAR = "3reg"
    ERDOS_RENYI = "er"
    # hand-built graphs (tests, edge-list files from elsewhere)
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().lower()
        aliases = {
            "3reg": cls.THREE_REGULAR,
            "3-regular": cls.THREE_REGULAR,
            "threeregular": cls.THREE_REGULAR,
            "er": cls.ERDOS_RENYI,
            "erdosrenyi": cls.ERDOS_RENYI,
            "erdos-renyi": cls.ERDOS_RENYI,
            "custom": cls.CUSTOM,
        }
        try:
            return aliases[key]
        except KeyError:
            raise GraphError(f"unknown graph family {value!r}") from None


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with its generation provenance."""

    n: int
    edges: tuple[tuple[int, int], ...]
    family: Family = Family.CUSTOM
    p: float | None = None
    seed: int | None = None
    _edge_array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"vertex count must be positive, got {self.n}")
        canon = []
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise GraphError(f"self-loop on vertex {i}")
            if i > j:
                i, j = j, i
            if i < 0 or j >= self.n:
                raise GraphError(f"edge ({i}, {j}) out of range for n={self.n}")
            canon.append((i, j))
        canon.sort()
        if len(set(canon)) != len(canon):
            raise GraphError("duplicate edges")
        object.__setattr__(self, "edges", tuple(canon))
        arr = np.array(canon, dtype=np.int64).reshape(-1, 2)
        arr.flags.writeable = False
        object.__setattr__(self, "_edge_array", arr)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def edge_array(self) -> np.ndarray:
        """Read-only ``(m, 2)`` int array of edges."""
        return self._edge_array

    def degrees(self) -> np.ndarray:
        return np.bincount(self._edge_array.ravel(), minlength=self.n)

    def provenance(self) -> dict:
        return {"family": self.family.value, "n": self.n, "p": self.p, "seed": self.seed}


@dataclass(frozen=True)
class MaxCutSolution:
    optimum: int
    witness: str


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed; negative or oversized seeds are rejected."""
    seed = int(seed)
    if seed < 0 or seed > SEED_MASK:
        raise GraphError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def gen_three_regular(n: int, seed: int) -> Graph:
    """Sample a simple 3-regular graph on ``n`` vertices.

    Stubs are shuffled and paired; any pairing containing a loop or a repeated
    edge is discarded whole and redrawn from the same generator stream.
    Full rejection keeps the result uniform over labelled 3-regular graphs.
    """
    n = int(n)
    if n < 4 or n % 2:
        raise GraphError(f"3-regular graphs need even n >= 4, got {n}")
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), 3)
    for _ in range(MAX_REGULAR_ATTEMPTS):
        rng.shuffle(stubs)
        pairs = np.sort(stubs.reshape(-1, 2), axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {(int(a), int(b)) for a, b in pairs}
        if len(edges) != len(pairs):
            continue
        return Graph(n, tuple(edges), Family.THREE_REGULAR, None, int(seed))
    raise GraphError(f"no simple 3-regular pairing found in {MAX_REGULAR_ATTEMPTS} attempts")


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Sample G(n, p), redrawing with sub-seed ``seed ^ attempt`` if no edge appears.

    Pairs are visited in lexicographic order, one uniform draw each.
    """
    n = int(n)
    p = float(p)
    if n < 2:
        raise GraphError(f"Erdos-Renyi graphs need n >= 2, got {n}")
    if not (0.0 < p <= 1.0):
        raise GraphError(f"edge probability must lie in (0, 1], got {p}")
    pairs = np.array(list(itertools.combinations(range(n), 2)), dtype=np.int64)
    for attempt in range(MAX_ER_ATTEMPTS):
        rng = make_rng(int(seed) ^ attempt)
        keep = rng.random(len(pairs)) < p
        if keep.any():
            edges = tuple((int(a), int(b)) for a, b in pairs[keep])
            return Graph(n, edges, Family.ERDOS_RENYI, p, int(seed))
    raise GraphError(f"G({n}, {p}) produced no edges in {MAX_ER_ATTEMPTS} attempts")


def generate(family: "Family | str", n: int, p: float | None, seed: int) -> Graph:
    family = Family.parse(family)
    if family is Family.THREE_REGULAR:
        return gen_three_regular(n, seed)
    if family is Family.ERDOS_RENYI:
        if p is None:
            raise GraphError("Erdos-Renyi generation needs an edge probability p")
        return gen_erdos_renyi(n, p, seed)
    raise GraphError(f"family {family.value!r} cannot be generated")


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, tuple(outer + spokes + inner))


def _parse_assignment(g: Graph, assignment: "str | Sequence[int]") -> np.ndarray:
    if isinstance(assignment, str):
        if set(assignment) - {"0", "1"}:
            raise GraphError(f"assignment must be a bitstring, got {assignment!r}")
        bits = np.array([c == "1" for c in assignment], dtype=np.int8)
    else:
        bits = np.asarray(assignment, dtype=np.int8)
        if np.any((bits != 0) & (bits != 1)):
            raise GraphError("assignment entries must be 0 or 1")
    if bits.shape != (g.n,):
        raise GraphError(f"assignment has {bits.size} bits, graph has {g.n} vertices")
    return bits


def cut_value(g: Graph, assignment: "str | Sequence[int]") -> int:
    """Number of edges whose endpoints are on different sides.

    Character ``i`` of a string assignment (or entry ``i`` of a sequence) is
    the side of vertex ``i``.
    """
    bits = _parse_assignment(g, assignment)
    if g.m == 0:
        return 0
    e = g.edge_array
    return int(np.count_nonzero(bits[e[:, 0]] != bits[e[:, 1]]))


def index_to_bitstring(index: int, n: int) -> str:
    """Bitstring with vertex 0 first; vertex ``i`` is bit ``i`` of ``index``."""
    return "".join("1" if (index >> i) & 1 else "0" for i in range(n))


def cut_counts(g: Graph, indices: np.ndarray) -> np.ndarray:
    """Cut value for every basis index in ``indices`` (vertex i = bit i)."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.zeros(indices.shape, dtype=np.int64)
    for i, j in g.edges:
        out += ((indices >> i) ^ (indices >> j)) & 1
    return out


def max_cut_brute_force(g: Graph, chunk: int = 1 << 20) -> MaxCutSolution:
    """Exact Max-Cut by scanning every bipartition with vertex 0 on side 0.

    Ties resolve to the smallest basis index, so the witness is reproducible.
    """
    if g.n > MAX_BRUTE_FORCE_N:
        raise GraphError(f"brute force limited to n <= {MAX_BRUTE_FORCE_N}, got {g.n}")
    total = 1 << (g.n - 1)
    best, best_idx = -1, 0
    for start in range(0, total, chunk):
        half = np.arange(start, min(start + chunk, total), dtype=np.int64)
        counts = cut_counts(g, half << 1)
        k = int(np.argmax(counts))
        if counts[k] > best:
            best, best_idx = int(counts[k]), int(half[k] << 1)
    return MaxCutSolution(best, index_to_bitstring(best_idx, g.n))


# -- edge-list files --------------------------------------------------------


def _fmt_p(p: float | None) -> str:
    return "-" if p is None else repr(float(p))


def format_edgelist(g: Graph) -> str:
    seed = "-" if g.seed is None else str(g.seed)
    lines = [f"{g.n} {g.m} {g.family.value} {_fmt_p(g.p)} {seed}"]
    lines += [f"{i} {j}" for i, j in g.edges]
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise GraphError("empty edge-list file")
    header = rows[0]
    if len(header) != 5:
        raise GraphError(f"header must be 'n m family p seed', got {' '.join(header)!r}")
    try:
        n, m = int(header[0]), int(header[1])
        family = Family.parse(header[2])
        p = None if header[3] == "-" else float(header[3])
        seed = None if header[4] == "-" else int(header[4])
        edges = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except (ValueError, IndexError) as exc:
        raise GraphError(f"malformed edge-list file: {exc}") from None
    if any(len(r) != 2 for r in rows[1:]):
        raise GraphError("edge lines must contain exactly two vertex indices")
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges, file lists {len(edges)}")
    return Graph(n, tuple(edges), family, p, seed)


def write_graph(g: Graph, path: "str | Path") -> None:
    Path(path).write_text(format_edgelist(g))


def read_graph(path: "str | Path") -> Graph:
    return parse_edgelist(Path(path).read_text())

