"""Barabási-Albert scale-free topologies, rich-neighbour lookup and edge-list I/O."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np


class ParameterError(ValueError):
    pass


class EdgeListError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class InitiatorError(ValueError):
    pass


class Graph:
    """Static undirected graph in compressed sparse row form.

    Neighbour lists are sorted ascending, so ``indices[indptr[v]:indptr[v + 1]]``
    is the adjacency of ``v``.
    """

    def __init__(self, node_count: int, indptr: np.ndarray, indices: np.ndarray):
        if node_count < 1:
            raise ParameterError("graph needs at least one node")
        self.node_count = int(node_count)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.degrees = np.diff(self.indptr)
        self.edge_count = int(self.indices.size // 2)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        self.degrees.flags.writeable = False

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> Graph:
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= node_count):
            raise ParameterError("edge endpoint out of range")
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ParameterError("self-loop")
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.unique(lo * node_count + hi).size != lo.size:
            raise ParameterError("duplicate edge")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=node_count)
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(node_count, indptr, dst[order])

    def __len__(self) -> int:
        return self.node_count

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"

    def adjacency(self, v: int) -> list[int]:
        self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]].tolist()

    def degree(self, v: int) -> int:
        self._check(v)
        return int(self.degrees[v])

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(u, v)`` with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        keep = src < self.indices
        return list(zip(src[keep].tolist(), self.indices[keep].tolist()))

    def is_connected(self) -> bool:
        seen = np.zeros(self.node_count, dtype=bool)
        seen[0] = True
        frontier = np.array([0])
        while frontier.size:
            nbrs = np.concatenate([self.indices[self.indptr[v]:self.indptr[v + 1]] for v in frontier])
            nbrs = np.unique(nbrs[~seen[nbrs]])
            seen[nbrs] = True
            frontier = nbrs
        return bool(seen.all())

    def _check(self, v: int) -> None:
        if not 0 <= v < self.node_count:
            raise IndexError(f"node {v} out of range for {self.node_count} nodes")


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


@dataclass(frozen=True)
class BaParams:
    n: int
    m: int = 2
    m0: int | None = None
    seed: int = 0

    @property
    def core(self) -> int:
        return self.m + 1 if self.m0 is None else self.m0

    def validate(self) -> None:
        if self.m < 1:
            raise ParameterError(f"m must be >= 1, got {self.m}")
        if self.core < self.m:
            raise ParameterError(f"m0 must be >= m, got m0={self.core}, m={self.m}")
        if self.n < self.core:
            raise ParameterError(f"n must be >= m0, got n={self.n}, m0={self.core}")

    @classmethod
    def for_size(cls, n: int, m: int = 2, m0: int | None = None, seed: int = 0) -> BaParams:
        """Params for ``n`` nodes, shrinking the default core when ``n`` is tiny.

        Only applies when ``m0`` is left to its default; an explicit ``m0`` is
        validated as given.
        """
        if m0 is None and n >= 1 and n < m + 1:
            m = max(1, n - 1)
            m0 = min(m + 1, n)
        return cls(n=n, m=m, m0=m0, seed=seed)

    def expected_edges(self) -> int:
        k = self.core
        return k * (k - 1) // 2 + self.m * (self.n - k)


def generate_ba(params: BaParams) -> Graph:
    """Grow a preferential-attachment graph from a complete core of ``m0`` nodes.

    Each new node links to ``m`` distinct existing nodes drawn with probability
    proportional to their current degree (repeated-node list, rejection on repeats).
    """
    params.validate()
    rng = random.Random(params.seed)
    n, m, k = params.n, params.m, params.core
    edges: list[tuple[int, int]] = [(u, v) for u in range(k) for v in range(u + 1, k)]
    repeated: list[int] = [u for u in range(k) for _ in range(k - 1)]
    for source in range(k, n):
        targets: set[int] = set()
        chosen: list[int] = []
        while len(chosen) < m:
            # only reachable with a one-node core, where nothing has degree yet
            t = rng.choice(repeated) if repeated else rng.randrange(source)
            if t not in targets:
                targets.add(t)
                chosen.append(t)
        edges.extend((t, source) for t in chosen)
        repeated.extend(chosen)
        repeated.extend([source] * m)
    return Graph.from_edges(n, edges)


@dataclass(frozen=True, eq=False)
class RichNeighbourTable:
    rich: np.ndarray

    def __getitem__(self, v: int) -> int:
        return int(self.rich[v])

    def __len__(self) -> int:
        return int(self.rich.size)


def build_rich_table(g: Graph) -> RichNeighbourTable:
    """Point every node at its highest-degree neighbour, smallest id on ties."""
    if np.any(g.degrees == 0):
        v = int(np.flatnonzero(g.degrees == 0)[0])
        raise ParameterError(f"node {v} is isolated; no rich neighbour")
    n = g.node_count
    key = g.degrees[g.indices] * n + (n - 1 - g.indices)
    best = np.maximum.reduceat(key, g.indptr[:-1])
    rich = (n - 1 - best % n).astype(np.int64)
    rich.flags.writeable = False
    return RichNeighbourTable(rich)


@dataclass(frozen=True)
class InitiatorPolicy:
    """How the source node is picked: ``min-degree``, ``max-degree``,
    ``random``, ``node:<id>`` or ``degree:<k>``."""

    kind: str
    value: int | None = None

    KINDS = ("min-degree", "max-degree", "random", "node", "degree")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InitiatorError(f"unknown initiator policy {self.kind!r}")
        if (self.kind in ("node", "degree")) != (self.value is not None):
            raise InitiatorError(f"policy {self.kind!r} takes {'a' if self.value is None else 'no'} value")

    @classmethod
    def parse(cls, text: str) -> InitiatorPolicy:
        m = re.fullmatch(r"(node|degree):(\d+)", text.strip())
        if m:
            return cls(m.group(1), int(m.group(2)))
        return cls(text.strip())

    def __str__(self) -> str:
        return self.kind if self.value is None else f"{self.kind}:{self.value}"


MIN_DEGREE = InitiatorPolicy("min-degree")
MAX_DEGREE = InitiatorPolicy("max-degree")
UNIFORM_RANDOM = InitiatorPolicy("random")


def select_initiator(g: Graph, policy: InitiatorPolicy, rng: np.random.Generator) -> int:
    deg = g.degrees
    if policy.kind == "min-degree":
        return int(np.argmin(deg))
    if policy.kind == "max-degree":
        return int(np.argmax(deg))
    if policy.kind == "random":
        return int(rng.integers(g.node_count))
    if policy.kind == "node":
        if not 0 <= policy.value < g.node_count:
            raise InitiatorError(f"node {policy.value} out of range for {g.node_count} nodes")
        return policy.value
    candidates = np.flatnonzero(deg == policy.value)
    if candidates.size == 0:
        raise InitiatorError(f"no node has degree {policy.value}")
    return int(candidates[rng.integers(candidates.size)])


def save_edge_list(g: Graph, sink: TextIO) -> None:
    sink.write(f"# nodes={g.node_count} edges={g.edge_count}\n")
    for u, v in g.edges():
        sink.write(f"{u} {v}\n")


_HEADER = re.compile(r"#\s*nodes=(\d+)\s+edges=(\d+)\s*")


def load_edge_list(source: TextIO) -> Graph:
    header = source.readline()
    m = _HEADER.fullmatch(header.strip())
    if not m:
        raise EdgeListError(1, f"expected '# nodes=N edges=E' header, got {header.strip()!r}")
    n, declared = int(m.group(1)), int(m.group(2))
    if n < 1:
        raise EdgeListError(1, "nodes must be >= 1")
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    for lineno, line in enumerate(source, start=2):
        text = line.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise EdgeListError(lineno, f"malformed edge {text!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise EdgeListError(lineno, f"self-loop on node {u}")
        if u > v:
            raise EdgeListError(lineno, f"edge must be written as 'u v' with u < v, got {text!r}")
        if v >= n:
            raise EdgeListError(lineno, f"node {v} out of range for {n} nodes")
        if (u, v) in seen:
            raise EdgeListError(lineno, f"duplicate edge {u} {v}")
        seen.add((u, v))
        edges.append((u, v))
    if len(edges) != declared:
        raise EdgeListError(1, f"header declares {declared} edges, body has {len(edges)}")
    return Graph.from_edges(n, edges)
