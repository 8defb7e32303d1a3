"""Seeded simulators for influence dynamics.

Two generative processes produce empirical statistics over paired sign
sequences: a pairwise process where one actor copies the other with a set
probability, and a network process where random directed edges fire and
the target copies the source.  Both are deterministic per seed via a
counter-based generator, so runs reproduce byte-for-byte across machines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._rand import philox_rng

log = logging.getLogger(__name__)


@dataclass(eq=False)
class DirectedGraph:
    """A fixed directed graph; edges is an (m, 2) array of (source, target)."""

    n_nodes: int
    edges: np.ndarray
    skipped_self_loops: int = 0

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.edges = e
        if self.n_nodes < 0:
            raise ValueError("negative node count %d" % self.n_nodes)
        if e.size:
            if e.min() < 0:
                raise ValueError("negative node index in edge list")
            if e.max() >= self.n_nodes:
                raise ValueError("edge references node %d beyond n_nodes=%d"
                                 % (int(e.max()), self.n_nodes))
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loop in edge list")

    @property
    def m_edges(self) -> int:
        return int(self.edges.shape[0])


def load_edges(path, allow_duplicates: bool = False) -> DirectedGraph:
    """Parse a whitespace-separated "source target" edge list.

    '#' starts a comment.  Self-loops are skipped with a warning and the
    skip count is recorded on the returned graph.  Duplicate edges are
    dropped unless allow_duplicates is set.
    """
    edges: List[Tuple[int, int]] = []
    skipped = 0
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError("%s:%d: expected 'source target', got %r"
                                 % (path, ln, raw.rstrip("\n")))
            try:
                s, t = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError("%s:%d: non-integer node id in %r"
                                 % (path, ln, raw.rstrip("\n"))) from None
            if s < 0 or t < 0:
                raise ValueError("%s:%d: negative node id" % (path, ln))
            if s == t:
                skipped += 1
                continue
            edges.append((s, t))
    if skipped:
        log.warning("%s: skipped %d self-loop(s)", path, skipped)
    if not allow_duplicates:
        edges = list(dict.fromkeys(edges))
    n = 1 + max((max(s, t) for s, t in edges), default=-1)
    return DirectedGraph(n, np.array(edges, dtype=np.int64).reshape(-1, 2),
                         skipped_self_loops=skipped)


def save_edges(path, graph: DirectedGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s, t in graph.edges:
            fh.write("%d %d\n" % (s, t))


def gen_graph(n_nodes: int, m_edges: int, seed: int) -> DirectedGraph:
    """Synthetic preferential-attachment style directed graph.

    Nodes arrive in index order and link to earlier nodes drawn from a bag
    holding one entry per node plus one per received edge, so early nodes
    accumulate in-degree roughly like a scale-free network.  The edge count
    comes out within a few percent of m_edges (early nodes cannot absorb
    their full quota).
    """
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes, got %d" % n_nodes)
    if m_edges < 1:
        raise ValueError("need at least 1 edge, got %d" % m_edges)
    rng = philox_rng(seed)
    per_node = m_edges / (n_nodes - 1)
    bag = [0]
    edges = []
    quota_acc = 0.0
    for u in range(1, n_nodes):
        quota_acc += per_node
        k = int(quota_acc)
        quota_acc -= k
        k = min(k, u)
        chosen = set()
        guard = 0
        while len(chosen) < k and guard < 50 * (k + 1):
            v = bag[int(rng.integers(0, len(bag)))]
            guard += 1
            if v not in chosen:
                chosen.add(v)
        for v in chosen:
            edges.append((u, v))
            bag.append(v)
        bag.append(u)
    return DirectedGraph(n_nodes, np.array(edges, dtype=np.int64))


@dataclass(frozen=True)
class InfluenceParams:
    """Knobs of the influence processes.

    copy_prob is the pairwise copy probability; the network process copies
    unconditionally on each firing edge and ignores it.
    steps_between_slices defaults to one update per edge (None -> m_edges).
    """

    T: int
    copy_prob: float = 0.5
    steps_between_slices: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.T <= 6:
            raise ValueError("T=%d outside supported range 2..6" % self.T)
        if not 0.0 <= self.copy_prob <= 1.0:
            raise ValueError("copy probability %r outside [0,1]" % (self.copy_prob,))
        if self.steps_between_slices is not None and self.steps_between_slices < 1:
            raise ValueError("steps_between_slices must be >= 1, got %d"
                             % self.steps_between_slices)


@dataclass
class EmpiricalDistribution:
    """Counts over outcome strings like "++-|+-+" (A signs | B signs)."""

    counts: Dict[str, int]
    sample_size: int

    def __post_init__(self):
        total = 0
        for key, c in self.counts.items():
            if not isinstance(c, (int, np.integer)) or c < 0:
                raise ValueError("count for %r must be a nonnegative integer, got %r"
                                 % (key, c))
            total += int(c)
        if total != self.sample_size:
            raise ValueError("counts sum to %d but sample_size is %d"
                             % (total, self.sample_size))

    def probabilities(self) -> Dict[str, Fraction]:
        """Exact relative frequencies; they sum to 1 by construction."""
        return {k: Fraction(int(c), self.sample_size)
                for k, c in self.counts.items() if c}


def _tabulate(A: np.ndarray, B: np.ndarray) -> EmpiricalDistribution:
    """Count joint sign-sequence outcomes from (n, T) arrays of +-1."""
    n, T = A.shape
    weights = (1 << np.arange(T - 1, -1, -1)).astype(np.int64)
    code_a = ((1 - A) // 2 @ weights)
    code_b = ((1 - B) // 2 @ weights)
    joint = code_a * (1 << T) + code_b
    binc = np.bincount(joint, minlength=1 << (2 * T))
    counts = {}
    for k in np.nonzero(binc)[0]:
        ka, kb = divmod(int(k), 1 << T)
        sa = "".join("+" if (ka >> (T - 1 - t)) & 1 == 0 else "-" for t in range(T))
        sb = "".join("+" if (kb >> (T - 1 - t)) & 1 == 0 else "-" for t in range(T))
        counts["%s|%s" % (sa, sb)] = int(binc[k])
    return EmpiricalDistribution(counts, int(n))


def simulate_pairwise(params: InfluenceParams, pairs: int) -> EmpiricalDistribution:
    """Independent pairs where A copies B's previous state with copy_prob.

    B is uniform +-1 at every slice and A's first slice is uniform; after
    that A^{t+1} equals B^t with probability copy_prob, else a fresh
    uniform sign.
    """
    if pairs < 1:
        raise ValueError("need at least 1 pair, got %d" % pairs)
    rng = philox_rng(params.seed)
    T = params.T
    B = rng.integers(0, 2, size=(pairs, T)).astype(np.int64) * 2 - 1
    A = np.empty_like(B)
    A[:, 0] = rng.integers(0, 2, size=pairs) * 2 - 1
    for t in range(T - 1):
        copy = rng.random(pairs) < params.copy_prob
        fresh = rng.integers(0, 2, size=pairs) * 2 - 1
        A[:, t + 1] = np.where(copy, B[:, t], fresh)
    return _tabulate(A, B)


def simulate_network(graph: DirectedGraph, params: InfluenceParams,
                     frozen: bool = False) -> EmpiricalDistribution:
    """Copy dynamics on a directed graph, tabulated over every edge.

    All nodes start uniform +-1.  Between consecutive slices the process
    fires steps_between_slices random directed edges, the target copying
    the source each time.  Every directed edge then contributes one
    (A, B) = (source sequence, target sequence) sample, so sample_size is
    m_edges; samples sharing a node are dependent, which the downstream
    confidence computation ignores the same way the tabulation-over-edges
    methodology does.

    frozen=True skips every update: node states stay at their initial
    draw, giving sequences constant over time (a control that any static
    latent-state explanation must accept).
    """
    if graph.m_edges == 0:
        raise ValueError("graph has no edges to simulate on")
    rng = philox_rng(params.seed)
    steps = params.steps_between_slices
    if steps is None:
        steps = graph.m_edges
    state = rng.integers(0, 2, size=graph.n_nodes).astype(np.int64) * 2 - 1
    slices = [state.copy()]
    edges = graph.edges
    for _ in range(params.T - 1):
        if not frozen:
            fired = rng.integers(0, graph.m_edges, size=steps)
            for e in fired:
                s, t = edges[e]
                state[t] = state[s]
        slices.append(state.copy())
    S = np.stack(slices, axis=1)
    log.info("network sim: %d nodes, %d edges, %d slices, %d steps/gap%s",
             graph.n_nodes, graph.m_edges, params.T, steps,
             " (frozen)" if frozen else "")
    return _tabulate(S[edges[:, 0]], S[edges[:, 1]])


def save_distribution(path, dist: EmpiricalDistribution) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# outcome count\n")
        for key in sorted(dist.counts):
            fh.write("%s %d\n" % (key, dist.counts[key]))


def load_distribution(path) -> EmpiricalDistribution:
    counts: Dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError("%s:%d: expected 'outcome count', got %r"
                                 % (path, ln, raw.rstrip("\n")))
            if parts[0] in counts:
                raise ValueError("%s:%d: duplicate outcome %r" % (path, ln, parts[0]))
            try:
                counts[parts[0]] = int(parts[1])
            except ValueError:
                raise ValueError("%s:%d: non-integer count %r"
                                 % (path, ln, parts[1])) from None
    return EmpiricalDistribution(counts, sum(counts.values()))
