"""Component census of a multigraph and the half-edge exploration process.

The census classifies every connected component and extracts the counters
whose limit laws the theory module predicts: cycle components C_k (k
degree-2 vertices, k edges; a degree-2 vertex with a self-loop is a cycle
of length 1), line components L_k (2 degree-1 endpoints, k-2 degree-2
interior vertices), self-loop edges S, parallel-edge pairs M, the largest
component, and the vertices outside it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .degseq import DegreeSequence
from .errors import DegreeMismatch
from .generator import Multigraph, Seed, _as_generator

# Below this vertex count a plain union-find beats the sparse-matrix setup
# cost; both paths produce identical component partitions.
_UNION_FIND_MAX_N = 256


def _labels_union_find(n: int, edges: np.ndarray) -> np.ndarray:
    parent = list(range(n))
    size = [1] * n

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for u, v in edges:
        ru, rv = find(int(u)), find(int(v))
        if ru == rv:
            continue
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
    return np.array([find(v) for v in range(n)], dtype=np.int64)


def _labels_scipy(n: int, edges: np.ndarray) -> np.ndarray:
    data = np.ones(len(edges), dtype=np.int8)
    adj = csr_matrix((data, (edges[:, 0], edges[:, 1])), shape=(n, n))
    # weak connectivity on the one-directional edge rows equals undirected
    # connectivity and skips the symmetrization pass
    _, labels = connected_components(adj, directed=True, connection="weak")
    return labels


def _component_labels(n: int, edges: np.ndarray) -> np.ndarray:
    if n <= _UNION_FIND_MAX_N:
        return _labels_union_find(n, edges)
    return _labels_scipy(n, edges)


@dataclass(frozen=True)
class ComponentCensus:
    """Counts of every statistic with a predicted limit law.

    multi_edges counts unordered pairs of parallel edges, i.e. C(m, 2)
    summed over vertex pairs with multiplicity m; self_loops counts
    self-loop edges singly. Those are exactly the counters with Poisson
    limits Poi(nu^2/4) and Poi(nu/2).
    """

    n: int
    cycle_counts: dict[int, int]
    line_counts: dict[int, int]
    self_loops: int
    multi_edges: int
    giant_size: int
    complement: int
    other_outside_giant: int
    deg3_outside_giant: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "cycle_counts": {str(k): v for k, v in sorted(self.cycle_counts.items())},
            "line_counts": {str(k): v for k, v in sorted(self.line_counts.items())},
            "self_loops": self.self_loops,
            "multi_edges": self.multi_edges,
            "giant_size": self.giant_size,
            "complement": self.complement,
            "other_outside_giant": self.other_outside_giant,
            "deg3_outside_giant": self.deg3_outside_giant,
        }


def is_connected(c: ComponentCensus) -> bool:
    return c.complement == 0


def is_simple(c: ComponentCensus) -> bool:
    return c.self_loops == 0 and c.multi_edges == 0


def component_census(g: Multigraph, degrees: DegreeSequence) -> ComponentCensus:
    """Classify all components of `g` against its prescribed degrees.

    The largest component breaks size ties by lowest minimum vertex id.
    Cycles and lines are counted over all components, including the
    largest. Raises DegreeMismatch if the realized degrees disagree with
    the sequence.
    """
    if g.n != degrees.n:
        raise DegreeMismatch(f"graph has {g.n} vertices, sequence has {degrees.n}")
    deg = np.asarray(degrees.degrees, dtype=np.int64)
    realized = g.realized_degrees()
    if not np.array_equal(realized, deg):
        bad = int(np.flatnonzero(realized != deg)[0])
        raise DegreeMismatch(
            f"vertex {bad}: realized degree {int(realized[bad])} != "
            f"prescribed {int(deg[bad])}"
        )

    raw = _component_labels(g.n, g.edges)
    roots, first_vertex, labels = np.unique(raw, return_index=True, return_inverse=True)
    k = len(roots)
    sizes = np.bincount(labels, minlength=k)
    edges_per = np.bincount(labels[g.edges[:, 0]], minlength=k)
    n1_per = np.bincount(labels[deg == 1], minlength=k)
    n2_per = np.bincount(labels[deg == 2], minlength=k)

    is_cycle = (n2_per == sizes) & (edges_per == sizes)
    is_line = (n1_per == 2) & (n2_per == sizes - 2) & (edges_per == sizes - 1)

    giant_cands = np.flatnonzero(sizes == sizes.max())
    giant = giant_cands[np.argmin(first_vertex[giant_cands])]
    giant_size = int(sizes[giant])

    outside = np.arange(k) != giant
    other_mask = outside & ~is_cycle & ~is_line
    cycle_counts = Counter(int(s) for s in sizes[is_cycle])
    line_counts = Counter(int(s) for s in sizes[is_line])

    loops = g.edges[:, 0] == g.edges[:, 1]
    self_loops = int(loops.sum())
    plain = g.edges[~loops]
    multi_edges = 0
    if len(plain):
        key = plain[:, 0] * np.int64(g.n) + plain[:, 1]
        _, mult = np.unique(key, return_counts=True)
        multi_edges = int((mult * (mult - 1) // 2).sum())

    return ComponentCensus(
        n=g.n,
        cycle_counts=dict(cycle_counts),
        line_counts=dict(line_counts),
        self_loops=self_loops,
        multi_edges=multi_edges,
        giant_size=giant_size,
        complement=g.n - giant_size,
        other_outside_giant=int(sizes[other_mask].sum()),
        deg3_outside_giant=int(((deg >= 3) & (labels != giant)).sum()),
    )


# ---------------------------------------------------------------------------
# Exploration process
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplorationTrace:
    """Record of the active/dead/neutral half-edge exploration.

    s_values[t] is the active-set size S_t (S_0 = degree of the start
    vertex); neutral_counts[t] is the neutral half-edge count |N_t|. The
    stop rule compares |N_t| (half-edges) against half_threshold = n/2
    (vertex count): t_half is the last t with |N_t| > n/2, None while that
    has not been observed, -1 if even |N_0| <= n/2. vertices_found is the
    number of distinct vertices reached; it equals the component size of
    the start vertex when the trace ends with S_t = 0.
    """

    start_vertex: int
    s_values: list[int]
    neutral_counts: list[int]
    t_zero: int | None
    t_half: int | None
    half_threshold: float
    stop_reason: str
    vertices_found: int


def run_exploration(
    seq: DegreeSequence,
    seed: Seed | np.random.Generator | int,
    start: int,
    run_to_completion: bool = False,
) -> ExplorationTrace:
    """Explore the component of `start`, pairing half-edges on the fly.

    Each step pairs a uniformly chosen active half-edge with a uniform
    partner among all remaining free half-edges, so the pairing built has
    the same distribution as `generator.sample`. Stops at the first t with
    S_t = 0 (reason "hit-zero") or, unless run_to_completion is set, once
    |N_t| <= n/2 (reason "passed-t-half"). With run_to_completion the walk
    continues to S_t = 0 and reports "exhausted" if the threshold was
    passed along the way.
    """
    if not 0 <= start < seq.n:
        raise ValueError(f"start vertex {start} out of range")
    rng = _as_generator(seed)
    deg = np.asarray(seq.degrees, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(deg)))
    owners = seq.half_edge_owners
    ell = seq.ell
    threshold = seq.n / 2

    free_list = list(range(ell))
    free_pos = list(range(ell))
    active_list: list[int] = []
    active_pos = [-1] * ell

    def _remove(lst: list[int], pos: list[int], h: int) -> None:
        i = pos[h]
        last = lst[-1]
        lst[i] = last
        pos[last] = i
        lst.pop()
        pos[h] = -1

    for h in range(int(offsets[start]), int(offsets[start + 1])):
        active_pos[h] = len(active_list)
        active_list.append(h)

    neutral = ell - int(deg[start])
    s_values = [len(active_list)]
    neutral_counts = [neutral]
    t_half: int | None = None
    vertices_found = 1
    t = 0
    passed = False

    while True:
        if t_half is None and neutral <= threshold:
            t_half = t - 1
            passed = True
        if s_values[t] == 0:
            reason = "exhausted" if (passed and run_to_completion) else "hit-zero"
            return ExplorationTrace(
                start_vertex=start,
                s_values=s_values,
                neutral_counts=neutral_counts,
                t_zero=t,
                t_half=t_half,
                half_threshold=threshold,
                stop_reason=reason,
                vertices_found=vertices_found,
            )
        if passed and not run_to_completion:
            return ExplorationTrace(
                start_vertex=start,
                s_values=s_values,
                neutral_counts=neutral_counts,
                t_zero=None,
                t_half=t_half,
                half_threshold=threshold,
                stop_reason="passed-t-half",
                vertices_found=vertices_found,
            )

        e1 = active_list[int(rng.integers(len(active_list)))]
        _remove(active_list, active_pos, e1)
        _remove(free_list, free_pos, e1)
        e2 = free_list[int(rng.integers(len(free_list)))]
        _remove(free_list, free_pos, e2)
        if active_pos[e2] >= 0:
            _remove(active_list, active_pos, e2)
        else:
            v2 = int(owners[e2])
            neutral -= int(deg[v2])
            vertices_found += 1
            for h in range(int(offsets[v2]), int(offsets[v2 + 1])):
                if h != e2:
                    active_pos[h] = len(active_list)
                    active_list.append(h)
        t += 1
        s_values.append(len(active_list))
        neutral_counts.append(neutral)
