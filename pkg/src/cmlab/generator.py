"""Uniform random pairing of half-edges into a multigraph.

Vertex v owns d_v half-edges; the half-edges are laid out contiguously by
vertex as ids 0..ell-1. A uniform shuffle of the ids paired at positions
(2i, 2i+1) is a perfect matching drawn uniformly from all (ell-1)!!
matchings, which induces the sampled multigraph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degseq import DegreeSequence

_U64 = 2**64


@dataclass(frozen=True)
class Seed:
    """Reproducible RNG identity: (master, stream) fully determines a sample.

    Streams index independent replicates. Derivation goes through numpy's
    SeedSequence, which hashes (master, stream) into the PCG64 state, so
    streams are independent and order-insensitive, and identical seeds give
    identical samples on every platform.
    """

    master: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.master < _U64:
            raise ValueError("master must be a 64-bit unsigned integer")
        if not 0 <= self.stream < _U64:
            raise ValueError("stream must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(seed: Seed | np.random.Generator | int) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, Seed):
        return seed.generator()
    return Seed(master=int(seed)).generator()


@dataclass(frozen=True)
class Multigraph:
    """Edge list of a realized pairing; self-loops and parallel edges kept.

    `edges` is a read-only (ell/2, 2) array of 0-based vertex pairs with
    u <= v per row. A self-loop at v appears as the row (v, v) and
    contributes 2 to v's realized degree.
    """

    n: int
    edges: np.ndarray

    def realized_degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)


def half_edge_count(seq: DegreeSequence) -> int:
    """Total number of half-edges, ell."""
    return seq.ell


def half_edge_owners(seq: DegreeSequence) -> np.ndarray:
    """Owner vertex of each half-edge id (ids grouped by vertex)."""
    return seq.half_edge_owners


def sample_pairing(
    seq: DegreeSequence, seed: Seed | np.random.Generator | int
) -> np.ndarray:
    """Draw a uniform perfect matching of the half-edges.

    Returns an (ell/2, 2) array of half-edge ids: a single uniform shuffle,
    paired at positions (2i, 2i+1). Deterministic given the seed.
    """
    rng = _as_generator(seed)
    perm = rng.permutation(seq.ell)
    return perm.reshape(-1, 2)


def matching_key(pairing: np.ndarray) -> tuple[tuple[int, int], ...]:
    """Canonical form of a pairing: (min, max) pairs sorted by first id.

    Distinguishes matchings of half-edges, not the induced graphs; two
    pairings are the same matching iff their keys are equal.
    """
    pairs = np.sort(np.asarray(pairing), axis=1)
    order = np.argsort(pairs[:, 0])
    return tuple((int(a), int(b)) for a, b in pairs[order])


def multigraph_from_pairing(seq: DegreeSequence, pairing) -> Multigraph:
    """Collapse a half-edge matching into its multigraph."""
    owners = seq.half_edge_owners
    pairs = np.asarray(pairing, dtype=np.int64).reshape(-1, 2)
    a = owners[pairs[:, 0]]
    b = owners[pairs[:, 1]]
    edges = np.column_stack((np.minimum(a, b), np.maximum(a, b)))
    edges.flags.writeable = False
    return Multigraph(n=seq.n, edges=edges)


def sample(seq: DegreeSequence, seed: Seed | np.random.Generator | int) -> Multigraph:
    """Sample the multigraph of a uniform half-edge pairing."""
    return multigraph_from_pairing(seq, sample_pairing(seq, seed))


# ---------------------------------------------------------------------------
# Edge dump: one "u v" pair per line, 1-indexed, self-loop as "v v".
# ---------------------------------------------------------------------------


def format_edges(g: Multigraph) -> str:
    lines = [f"{u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_edges(text: str, n: int | None = None) -> Multigraph:
    """Parse an edge dump; n defaults to the largest vertex id seen."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        u, v = (int(f) for f in line.split())
        if min(u, v) < 1:
            raise ValueError(f"line {lineno}: vertex ids are 1-indexed")
        rows.append((min(u, v) - 1, max(u, v) - 1))
    edges = np.array(rows, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) + 1 if len(rows) else 0
    edges.flags.writeable = False
    return Multigraph(n=n, edges=edges)
