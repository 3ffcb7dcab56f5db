"""Degree sequences and their critical-window parameters.

A degree sequence assigns a degree d_v >= 1 to each of n vertices. The
connectivity behaviour of the paired multigraph is governed by four ratios:
n1/sqrt(n), n2/n, the mean degree, and the size-biased mean nu. This module
validates sequences, computes those ratios exactly from the degree counts,
and builds parametrized sequences for experiments.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InfeasibleTargets, OddTotalDegree, ZeroOrNegativeDegree

#: nu values above this cap are treated as infinite by to_limit_params.
NU_CAP_DEFAULT = 1e6


@dataclass(frozen=True)
class DegreeSequence:
    """Validated degree sequence with cached counts.

    `degrees` is a read-only int32 array (d_1..d_n); `ell` is the total
    degree (held as a Python int, so it never overflows); `counts` maps
    degree -> multiplicity. Instances are immutable and safe to share.
    """

    degrees: np.ndarray
    n: int
    ell: int
    counts: dict[int, int] = field(repr=False)

    @property
    def n1(self) -> int:
        return self.counts.get(1, 0)

    @property
    def n2(self) -> int:
        return self.counts.get(2, 0)

    @cached_property
    def half_edge_owners(self) -> np.ndarray:
        """Owner vertex of each half-edge id, ids laid out by vertex."""
        owners = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        owners.flags.writeable = False
        return owners

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.degrees, other.degrees)


@dataclass(frozen=True)
class WindowParams:
    """Finite-n window ratios: n1/sqrt(n), n2/n, mean degree, nu."""

    rho1_n: float
    p2_n: float
    d_n: float
    nu_n: float


@dataclass(frozen=True)
class LimitParams:
    """Limiting window parameters feeding every closed-form prediction.

    `nu` may be math.inf; series-based formulas additionally require
    2*p2 < d, which is enforced at the evaluation sites in `theory`.
    """

    rho1: float
    p2: float
    d: float
    nu: float


def validate(raw_degrees) -> DegreeSequence:
    """Check degrees and build a DegreeSequence.

    Every degree must be >= 1 and the total degree even (otherwise the
    half-edges cannot be paired). Raises ZeroOrNegativeDegree or
    OddTotalDegree.
    """
    raw = np.asarray(raw_degrees)
    degrees = raw.astype(np.int64)
    if raw.dtype.kind not in "iu" and not np.array_equal(degrees, raw):
        raise ZeroOrNegativeDegree("degrees must be integers")
    if degrees.ndim != 1 or degrees.size == 0:
        raise ZeroOrNegativeDegree("degree sequence must be a nonempty 1-d array")
    if degrees.min() < 1:
        raise ZeroOrNegativeDegree(
            f"degrees must all be >= 1, found {int(degrees.min())}"
        )
    ell = int(degrees.sum())
    if ell % 2 != 0:
        raise OddTotalDegree(f"total degree {ell} is odd; pairing impossible")
    values, mults = np.unique(degrees, return_counts=True)
    counts = {int(v): int(m) for v, m in zip(values, mults)}
    out = degrees.astype(np.int32)
    out.flags.writeable = False
    return DegreeSequence(degrees=out, n=int(degrees.size), ell=ell, counts=counts)


def from_counts(counts: dict[int, int]) -> DegreeSequence:
    """Build a validated sequence from a degree -> multiplicity map."""
    parts = [np.full(m, deg, dtype=np.int64) for deg, m in sorted(counts.items())]
    if not parts:
        raise ZeroOrNegativeDegree("counts map is empty")
    return validate(np.concatenate(parts))


def window_params(seq: DegreeSequence) -> WindowParams:
    """Compute the four window ratios exactly from the cached counts.

    nu_n = E[D(D-1)]/E[D] = sum_i n_i*i*(i-1) / ell.
    """
    second = sum(m * deg * (deg - 1) for deg, m in seq.counts.items())
    return WindowParams(
        rho1_n=seq.n1 / math.sqrt(seq.n),
        p2_n=seq.n2 / seq.n,
        d_n=seq.ell / seq.n,
        nu_n=second / seq.ell,
    )


def build_sequence(
    n: int, rho1: float, p2: float, bulk_degree: int = 3
) -> DegreeSequence:
    """Construct a window sequence: round(rho1*sqrt(n)) vertices of degree 1,
    round(p2*n) of degree 2, the rest of degree `bulk_degree`.

    If the total degree comes out odd, exactly one bulk vertex gets its
    degree incremented by 1; the repair is visible in the result's counts
    and perturbs every window ratio by o(1). Raises InfeasibleTargets when
    the rounded counts exceed n, or when parity cannot be repaired because
    no bulk vertex exists.
    """
    if n < 1:
        raise InfeasibleTargets(f"need n >= 1, got {n}")
    if rho1 < 0 or not 0 <= p2 < 1:
        raise InfeasibleTargets(f"need rho1 >= 0 and 0 <= p2 < 1, got {rho1}, {p2}")
    if bulk_degree < 3:
        raise InfeasibleTargets(f"bulk_degree must be >= 3, got {bulk_degree}")
    n1 = round(rho1 * math.sqrt(n))
    n2 = round(p2 * n)
    if n1 + n2 > n:
        raise InfeasibleTargets(
            f"rounded counts n1={n1}, n2={n2} exceed n={n}"
        )
    n_bulk = n - n1 - n2
    ell = n1 + 2 * n2 + bulk_degree * n_bulk
    counts = Counter()
    if n1:
        counts[1] = n1
    if n2:
        counts[2] = n2
    if n_bulk:
        counts[bulk_degree] = n_bulk
    if ell % 2 != 0:
        if n_bulk == 0:
            raise InfeasibleTargets(
                "total degree is odd and there is no bulk vertex to repair parity"
            )
        counts[bulk_degree] -= 1
        if counts[bulk_degree] == 0:
            del counts[bulk_degree]
        counts[bulk_degree + 1] += 1
    return from_counts(dict(counts))


def to_limit_params(w: WindowParams, nu_cap: float = NU_CAP_DEFAULT) -> LimitParams:
    """Treat the finite-n ratios as their own limits for prediction purposes.

    nu_n above `nu_cap` is flagged as infinite so the generic formulas are
    never fed an effectively divergent second moment.
    """
    nu = math.inf if w.nu_n > nu_cap else w.nu_n
    return LimitParams(rho1=w.rho1_n, p2=w.p2_n, d=w.d_n, nu=nu)


# ---------------------------------------------------------------------------
# Degree-sequence file format: one line per entry, either a bare degree
# (one vertex) or a "degree count" pair; '#' starts a comment line. The
# serializer emits the run-length form sorted by degree.
# ---------------------------------------------------------------------------


def parse_degrees(text: str) -> DegreeSequence:
    """Parse the plain-text degree file format."""
    counts: Counter[int] = Counter()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) == 1:
            counts[int(fields[0])] += 1
        elif len(fields) == 2:
            counts[int(fields[0])] += int(fields[1])
        else:
            raise ValueError(f"line {lineno}: expected 'degree' or 'degree count'")
    return from_counts(dict(counts))


def format_degrees(seq: DegreeSequence) -> str:
    """Serialize to the run-length form, sorted by degree."""
    lines = [f"{deg} {mult}" for deg, mult in sorted(seq.counts.items())]
    return "\n".join(lines) + "\n"


def load_degrees(path: str | Path) -> DegreeSequence:
    return parse_degrees(Path(path).read_text(encoding="utf-8"))


def dump_degrees(seq: DegreeSequence, path: str | Path) -> None:
    Path(path).write_text(format_degrees(seq), encoding="utf-8")
