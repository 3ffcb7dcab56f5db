"""Exception types shared across the package."""


class CmlabError(Exception):
    """Base class for every error raised by cmlab."""


class ZeroOrNegativeDegree(CmlabError):
    """A degree sequence contains a degree below 1."""


class OddTotalDegree(CmlabError):
    """The total degree is odd, so no perfect pairing of half-edges exists."""


class InfeasibleTargets(CmlabError):
    """Requested degree-class counts cannot be realized on n vertices."""


class SeriesDivergence(CmlabError):
    """Closed-form limit requested outside its validity domain (2*p2 >= d)."""


class NuInfinite(CmlabError):
    """A formula requiring a finite second-moment ratio was given nu = inf."""


class InfeasibleProduct(CmlabError):
    """The exact no-short-line product needs 2*n1 <= total degree."""


class TooLarge(CmlabError):
    """Exhaustive enumeration requested beyond the half-edge cap."""


class DegreeMismatch(CmlabError):
    """A multigraph's realized degrees disagree with the prescribed sequence."""


class ZeroAcceptedSamples(CmlabError):
    """Conditioning by rejection discarded every replicate."""
