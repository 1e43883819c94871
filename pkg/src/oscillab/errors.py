"""Exception types shared across the package.

Pointwise numerical checks distinguish "the input is outside the operation's
domain" (raised here) from "the inequality under test failed" (reported in an
AuditReport, never raised).
"""


class OscillabError(Exception):
    """Base class for all package specific errors."""


class SingularPoint(OscillabError):
    """Evaluation point coincides with a root, pointwise ratios are vacuous."""


class ZeroNorm(OscillabError):
    """A norm underflowed to zero; ratios of norms are undefined."""


class ZeroChord(OscillabError):
    """A construction needs a chord of positive length but got delta = 0."""


class NoIntersection(OscillabError):
    """Two half-lines that were expected to meet do not intersect."""


class DegenerateTangent(OscillabError):
    """A chosen supporting line coincides with the chord line of the pair."""


class NotInH(OscillabError):
    """The supplied boundary point is outside the high-level set."""


class FamilyTooLarge(OscillabError):
    """More than four pairwise disjoint short arcs were found.

    The covering construction proves at most four can exist when the tilt
    angle keeps each short arc turning by more than 2*pi/5. Seeing five or
    more signals a geometry or mesh bug, or a tilt override outside the
    valid regime.
    """


class NoCutPoint(OscillabError):
    """The padded arc union covers the whole boundary, no cut point exists."""
