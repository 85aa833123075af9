"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (an input object breaks a
structural invariant; CLI exit code 2) and ``MathError`` (inputs are
well-formed but a mathematical precondition or theorem-level check failed;
CLI exit code 3).
"""


class TwistkitError(Exception):
    """Base class for all library errors."""


class ValidationError(TwistkitError):
    """An input object violates one of its structural invariants."""


class MathError(TwistkitError):
    """A mathematically meaningful precondition or check failed."""


class BadBaseError(MathError):
    """Supplied base vertices do not hit each path component exactly once."""


class BadBaseValueError(MathError):
    """A vertex-sign function is -1 at a polarization base vertex."""


class TwistMismatchError(MathError):
    """Twist classes that were required to agree do not."""


class NotExtendableError(MathError):
    """A morphism on a subcomplex admits no extension; carries the conflicts."""

    def __init__(self, message, conflicts=()):
        super().__init__(message)
        self.conflicts = tuple(conflicts)


class DegreeMismatchError(MathError):
    """Chain/cochain degrees passed to a pairing are inconsistent."""


class NotAChainMapError(MathError):
    """A candidate chain map fails to commute with the twisted boundaries."""


class NotAMorphismError(MathError):
    """A vertex-sign field fails the morphism identity on some edge."""


class NotConstantOnComponentError(MathError):
    """A sign field expected to be locally constant is not."""


class NotUniqueError(MathError):
    """More than one twist class satisfies a uniqueness property."""


class NotScalarError(MathError):
    """An induced homology map expected to be +/- identity is not."""


class TwistNotPreservedError(MathError):
    """A map does not pull the target duality twist back to the source one."""


class NoFundamentalClassError(MathError):
    """No twist class gives infinite cyclic top homology."""


class TrivialHomologyError(MathError):
    """The homology group a scalar was requested on is zero."""


class NotAHomomorphismError(MathError):
    """A candidate group map fails multiplicativity."""


class DepthTooSmallError(MathError):
    """A bar complex was requested with truncation depth below 1."""


class OutOfValidRangeError(MathError):
    """A homology degree outside the truncation's valid range was requested."""
