"""Exception hierarchy shared by all modules."""


class MoebiusError(Exception):
    """Base class for every error raised by this package."""


# field construction and arithmetic
class NotPrime(MoebiusError, ValueError):
    pass


class ReduciblePolynomial(MoebiusError, ValueError):
    pass


class DegreeMismatch(MoebiusError, ValueError):
    pass


class DivisionByZero(MoebiusError, ZeroDivisionError):
    pass


class TooLarge(MoebiusError, ValueError):
    """An exhaustive operation was requested on a structure that is too big."""


# geometry
class DegeneratePoints(MoebiusError, ValueError):
    pass


class SingularMap(MoebiusError, ValueError):
    pass


class IdenticalCircles(MoebiusError, ValueError):
    pass


class PointNotOnCircle(MoebiusError, ValueError):
    pass


class PointOnCircle(MoebiusError, ValueError):
    pass


class CircleThroughInfinity(MoebiusError, ValueError):
    pass


class DegenerateCircle(MoebiusError, ValueError):
    pass


# cipher
class InvalidKey(MoebiusError, ValueError):
    pass


class CandidateStreamExhausted(MoebiusError):
    pass


class KeysourceExhausted(CandidateStreamExhausted):
    pass


class MessageCircleThroughInfinity(MoebiusError, ValueError):
    pass


class FieldTooSmall(MoebiusError, ValueError):
    pass


class MalformedTag(MoebiusError, ValueError):
    pass


class LengthMismatch(MoebiusError, ValueError):
    pass


class InvalidContainer(MoebiusError, ValueError):
    pass


class KeyMismatch(MoebiusError, ValueError):
    pass


class AuthenticityNotProvided(MoebiusError):
    """Raised when a caller asks the cipher for integrity guarantees.

    Containers carry no MAC; a modified ciphertext decrypts to some other
    plaintext without any error.
    """


# projective authentication
class IdenticalPoints(MoebiusError, ValueError):
    pass


class MessageNotOnL0(MoebiusError, ValueError):
    pass


class KeyOnL0(MoebiusError, ValueError):
    pass


class TagIsL0(MoebiusError, ValueError):
    pass


class WrongCharacteristic(MoebiusError, ValueError):
    pass
