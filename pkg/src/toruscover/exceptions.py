"""Exception hierarchy for toruscover."""


class ToruscoverError(Exception):
    """Base exception for all toruscover errors."""

    code = "error"
    exit_code = 1


class InputError(ToruscoverError):
    """Raised when a request or an argument fails validation."""

    code = "invalid-input"
    exit_code = 2


class DimensionMismatchError(InputError):
    """Raised when two objects live in ambient spaces of different dimension."""

    code = "dimension-mismatch"

    def __init__(self, expected: int, got: int, what: str = "dimension") -> None:
        self.expected = expected
        self.got = got
        super().__init__(f"{what} mismatch: expected {expected}, got {got}")


class ShapeError(InputError):
    """Raised when a matrix or vector has the wrong shape."""

    code = "shape-mismatch"


class NotPrimeError(InputError):
    """Raised when a prime modulus is required but a composite was given."""

    code = "not-prime"


class DisconnectedCoverError(InputError):
    """Raised when an operation needs a connected total space."""

    code = "disconnected-cover"


class ComputationError(ToruscoverError):
    """Base exception for failures during a computation."""

    code = "computation-failed"
    exit_code = 3


class CapExceededError(ComputationError):
    """Raised when an enumeration would exceed the configured cap."""

    code = "cap-exceeded"

    def __init__(self, cap: int, detail: str = "") -> None:
        self.cap = cap
        self.detail = detail
        if detail:
            msg = f"enumeration cap {cap} exceeded: {detail}"
        else:
            msg = f"enumeration cap {cap} exceeded"
        super().__init__(msg)


class NonCommutingError(ComputationError):
    """Raised when torus monodromy generators do not commute."""

    code = "non-commuting"


class NonAbelianError(ComputationError):
    """Raised when a group that must be abelian is not."""

    code = "non-abelian"

    def __init__(self, order: int) -> None:
        self.order = order
        super().__init__(f"group of order {order} is not abelian")


class ContainmentError(ComputationError):
    """Raised when a required lattice containment does not hold."""

    code = "not-contained"


class OracleLimitError(ComputationError):
    """Raised when a brute-force oracle is asked for an oversized input."""

    code = "oracle-limit"


class TrivialCoveringError(ComputationError):
    """Raised when an obstruction is requested for the trivial covering."""

    code = "trivial-covering"


class RankDeficientError(ComputationError):
    """Raised when a sublattice must have full rank but does not."""

    code = "not-full-rank"


class FlagError(ComputationError):
    """Raised when a chain of subspaces is not a strictly decreasing flag."""

    code = "invalid-flag"
