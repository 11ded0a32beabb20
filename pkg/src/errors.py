"""Error types shared by the library and the command line"""

from typing import Any, Optional


class FsrError(Exception):
    """Base error; `code` is the machine-readable tag printed by the CLI"""

    code = 'FSR_ERROR'

    def __init__(self, message: str, detail: Optional[Any] = None):
        super().__init__(message)
        self.detail = detail


class InvalidParameter(FsrError):
    code = 'INVALID_PARAMETER'


class NonAssociativeTable(FsrError):
    code = 'NON_ASSOCIATIVE_TABLE'

    def __init__(self, triple):
        x, y, z = triple
        super().__init__(f"table is not associative at ({x}+{y})+{z} != {x}+({y}+{z})", triple)
        self.triple = triple


class ForeignElement(FsrError):
    code = 'FOREIGN_ELEMENT'


class NotAGroup(FsrError):
    code = 'NOT_A_GROUP'


class OrderTooLarge(FsrError):
    code = 'ORDER_TOO_LARGE'


class IndexOutOfRange(FsrError):
    code = 'INDEX_OUT_OF_RANGE'


class PrefixTooLong(FsrError):
    code = 'PREFIX_TOO_LONG'


class StreamExhausted(FsrError):
    code = 'STREAM_EXHAUSTED'


class NonEmptyTailIntersection(FsrError):
    code = 'NON_EMPTY_TAIL_INTERSECTION'


class NotDisjointProper(FsrError):
    code = 'NOT_DISJOINT_PROPER'


class TooShort(FsrError):
    code = 'TOO_SHORT'


class NoStableBaseline(FsrError):
    code = 'NO_STABLE_BASELINE'


class NotASubsemigroup(FsrError):
    code = 'NOT_A_SUBSEMIGROUP'


class CarrierTooLarge(FsrError):
    code = 'CARRIER_TOO_LARGE'


class VerificationFailed(FsrError):
    code = 'VERIFICATION_FAILED'


class WitnessFormatError(FsrError):
    code = 'WITNESS_FORMAT'
