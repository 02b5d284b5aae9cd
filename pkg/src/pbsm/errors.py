"""Exception taxonomy for the pbsm toolkit.

Every domain error carries a stable machine-readable ``kind`` so the CLI
can emit it on stderr without string matching.
"""


class PbsmError(Exception):
    kind = "Error"

    def to_dict(self):
        return {"kind": self.kind, "message": str(self)}


# audio_io
class NotWav(PbsmError):
    kind = "NotWav"


class UnsupportedFormat(PbsmError):
    kind = "UnsupportedFormat"


class Truncated(PbsmError):
    kind = "Truncated"


class IoFailure(PbsmError):
    kind = "IoFailure"


class SilentInput(PbsmError):
    kind = "SilentInput"


# dsp
class BadWindow(PbsmError):
    kind = "BadWindow"


class ColaViolation(PbsmError):
    kind = "ColaViolation"


class RatioOutOfRange(PbsmError):
    kind = "RatioOutOfRange"


# trigger
class ClipTooShort(PbsmError):
    kind = "ClipTooShort"


class CarrierAboveNyquist(PbsmError):
    kind = "CarrierAboveNyquist"


class NoRoom(PbsmError):
    kind = "NoRoom"


class RateTooLow(PbsmError):
    kind = "RateTooLow"


# poison
class PoolTooSmall(PbsmError):
    kind = "PoolTooSmall"


# features
class BadRange(PbsmError):
    kind = "BadRange"


# desk model
class ShapeMismatch(PbsmError):
    kind = "ShapeMismatch"


class DegenerateLabels(PbsmError):
    kind = "DegenerateLabels"


# metrics
class EmptyInput(PbsmError):
    kind = "EmptyInput"


class LengthMismatch(PbsmError):
    kind = "LengthMismatch"
