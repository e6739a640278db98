class AnglevecError(Exception):
  """Base class for every error raised by the library.

  `code` is the machine-readable identifier printed by the command line.
  """

  code = "E_ANGLEVEC"

  def __init__(self, message: str = "", **details):
    super().__init__(message)
    self.details = details


class DimensionMismatch(AnglevecError):
  code = "E_DIMENSION"


class ZeroVectorError(AnglevecError):
  code = "E_ZERO_VECTOR"


class SingularMapError(AnglevecError):
  code = "E_SINGULAR"


class NotFullDimensional(AnglevecError):
  code = "E_NOT_FULL_DIM"


class DuplicateVertex(AnglevecError):
  code = "E_DUPLICATE"


class RedundantPoint(AnglevecError):
  code = "E_REDUNDANT"


class NotSimplicial(AnglevecError):
  code = "E_NOT_SIMPLICIAL"


class BoundaryRayError(AnglevecError):
  code = "E_BOUNDARY_RAY"


class WeightError(AnglevecError):
  code = "E_WEIGHTS"


class ApproximateModelError(AnglevecError):
  code = "E_APPROXIMATE"


class PreconditionError(AnglevecError):
  code = "E_PRECONDITION"


class ShellingError(AnglevecError):
  code = "E_SHELLING"


class ConsistencyError(AnglevecError):
  code = "E_CONSISTENCY"


class SearchExhausted(AnglevecError):
  code = "E_EXHAUSTED"


class CheckFailure(AnglevecError):
  code = "E_CHECK_FAILED"


class InputError(AnglevecError):
  code = "E_PARSE"
