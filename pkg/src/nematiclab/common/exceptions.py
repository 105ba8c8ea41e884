class GridMismatchError(ValueError):
    """
    Raise when two fields that must share a grid live on different grids
    """


class ComponentCountError(ValueError):
    """
    Raise when a field has a component count the operation cannot accept
    """


class AxisOutOfRangeError(ValueError):
    """
    Raise when a derivative is requested along an axis the grid does not have
    """


class NegativeTimeError(ValueError):
    """
    Raise when a semigroup or time grid receives a negative time
    """


class MeanZeroViolationError(ValueError):
    """
    Raise when a homogeneous-norm operation receives a field with a nonzero mean
    """


class BesovIndexError(ValueError):
    """
    Raise when a Besov index is outside the range an operation supports
    """


class EmbeddingHypothesisError(ValueError):
    """
    Raise when a pair of Besov indices does not satisfy the embedding hypotheses
    """


class SphereConstraintError(ValueError):
    """
    Raise when a director field does not take unit-length values
    """


class EmptyTimeSeriesError(ValueError):
    """
    Raise when a time-dependent operation receives no time levels
    """


class WeightSingularityError(ValueError):
    """
    Raise when a time weight is not integrable at the origin of the time grid
    """


class HypothesisViolationError(ValueError):
    """
    Raise when an exponent set violates the hypotheses of a boundedness result
    """


class ExponentRangeError(ValueError):
    """
    Raise when a norm ledger is requested outside the exponent range where its components are finite
    """


class CFLViolationError(ArithmeticError):
    """
    Raise when a backward characteristic travels further than a quarter of the grid in one step
    """


class InnerSweepDivergenceError(ArithmeticError):
    """
    Raise when the inner fixed-point sweeps show a growing residual
    """


class InnerContractionError(ArithmeticError):
    """
    Raise when the inner fixed-point sweeps do not contract within the sweep budget
    """


class NeumannRadiusError(ArithmeticError):
    """
    Raise when the Neumann series for the inverse Jacobian is requested with a radius of at least one
    """


class TimeGridMismatchError(ValueError):
    """
    Raise when two time-dependent objects do not share their time grid
    """


class CompatibilityError(ValueError):
    """
    Raise when divergence data is incompatible with a zero initial velocity
    """


class ScalingError(ValueError):
    """
    Raise when a rescaling factor is not a power of two
    """


class SnapshotFormatError(ValueError):
    """
    Raise when a snapshot file is not a valid field snapshot
    """


class ConfigurationError(ValueError):
    """
    Raise when a run configuration file cannot be parsed or validated
    """


class UnknownScenarioError(KeyError):
    """
    Raise when a scenario name is not present in the scenario registry
    """


class SmallnessViolationError(ValueError):
    """
    Raise when initial data exceed the configured smallness threshold and no override was given
    """


class DensityRangeError(ValueError):
    """
    Raise when the density perturbation comes too close to the vacuum value a = −1
    """
