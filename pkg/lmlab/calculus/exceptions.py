class LMLabException(Exception):
    message = "Last multiplier computation failed."

    def __init__(self, *args):
        super(LMLabException, self).__init__(*(args or (self.message,)))


class ChartError(LMLabException):
    message = "Invalid coordinate chart."


class ChartMismatchError(LMLabException):
    message = "Operands live on different charts."


class ExpressionError(LMLabException):
    message = "Invalid expression."


class ExpressionSyntaxError(ExpressionError):
    message = "Expression syntax error."

    def __init__(self, detail, position, source=""):
        self.position = position
        self.source = source
        super(ExpressionSyntaxError, self).__init__(f"{detail} at position {position}")


class UnknownIdentifierError(ExpressionError):
    message = "Unknown identifier."

    def __init__(self, token, position):
        self.token = token
        self.position = position
        super(UnknownIdentifierError, self).__init__(
            f"Unknown identifier {token!r} at position {position}"
        )


class DomainError(ExpressionError):
    message = "Expression is singular at the evaluation point."

    def __init__(self, node, detail):
        self.node = node
        super(DomainError, self).__init__(f"{detail} in {node}")


class SamplingError(LMLabException):
    message = "Too many sample points were skipped; choose a better domain box."


class DegreeError(LMLabException):
    message = "Differential form degree is out of range."


class StructureError(LMLabException):
    message = "Invalid geometric structure."


class PoissonStructureError(StructureError):
    message = "Bivector does not define a Poisson structure."


class StructureConstantsError(StructureError):
    message = "Structure constants violate antisymmetry or the Jacobi identity."


class MetricError(StructureError):
    message = "Matrix does not define a Riemannian metric on the domain."


class NonProductMetricError(MetricError):
    message = "Metric is not a product dt^2 + g_N."


class PreconditionError(LMLabException):
    message = "Operation precondition does not hold."


class NonvanishingError(PreconditionError):
    message = "Function vanishes on too many sample points."


class DivergenceFreeError(PreconditionError):
    message = "Vector field is not divergence-free."


class HelmholtzPreconditionError(PreconditionError):
    message = "Function does not solve the Helmholtz equation."


class RadicandError(PreconditionError):
    message = "Radicand is not strictly positive on the domain."


class FlowError(LMLabException):
    message = "Trajectory integration failed."


class TrajectoryExitError(FlowError):
    message = "Trajectory left the enlarged domain box."


class FlowSingularityError(FlowError):
    message = "Vector field or multiplier is singular along the trajectory."


class UndefinedNameError(LMLabException):
    message = "Reference to an undefined name."

    def __init__(self, kind, name):
        self.kind = kind
        self.name = name
        super(UndefinedNameError, self).__init__(f"Undefined {kind} {name!r}")


class DocumentError(LMLabException):
    message = "Problem document is invalid."

    def __init__(self, errors, path=None):
        self.errors = errors
        self.path = path
        prefix = f"{path}: " if path else ""
        super(DocumentError, self).__init__(f"{prefix}{errors}")


class CheckException(LMLabException):
    message = "Check cannot be used."


class CheckRegistrationException(CheckException):
    message = "Check cannot be registered."
