class BochnerError(Exception):
    """Base class; ``kind`` is a stable machine-readable tag."""

    kind = "error"

    def record(self):
        return {"error": self.kind, "message": str(self)}


class UnitarityError(BochnerError, ValueError):
    kind = "unitarity_violation"


class ParameterError(BochnerError, ValueError):
    kind = "invalid_parameter"


class DomainError(BochnerError, ValueError):
    kind = "out_of_domain"


class InconsistencyError(BochnerError, ArithmeticError):
    kind = "internal_inconsistency"


class InvalidPolynomialError(BochnerError, ValueError):
    kind = "not_a_valid_pD"


class InvalidCellPointError(BochnerError, ValueError):
    kind = "invalid_cell_point"


class SingularError(BochnerError, ArithmeticError):
    kind = "singular_configuration"


class ConvergenceError(BochnerError, ArithmeticError):
    kind = "no_convergence"


class PreconditionError(BochnerError, ValueError):
    kind = "precondition_violated"
