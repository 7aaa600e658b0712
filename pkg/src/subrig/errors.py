"""Exception taxonomy shared by all subrig modules.

Negative *results* (a failed divisibility test, an inconsistent layer, a
pencil obstruction) are ordinary return values, not exceptions; only
violated preconditions and malformed inputs raise.
"""


class SubrigError(Exception):
    """Base class for all subrig errors."""

    code = "error"


class DivisionByZero(SubrigError):
    code = "division_by_zero"


class PoleAtPoint(SubrigError):
    code = "pole_at_point"


class IrrationalValue(SubrigError):
    """Exact evaluation hit a radical whose value is not rational."""

    code = "irrational_value"


class ZeroPolynomial(SubrigError):
    """The zero polynomial has no (weighted) degree."""

    code = "zero_polynomial"


class BadDivisor(SubrigError):
    code = "bad_divisor"


class DimensionMismatch(SubrigError):
    code = "dimension_mismatch"


class NotBracketGenerating(SubrigError):
    code = "not_bracket_generating"


class SingularFrame(SubrigError):
    code = "singular_frame"


class ZeroFactor(SubrigError):
    code = "zero_factor"


class NotPositiveDefinite(SubrigError):
    code = "not_positive_definite"


class IrrationalSpectrum(SubrigError):
    """Characteristic polynomial does not split over the rationals."""

    code = "irrational_spectrum"


class LayerOutOfRange(SubrigError):
    code = "layer_out_of_range"


class DivisibilityRequired(SubrigError):
    code = "divisibility_required"


class NotFundamental(SubrigError):
    code = "not_fundamental"


class JacobiViolation(SubrigError):
    code = "jacobi_violation"


class BadInput(SubrigError):
    code = "bad_input"


class OddDimension(SubrigError):
    code = "odd_dimension"


class BadBasis(SubrigError):
    code = "bad_basis"


class RadicalTowerUnsupported(SubrigError):
    """An exact square root would need more than quadratic extensions."""

    code = "radical_tower_unsupported"


class UnsupportedFactorFrame(SubrigError):
    code = "unsupported_factor_frame"


class SignAmbiguity(SubrigError):
    code = "sign_ambiguity"


class ExprSyntaxError(SubrigError):
    code = "syntax_error"

    def __init__(self, message, line=1, col=0):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class UnknownSymbol(SubrigError):
    code = "unknown_symbol"

    def __init__(self, name, col=None):
        msg = f"undeclared identifier '{name}'"
        if col is not None:
            msg += f" (col {col})"
        super().__init__(msg)
        self.name = name
        self.col = col


class SchemaError(SubrigError):
    code = "schema_error"
