"""Error taxonomy shared across the package."""


class ScatterLabelError(Exception):
    """Base class for all package errors."""


class ContractViolation(ScatterLabelError):
    """An operation was handed input that breaks its precondition."""


class DegenerateInput(ContractViolation):
    pass


class InvalidParameter(ContractViolation):
    pass


class DisconnectedGraphError(ScatterLabelError):
    """Raised by geodesic computations on a disconnected neighbor graph."""

    def __init__(self, component_count, hint=None):
        self.component_count = component_count
        msg = f"neighbor graph is disconnected: {component_count} components"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)


class CalibrationError(ScatterLabelError):
    """Perplexity binary search failed to converge for some point."""

    def __init__(self, point_index, steps):
        self.point_index = point_index
        super().__init__(
            f"perplexity calibration did not converge for point {point_index} "
            f"after {steps} bisection steps"
        )


class DegenerateEmbedding(ScatterLabelError):
    pass


class DivergenceError(ScatterLabelError):
    """Non-finite values appeared during an iterative solve."""


class NormalizationError(ScatterLabelError):
    """Affinity graph has isolated vertices and cannot be normalized."""

    def __init__(self, vertices):
        self.vertices = list(vertices)
        shown = ", ".join(str(v) for v in self.vertices[:10])
        more = "" if len(self.vertices) <= 10 else f", … ({len(self.vertices)} total)"
        super().__init__(f"isolated vertices with zero degree: [{shown}{more}]")


class InvalidBandwidth(ScatterLabelError):
    pass


class ParseError(ScatterLabelError):
    """IDX / dataset file parse failure; carries the offending byte offset."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class InvalidSplit(ScatterLabelError):
    pass


class EmptySelectionError(ScatterLabelError):
    pass


class SessionFinishedError(ScatterLabelError):
    """Mutation attempted on a finished (immutable) session."""


class SequencingError(ScatterLabelError):
    """Operation called out of order (e.g. export before finish)."""


class ViewStackError(ScatterLabelError):
    """Back-navigation attempted at the root view."""
