"""Exception types shared across the package."""


class PatentFlowError(Exception):
    """Domain error: invalid input or an operation that cannot proceed.

    The CLI maps this to exit code 1.
    """


class MalformedEdgeError(PatentFlowError):
    """An edge references a node index outside the declared node range."""
