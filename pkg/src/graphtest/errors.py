class DataError(ValueError):
    """Malformed or inconsistent input data."""


class InfeasibleError(ValueError):
    """A requested (energy, smoothness) target cannot be realized on the graph."""
