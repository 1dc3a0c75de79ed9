"""Exception hierarchy shared across the library."""


class GridShareError(Exception):
    """Base class for all library errors."""


class ConfigError(GridShareError):
    """A configuration object violates one of its invariants."""


class ConflictError(GridShareError):
    """An overlay would relabel a cell that already carries a label."""


class PlacementError(GridShareError):
    """A signal footprint does not fit in the available downlink cells."""


class ScenarioError(GridShareError):
    """A scenario document failed parsing or validation.

    ``path`` points into the document (e.g. "lte.crs_ports").
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
