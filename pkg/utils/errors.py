"""Exception hierarchy shared by the library modules and the scripts."""


class SuperradianceError(Exception):
    """Base class for every error raised by this project."""


class SizingError(SuperradianceError, ValueError):
    """Atom number or matrix dimension outside the supported range."""


class DimensionMismatchError(SuperradianceError, ValueError):
    """State and operator/spectrum belong to different atom numbers."""


class DegenerateStateError(SuperradianceError, ValueError):
    """Observable requested on a state with zero norm."""


class InvalidParameterError(SuperradianceError, ValueError):
    """Physical or numerical parameter outside its admissible range."""


class CatTimeError(SuperradianceError, ValueError):
    """The closed-form cat time is not defined for the given state."""


class UndefinedCatTimeError(CatTimeError):
    """Ground-state population is zero, the cat time does not exist."""


class NegativeCatTimeError(CatTimeError):
    """Ground-state population exceeds the inverted one, the cat time would be negative."""


class ConvergenceError(SuperradianceError, RuntimeError):
    """A validator failed its own convergence or adequacy check."""


class EmptyHistogramError(SuperradianceError, ValueError):
    """Histogram without probability mass."""


class ConfigError(SuperradianceError, ValueError):
    """Invalid run configuration."""


class UnknownFigureError(ConfigError):
    """Figure name not in the reproducible set."""
