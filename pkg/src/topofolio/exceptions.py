"""Exception types raised across the package."""


class TopofolioError(Exception):
    """Base class for all package errors."""


class ParseError(TopofolioError):
    """A price file cell could not be parsed."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class NonPositivePriceError(TopofolioError):
    """A parsed price is zero or negative, so its log return is undefined."""

    def __init__(self, asset, date):
        super().__init__(f"non-positive price for {asset!r} on {date}")
        self.asset = asset
        self.date = date


class InsufficientHistoryError(TopofolioError):
    """An asset (or panel) has too few observations for the requested range."""

    def __init__(self, asset=None, message=None):
        super().__init__(message or f"insufficient history for {asset!r}")
        self.asset = asset


class TooFewObservationsError(TopofolioError):
    """An operation needs more rows than the window provides."""


class ZeroVarianceError(TopofolioError):
    """An asset is constant over the window, so correlation is undefined."""

    def __init__(self, asset):
        super().__init__(f"zero sample variance for {asset!r}")
        self.asset = asset


class TooFewAssetsError(TopofolioError):
    """The universe is too small for the requested network or centrality."""

    def __init__(self, n, minimum):
        super().__init__(f"operation needs at least {minimum} assets, got {n}")
        self.n = n
        self.minimum = minimum


class NonSymmetricInputError(TopofolioError):
    """A matrix that must be symmetric is not."""


class EmptySelectionError(TopofolioError):
    """A selection rule produced no assets."""


class CountExceedsUniverseError(TopofolioError):
    """A requested portfolio size exceeds the universe size."""


class SubsetTooSmallError(TopofolioError):
    """A centrality subset has fewer than two assets."""


class MissingCentralityError(TopofolioError):
    """A selected asset has no centrality score."""

    def __init__(self, asset):
        super().__init__(f"no centrality score for {asset!r}")
        self.asset = asset


class NegativeWeightError(TopofolioError):
    """A weight mapping contains a negative entry."""


class InfeasibleCorrelationError(TopofolioError):
    """A synthetic correlation target cannot be realized (not PSD)."""


class ConfigError(TopofolioError):
    """A run configuration field is missing or invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
