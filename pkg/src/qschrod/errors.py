class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class UnreachableOutcomeError(DomainError):
    """Conditioning on a measurement outcome that has (numerically) zero probability."""


class UnsupportedConfigurationError(DomainError):
    pass


class ConfigError(ValueError):
    pass
