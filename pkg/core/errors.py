"""Error taxonomy. Each exception class carries exactly one machine-readable code."""


class AttributePrivacyError(ValueError):
    """Base class for every configuration or computation error raised by the library."""

    code: str = "attribute_privacy_error"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}


class ConfigurationError(AttributePrivacyError):
    code = "invalid_configuration"


class DatasetError(AttributePrivacyError):
    code = "invalid_dataset"


class DistributionError(AttributePrivacyError):
    code = "invalid_distribution"


class UnboundedSensitivityError(AttributePrivacyError):
    code = "unbounded_sensitivity"


class DegenerateCovarianceError(AttributePrivacyError):
    code = "degenerate_covariance"


class UnsupportedMechanismError(AttributePrivacyError):
    code = "unsupported_mechanism"


class VacuousSecretError(AttributePrivacyError):
    code = "vacuous_secret"


# Raised by the CLI layer only; listed here so the taxonomy lives in one place.
IO_ERROR_CODE = "io_error"

ERROR_CODES = [
    ConfigurationError.code,
    DatasetError.code,
    DistributionError.code,
    UnboundedSensitivityError.code,
    DegenerateCovarianceError.code,
    UnsupportedMechanismError.code,
    VacuousSecretError.code,
    IO_ERROR_CODE,
]
