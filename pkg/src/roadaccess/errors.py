"""Pipeline error hierarchy, mapped onto CLI exit codes."""


class PipelineError(Exception):
    """Base class for failures the CLI turns into nonzero exits."""

    exit_code = 1
    kind = "error"


class ConfigurationError(PipelineError):
    """Bad parameters, missing input paths, or an unusable input set."""

    exit_code = 2
    kind = "configuration-error"


class DataError(PipelineError):
    """Input files that cannot be parsed into the domain model."""

    exit_code = 3
    kind = "data-error"


class EvaluationError(PipelineError):
    """Evaluation requested but no usable reference cells exist."""

    exit_code = 4
    kind = "evaluation-error"
