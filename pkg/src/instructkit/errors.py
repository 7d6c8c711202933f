"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for toolkit failures (CLI maps these to exit 1)."""


class ConfigError(ToolkitError):
    """Bad configuration or missing inputs (CLI maps these to exit 2)."""


class RenderError(ToolkitError):
    pass


class ReversalError(ToolkitError):
    pass


class EvalError(ToolkitError):
    pass
