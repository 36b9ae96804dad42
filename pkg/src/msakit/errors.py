"""Exception types shared across the package."""


class ModelError(Exception):
    """Semantic problem with a model: bad references, ill-posed structure,
    unresolvable stiffness queries."""


class FormatError(ModelError):
    """Malformed model document; `path` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message
