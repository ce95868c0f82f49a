"""Exception hierarchy.

``DataError`` covers bad inputs (CLI exit code 2); ``InvariantError`` signals
internal corruption such as a count underflow in the sampler (exit code 3).
"""


class TopicMapError(Exception):
    pass


class DataError(TopicMapError, ValueError):
    pass


class InvariantError(TopicMapError, RuntimeError):
    pass


class PipelineError(TopicMapError):
    """A pipeline stage failed; ``stage`` names it and ``cause`` holds the error."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
