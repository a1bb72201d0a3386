"""Exception taxonomy shared by all modules."""


class ScalarProtocolError(Exception):
    """Base class for every error raised by this package."""


class InputShapeError(ScalarProtocolError):
    """Vectors passed to an operation do not have matching lengths."""


class InstanceShapeError(ScalarProtocolError):
    """A protocol instance or generator call has an invalid size parameter."""


class TtpAssignmentError(ScalarProtocolError):
    """No valid trusted-third-party assignment exists (or one was violated)."""


class ProtocolStateError(ScalarProtocolError):
    """A message arrived out of order or a run finished incomplete."""


class RoutingError(ScalarProtocolError):
    """A message was addressed to a party the network does not know."""


class ConfigError(ScalarProtocolError):
    """A run configuration could not be parsed or validated."""
