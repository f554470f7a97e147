"""Exception hierarchy shared by every module.

Each error carries an ``exit_code`` used by the command-line front end.
"""


class QdlError(Exception):
    exit_code = 2


class MalformedInputError(QdlError):
    exit_code = 2


class ShapeError(QdlError):
    exit_code = 2


class SizeError(QdlError):
    exit_code = 2


class EncodingError(QdlError):
    exit_code = 2

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class CircuitConstructionError(QdlError):
    exit_code = 2


class ParameterError(QdlError):
    exit_code = 3


class SingularityError(QdlError):
    exit_code = 3

    def __init__(self, message, abs_det=0.0):
        super().__init__(message)
        self.abs_det = abs_det


class PostselectionError(QdlError):
    exit_code = 3


class ResourceCapError(QdlError):
    exit_code = 4
