class DomainError(ValueError):
    """A value falls outside the domain an operation accepts."""


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PcapFormatError(ValueError):
    pass


class TruncatedPcapError(PcapFormatError):
    """The capture ends inside a record header or its payload.

    ``record_index`` is 1-based, counting records from the start of the file.
    """

    def __init__(self, message, record_index):
        self.record_index = record_index
        super().__init__(f"record {record_index}: {message}")
