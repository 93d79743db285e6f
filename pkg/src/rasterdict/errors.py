"""Shared exception types."""


class RasterDictError(Exception):
    """Base class for all package errors; carries a machine-readable code."""

    code = "ERROR"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__doc__)
        self.details = details


class ParseError(RasterDictError):
    """A data file line could not be parsed."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}", line=line)
        self.line = line


class PageOutOfRange(RasterDictError):
    """A page number falls outside 1..page_count."""

    code = "PAGE_OUT_OF_RANGE"


class UnknownTarget(RasterDictError):
    """The referenced (dictionary, page, word) is not indexed or marked."""

    code = "UNKNOWN_TARGET"
