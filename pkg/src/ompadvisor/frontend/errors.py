"""Error types raised by the C front end."""


class LexError(ValueError):
    """Raised when the scanner cannot tokenize the input.

    ``kind`` is one of ``unterminated-string``, ``unterminated-comment`` or
    ``illegal-character``.
    """

    def __init__(self, kind, line, column, detail=""):
        self.kind = kind
        self.line = line
        self.column = column
        self.detail = detail
        msg = f"{kind} at {line}:{column}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ParseError(ValueError):
    """Raised when no top-level construct of a unit could be parsed."""

    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        super().__init__(f"{message} at {line}:{column}" if line else message)
