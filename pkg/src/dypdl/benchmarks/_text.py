"""Line-oriented reader shared by the plain-text instance formats.

Blank lines and ``#`` comments are skipped; errors carry 1-based line numbers.
"""

from __future__ import annotations


class InstanceFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvalidInstance(ValueError):
    pass


class Lines:
    def __init__(self, text: str):
        self.rows = []
        for no, raw in enumerate(text.splitlines(), 1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.rows.append((no, body.split()))
        self.pos = 0
        self.last_line = len(text.splitlines())

    def at_end(self) -> bool:
        return self.pos >= len(self.rows)

    def next(self, count: int | None = None, what: str = "values") -> list[int]:
        if self.at_end():
            raise InstanceFormatError(self.last_line + 1, f"unexpected end of file, expected {what}")
        no, fields = self.rows[self.pos]
        self.pos += 1
        if count is not None and len(fields) != count:
            raise InstanceFormatError(no, f"expected {count} {what}, got {len(fields)}")
        try:
            return [int(x) for x in fields]
        except ValueError:
            raise InstanceFormatError(no, f"non-integer value in {what}") from None

    def line_no(self) -> int:
        return self.rows[self.pos][0] if not self.at_end() else self.last_line + 1

    def finish(self) -> None:
        if not self.at_end():
            raise InstanceFormatError(self.rows[self.pos][0], "trailing data")


def matrix_text(rows) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in rows)
