"""Minimal S-expression reader/writer for the theory and proof formats."""

from __future__ import annotations


class SexpError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


Sexp = "str | int | list"


def loads(text: str) -> list:
    """Read every toplevel S-expression in `text`."""
    items, pos = _read_many(text, 0, 1, 1)
    return items


def loads_one(text: str) -> object:
    items = loads(text)
    if len(items) != 1:
        raise SexpError(f"expected one expression, found {len(items)}", 1, 1)
    return items[0]


def _read_many(text: str, i: int, line: int, col: int) -> tuple[list, int]:
    items: list = []
    n = len(text)
    while True:
        i, line, col = _skip_ws(text, i, line, col)
        if i >= n or text[i] == ")":
            return items, i
        item, i, line, col = _read(text, i, line, col)
        items.append(item)


def _skip_ws(text: str, i: int, line: int, col: int) -> tuple[int, int, int]:
    n = len(text)
    while i < n:
        c = text[i]
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "\n":
            i += 1
            line += 1
            col = 1
        elif c in " \t\r":
            i += 1
            col += 1
        else:
            break
    return i, line, col


def _read(text: str, i: int, line: int, col: int) -> tuple[object, int, int, int]:
    n = len(text)
    c = text[i]
    if c == "(":
        start_line, start_col = line, col
        i += 1
        col += 1
        items: list = []
        while True:
            i, line, col = _skip_ws(text, i, line, col)
            if i >= n:
                raise SexpError("unterminated list", start_line, start_col)
            if text[i] == ")":
                return items, i + 1, line, col + 1
            item, i, line, col = _read(text, i, line, col)
            items.append(item)
    if c == ")":
        raise SexpError("unexpected ')'", line, col)
    j = i
    while j < n and text[j] not in " \t\r\n();":
        j += 1
    atom = text[i:j]
    col += j - i
    if atom.lstrip("-").isdigit():
        return int(atom), j, line, col
    return atom, j, line, col


def dumps(x: object) -> str:
    if isinstance(x, list):
        return "(" + " ".join(dumps(e) for e in x) + ")"
    return str(x)


def dumps_pretty(x: object, indent: int = 0) -> str:
    """Readable multi-line form: toplevel list items on their own lines."""
    if not isinstance(x, list):
        return str(x)
    flat = dumps(x)
    if len(flat) <= 76 - indent:
        return flat
    pad = " " * (indent + 2)
    head = dumps(x[0]) if x else ""
    lines = [dumps_pretty(e, indent + 2) for e in x[1:]]
    return "(" + head + "\n" + "\n".join(pad + s for s in lines) + ")"
