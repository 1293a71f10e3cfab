"""Plain-text file formats for codes and packings.

Code file::

    n=6
    # comment
    110000
    001100

Packing file::

    v=7 k=3
    1 2 3
    1 4 5

Lines starting with ``#`` and blank lines are ignored in both formats.
"""
from __future__ import annotations

import re
from typing import Iterable

from .core import Code, CodeError, Codeword, Packing


class ParseError(CodeError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _content_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


_CODE_HEADER = re.compile(r"n=(\d+)")
_PACKING_HEADER = re.compile(r"v=(\d+) k=(\d+)")
_BLOCK_LINE = re.compile(r"\d+( \d+)*")


def parse_code(text: str) -> Code:
    lines = iter(_content_lines(text))
    first = next(lines, None)
    if first is None:
        raise ParseError(1, "missing header 'n=<int>'")
    lineno, header = first
    m = _CODE_HEADER.fullmatch(header.strip())
    if not m:
        raise ParseError(lineno, f"expected header 'n=<int>', got {header!r}")
    n = int(m.group(1))
    words = []
    seen: dict[int, int] = {}
    for lineno, line in lines:
        s = line.strip()
        if len(s) != n or set(s) - {"0", "1"}:
            raise ParseError(lineno, f"expected {n} characters of 0/1, got {s!r}")
        w = Codeword.from_str(s)
        if w.bits in seen:
            raise ParseError(lineno, f"duplicate word {s} (first on line {seen[w.bits]})")
        seen[w.bits] = lineno
        words.append(w)
    try:
        return Code(n, words)
    except CodeError as exc:
        raise ParseError(lineno, str(exc)) from exc


def format_code(c: Code, comments: Iterable[str] = ()) -> str:
    out = [f"n={c.n}"]
    out += [f"# {line}" for line in comments]
    out += [str(w) for w in c.words]
    return "\n".join(out) + "\n"


def parse_packing(text: str) -> Packing:
    lines = iter(_content_lines(text))
    first = next(lines, None)
    if first is None:
        raise ParseError(1, "missing header 'v=<int> k=<int>'")
    lineno, header = first
    m = _PACKING_HEADER.fullmatch(header.strip())
    if not m:
        raise ParseError(lineno, f"expected header 'v=<int> k=<int>', got {header!r}")
    v, k = int(m.group(1)), int(m.group(2))
    blocks = []
    seen: dict[tuple[int, ...], int] = {}
    for lineno, line in lines:
        s = line.strip()
        if not _BLOCK_LINE.fullmatch(s):
            raise ParseError(lineno, f"expected integers separated by single spaces, got {s!r}")
        block = tuple(int(x) for x in s.split(" "))
        if len(block) != k:
            raise ParseError(lineno, f"block has {len(block)} points, expected {k}")
        if any(a >= b for a, b in zip(block, block[1:])):
            raise ParseError(lineno, f"points not strictly increasing: {s}")
        if block[0] < 1 or block[-1] > v:
            raise ParseError(lineno, f"points outside 1..{v}: {s}")
        if block in seen:
            raise ParseError(lineno, f"duplicate block (first on line {seen[block]})")
        seen[block] = lineno
        blocks.append(block)
    try:
        return Packing(v, k, blocks)
    except CodeError as exc:
        raise ParseError(lineno, str(exc)) from exc


def format_packing(p: Packing, comments: Iterable[str] = ()) -> str:
    out = [f"v={p.v} k={p.k}"]
    out += [f"# {line}" for line in comments]
    out += [" ".join(map(str, b)) for b in p.blocks]
    return "\n".join(out) + "\n"


def block_line_numbers(text: str) -> dict[tuple[int, ...], int]:
    """Map each block of a packing file to the line it was read from."""
    found = {}
    for lineno, line in list(_content_lines(text))[1:]:
        found[tuple(sorted(int(x) for x in line.split()))] = lineno
    return found
