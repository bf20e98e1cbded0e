"""
Plain-text matrix fixtures.

Format: a header line ``rows cols`` followed by one whitespace separated row
per line. Entries are written with 17 significant digits so every float64
round-trips exactly.
"""

import io
from pathlib import Path
from typing import IO, Any, Union

import numpy as np

from ecoattn.exceptions import DimensionError, DomainError
from ecoattn.tensor.core import as_matrix

PathOrStream = Union[str, Path, IO[str]]
ENTRY_FORMAT = "%.17g"


def format_matrix(m: Any) -> str:
    """Render ``m`` in fixture format."""
    m = as_matrix(m)
    buffer = io.StringIO()
    buffer.write(f"{m.shape[0]} {m.shape[1]}\n")
    if m.size:
        np.savetxt(buffer, m, fmt=ENTRY_FORMAT, delimiter=" ")
    return buffer.getvalue()


def write_matrix(m: Any, target: PathOrStream) -> None:
    text = format_matrix(m)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text)
    else:
        target.write(text)


def read_matrix(source: PathOrStream) -> np.ndarray:
    """Parse a fixture and check it against its header."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()

    lines = text.splitlines()
    if not lines:
        raise DomainError("Empty matrix fixture")
    try:
        rows, cols = (int(token) for token in lines[0].split())
    except ValueError as e:
        raise DomainError(f"Bad fixture header {lines[0]!r}") from e

    body = [line for line in lines[1:] if line.strip()]
    if rows * cols == 0:
        return np.zeros((rows, cols))

    data = np.loadtxt(io.StringIO("\n".join(body)), dtype=np.float64, ndmin=2)
    if data.shape != (rows, cols):
        raise DimensionError("Fixture body does not match header", data.shape, (rows, cols))
    return as_matrix(data)
