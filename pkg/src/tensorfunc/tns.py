"""Plain-text tensor files (TNS3).

Dense layout::

    # comments and blank lines are ignored anywhere
    n1 n2 p
    <p blocks of n1 lines, each holding the n2 entries of one row>

Sparse (coordinate) layout, with 1-based indices::

    sparse n1 n2 p nnz
    i j k value
    ...

Real values are written with ``repr`` so that a save/load round trip is
bit-exact; complex values are written in Python's ``(a+bj)`` form.
"""

import cmath
from pathlib import Path

import numpy as np

from .errors import TensorFuncError

__all__ = ["TensorFormatError", "load_tensor", "save_tensor", "parse_tensor", "format_tensor"]


class TensorFormatError(TensorFuncError, ValueError):
    """A tensor file is malformed; ``line`` is the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _content_lines(text):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def _value(token, line):
    try:
        v = complex(token) if "j" in token else float(token)
    except ValueError:
        raise TensorFormatError(f"cannot parse {token!r} as a number", line) from None
    if not cmath.isfinite(v):
        raise TensorFormatError(f"non-finite value {token!r}", line)
    return v


def _dims(tokens, line):
    try:
        dims = [int(t) for t in tokens]
    except ValueError:
        raise TensorFormatError(f"dimensions must be integers, got {' '.join(tokens)!r}", line) from None
    if any(d < 1 for d in dims):
        raise TensorFormatError(f"dimensions must be positive, got {dims}", line)
    return dims


def _finish(values):
    dtype = np.complex128 if any(isinstance(v, complex) for v in values.flat) else np.float64
    return values.astype(dtype)


def parse_tensor(text):
    """Parse TNS3 text into an ``(n1, n2, p)`` float64 or complex128 array."""
    lines = iter(_content_lines(text))
    try:
        number, header = next(lines)
    except StopIteration:
        raise TensorFormatError("empty file: missing header") from None
    tokens = header.split()
    if tokens[0] == "sparse":
        if len(tokens) != 5:
            raise TensorFormatError("sparse header must be 'sparse n1 n2 p nnz'", number)
        n1, n2, p, nnz = _dims(tokens[1:4], number) + [int(tokens[4]) if tokens[4].isdigit() else -1]
        if nnz < 0:
            raise TensorFormatError(f"entry count must be a nonnegative integer, got {tokens[4]!r}", number)
        return _parse_sparse(lines, (n1, n2, p), nnz, number)
    if len(tokens) != 3:
        raise TensorFormatError("header must be 'n1 n2 p'", number)
    n1, n2, p = _dims(tokens, number)
    values = np.zeros((n1, n2, p), dtype=object)
    rows = 0
    for number, line in lines:
        if rows == n1 * p:
            raise TensorFormatError(f"more than the {n1 * p} expected rows", number)
        tokens = line.split()
        if len(tokens) != n2:
            raise TensorFormatError(f"expected {n2} values, found {len(tokens)}", number)
        k, i = divmod(rows, n1)
        values[i, :, k] = [_value(t, number) for t in tokens]
        rows += 1
    if rows != n1 * p:
        raise TensorFormatError(f"expected {n1 * p} rows, found {rows}", number)
    return _finish(values)


def _parse_sparse(lines, shape, nnz, header_line):
    values = np.zeros(shape, dtype=object)
    seen = set()
    count = 0
    number = header_line
    for number, line in lines:
        if count == nnz:
            raise TensorFormatError(f"more than the {nnz} declared entries", number)
        tokens = line.split()
        if len(tokens) != 4:
            raise TensorFormatError("sparse entries must be 'i j k value'", number)
        try:
            index = tuple(int(t) - 1 for t in tokens[:3])
        except ValueError:
            raise TensorFormatError("indices must be integers", number) from None
        if not all(0 <= ix < dim for ix, dim in zip(index, shape)):
            raise TensorFormatError(f"index {tuple(ix + 1 for ix in index)} outside {shape}", number)
        if index in seen:
            raise TensorFormatError(f"duplicate entry {tuple(ix + 1 for ix in index)}", number)
        seen.add(index)
        values[index] = _value(tokens[3], number)
        count += 1
    if count != nnz:
        raise TensorFormatError(f"declared {nnz} entries, found {count}", number)
    return _finish(values)


def _token(v):
    if isinstance(v, complex) or np.iscomplexobj(v):
        return repr(complex(v))
    return repr(float(v))


def format_tensor(a, sparse=False):
    """Render `a` as TNS3 text; non-finite entries are rejected."""
    a = np.asarray(a)
    if a.ndim != 3:
        raise TensorFormatError(f"expected a third-order tensor, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise TensorFormatError("cannot store non-finite values")
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    n1, n2, p = a.shape
    out = []
    if sparse:
        nz = [(i, j, k) for k in range(p) for i in range(n1) for j in range(n2) if a[i, j, k] != 0]
        out.append(f"sparse {n1} {n2} {p} {len(nz)}")
        out.extend(f"{i + 1} {j + 1} {k + 1} {_token(a[i, j, k])}" for i, j, k in nz)
    else:
        out.append(f"{n1} {n2} {p}")
        for k in range(p):
            out.extend(" ".join(_token(v) for v in a[i, :, k]) for i in range(n1))
    return "\n".join(out) + "\n"


def load_tensor(path):
    """Read a TNS3 file (dense or sparse layout)."""
    return parse_tensor(Path(path).read_text(encoding="utf-8"))


def save_tensor(path, a, sparse=False):
    """Write `a` to `path` in the dense or sparse TNS3 layout."""
    Path(path).write_text(format_tensor(a, sparse=sparse), encoding="utf-8")
