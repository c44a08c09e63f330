"""Matrix Market input/output for dense real matrices."""

from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import ParseError
from .matrix_core import as_matrix

__all__ = ["read_matrix", "write_matrix"]

SUPPORTED_FIELDS = ("real", "integer")


def read_matrix(path):
    """Read an ``array`` or ``coordinate`` Matrix Market file as a dense float64 array.

    Only ``real`` and ``integer`` fields are accepted; ``pattern`` and
    ``complex`` files raise :class:`ParseError`.  Coordinate files are
    densified (symmetric storage is expanded).
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path}: no such file")
    try:
        rows, cols, entries, fmt, fld, symmetry = scipy.io.mminfo(path)
    except (ValueError, IndexError, OSError) as exc:
        raise ParseError(f"{path}: not a Matrix Market file ({exc})") from None
    if fld not in SUPPORTED_FIELDS:
        raise ParseError(f"{path}: field {fld!r} not supported; use real or integer")
    try:
        data = scipy.io.mmread(path)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    if scipy.sparse.issparse(data):
        data = data.toarray()
    try:
        return as_matrix(np.asarray(data, dtype=np.float64))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_matrix(path, A, comment=""):
    """Write `A` in Matrix Market ``array real general`` format."""
    A = as_matrix(A)
    scipy.io.mmwrite(str(path), A, comment=comment, field="real", symmetry="general")
