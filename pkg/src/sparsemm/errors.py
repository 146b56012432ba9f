class SparseMMError(Exception):
    """Base class for all errors raised by sparsemm."""


class OutOfBounds(SparseMMError, IndexError):
    pass


class DuplicateEntry(SparseMMError, ValueError):
    pass


class DegenerateRow(SparseMMError, ValueError):
    pass


class ShapeMismatch(SparseMMError, ValueError):
    pass


class InvalidConfig(SparseMMError, ValueError):
    pass


class InvalidMatrix(SparseMMError, ValueError):
    pass
