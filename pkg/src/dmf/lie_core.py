"""Small dense matrix algebra and adjoint representations from structure constants.

Structure constants follow ``[v_i, v_j] = sum_k c[i, j, k] v_k`` with zero-based
indices.  The generator matrix of basis element ``r`` stores ``c[i, r, k]`` at
row ``k``, column ``i``; with that layout the ordered product of exponentials
reproduces the adjoint matrices obtained by a change of variables.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularMatrixError

DET_THRESHOLD = 1e-14
STRUCTURE_TOL = 1e-12

# Taylor order after scaling to norm <= 1/2: the remainder is below 1e-22.
_TAYLOR_ORDER = 18
_SCALED_NORM = 0.5


def as_matrix(m):
    """Return a float64 copy of ``m`` after checking it is square and finite."""
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def mat_exp(m):
    """Matrix exponential by scaling and squaring a fixed-order Taylor series.

    Parameters
    ----------
    m : array_like
        Finite square matrix.

    Returns
    -------
    numpy.ndarray
        ``exp(m)``; exactly the identity when ``m`` is zero.
    """
    a = as_matrix(m)
    dim = a.shape[0]
    eye = np.eye(dim)
    norm = float(np.abs(a).sum(axis=1).max())
    if norm == 0.0:
        return eye
    squarings = 0
    if norm > _SCALED_NORM:
        squarings = int(math.ceil(math.log2(norm / _SCALED_NORM)))
        a = a / (2.0 ** squarings)
    result = eye.copy()
    term = eye
    for k in range(1, _TAYLOR_ORDER + 1):
        term = term @ a / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def mat_inverse(m):
    """Inverse of a square matrix, refusing when ``|det| <= 1e-14``."""
    a = as_matrix(m)
    det = float(np.linalg.det(a))
    if not abs(det) > DET_THRESHOLD:
        raise SingularMatrixError(det)
    return np.linalg.inv(a)


@dataclass(frozen=True)
class StructureConstants:
    """Structure constants ``c[i, j, k]`` of an R-dimensional Lie algebra."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.float64)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] == 0:
            raise InvalidInputError(f"structure constants must be R x R x R, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("structure constants have non-finite entries")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def dim(self):
        return self.c.shape[0]

    @classmethod
    def from_brackets(cls, dim, brackets):
        """Build from ``{(i, j): {k: value}}`` listing ``[v_i, v_j]`` for i < j.

        The antisymmetric partner ``[v_j, v_i]`` is filled in automatically.
        """
        c = np.zeros((dim, dim, dim))
        for (i, j), coeffs in brackets.items():
            for k, value in coeffs.items():
                for idx in (i, j, k):
                    if not 0 <= idx < dim:
                        raise InvalidInputError(f"basis index {idx} outside [0, {dim})")
                c[i, j, k] = value
                c[j, i, k] = -value
        return cls(c)

    def generator(self, r):
        """Matrix ``C_r`` with entry ``c[i, r, k]`` at row ``k``, column ``i``."""
        _check_index(r, self.dim)
        return np.ascontiguousarray(self.c[:, r, :].T)


def _check_index(r, dim):
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)):
        raise InvalidInputError(f"basis index must be an integer, got {r!r}")
    if not 0 <= r < dim:
        raise InvalidInputError(f"basis index {r} outside [0, {dim})")


def adjoint_from_structure(sc, factors):
    """Adjoint matrix of a group element in canonical coordinates of the second kind.

    ``factors`` is an ordered list of ``(r, a)`` pairs; the result is the product
    ``exp(a_1 C_{r_1}) exp(a_2 C_{r_2}) ...`` taken in list order.
    """
    result = np.eye(sc.dim)
    for r, a in factors:
        _check_index(r, sc.dim)
        a = float(a)
        if not math.isfinite(a):
            raise InvalidInputError("group coordinate is not finite")
        result = result @ mat_exp(a * sc.generator(r))
    return result


def validate_structure(sc, tol=STRUCTURE_TOL):
    """True when ``sc`` is antisymmetric and satisfies the Jacobi identity."""
    c = np.asarray(sc.c if isinstance(sc, StructureConstants) else sc, dtype=np.float64)
    if c.ndim != 3 or not np.all(np.isfinite(c)):
        return False
    if np.max(np.abs(c + c.transpose(1, 0, 2))) > tol:
        return False
    cyc = (
        np.einsum("ijm,mkl->ijkl", c, c)
        + np.einsum("jkm,mil->ijkl", c, c)
        + np.einsum("kim,mjl->ijkl", c, c)
    )
    return bool(np.max(np.abs(cyc)) <= tol)


def rotation(theta):
    """2 x 2 rotation matrix ``[[cos, -sin], [sin, cos]]``."""
    ct, st = math.cos(theta), math.sin(theta)
    return np.array([[ct, -st], [st, ct]])
