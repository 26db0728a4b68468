"""Small dense linear algebra: SVD, Moore-Penrose inverse, null-space projector.

Matrices here are tiny (a 2xN arm Jacobian at most), so everything is plain
numpy on 2-D float arrays.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

DEFAULT_SIGMA_CUTOFF = 1e-12


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``a = u @ diag(singular_values) @ vt``.

    ``u`` is m x r, ``vt`` is r x n with r = min(m, n); singular values are
    sorted descending so rank truncation is a prefix slice.
    """

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray
    rank_tolerance: float

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.singular_values > self.rank_tolerance))


def as_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidInput(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    return m


def svd(a, sigma_cutoff: float = DEFAULT_SIGMA_CUTOFF) -> SvdResult:
    m = as_matrix(a)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    smax = s[0] if s.size else 0.0
    return SvdResult(u=u, singular_values=s, vt=vt, rank_tolerance=sigma_cutoff * smax)


def pinv(a, sigma_cutoff: float = DEFAULT_SIGMA_CUTOFF) -> np.ndarray:
    """Moore-Penrose inverse with relative singular-value truncation.

    Singular values ``<= sigma_cutoff * sigma_max`` are treated as zero. No
    damping is applied: the plain inverse is what the IK baseline uses.
    """
    if sigma_cutoff < 0:
        raise InvalidInput("sigma_cutoff must be non-negative")
    res = svd(a, sigma_cutoff)
    s = res.singular_values
    keep = s > res.rank_tolerance
    if not np.any(keep):
        return np.zeros((res.vt.shape[1], res.u.shape[0]))
    # descending order: the kept values form a prefix
    k = int(np.count_nonzero(keep))
    return (res.vt[:k].T / s[:k]) @ res.u[:, :k].T


def nullspace_projector(j, g) -> np.ndarray:
    """P = I - G J, the projector onto joint motions that leave J dtheta = 0."""
    jm = as_matrix(j)
    gm = as_matrix(g)
    if gm.shape != (jm.shape[1], jm.shape[0]):
        raise InvalidInput(
            f"g has shape {gm.shape}, expected {(jm.shape[1], jm.shape[0])} for j {jm.shape}"
        )
    return np.eye(jm.shape[1]) - gm @ jm
