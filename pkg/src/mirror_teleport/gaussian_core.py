"""Small dense-matrix utilities and physicality checks for Gaussian states.

Conventions used throughout the package:

* quadratures satisfy [X, P] = i, so the vacuum variance is 1/2;
* two-mode correlation matrices are real symmetric 4x4 over the ordered
  quadrature vector (X_stokes, P_stokes, X_mirror, P_mirror);
* the three-mode propagator acts on the operator vector
  (stokes, mirror^dag, anti_stokes^dag), whose commutator metric is
  diag(+1, -1, -1).

All matrices here are tiny (at most 4x4), so everything is solved densely.
Complex arithmetic appears only inside the physicality check and stays
confined to this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: Vacuum variance of a single quadrature; the single source of truth for
#: the variance normalization used by every module.
VACUUM_VARIANCE = 0.5

#: Symplectic form for two modes in (X1, P1, X2, P2) ordering.
SYMPLECTIC_FORM_4 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)

#: Commutator metric of the mixed annihilation/creation operator vector
#: (stokes, mirror^dag, anti_stokes^dag).
MODE_METRIC_3 = np.diag([1.0, -1.0, -1.0])


def _as_square(matrix, n: int, name: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.shape != (n, n):
        raise DomainError(f"{name} must be {n}x{n}, got shape {m.shape}")
    return m


def _require_symmetric(m: np.ndarray, name: str) -> None:
    if not np.array_equal(m, m.T):
        raise DomainError(f"{name} must be symmetric; build it from its upper triangle")


@dataclass(frozen=True)
class CovMatrix2:
    """2x2 covariance matrix of one mode, dimensionless quadrature units."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix, 2, "CovMatrix2")
        _require_symmetric(m, "CovMatrix2")
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < -1e-12 * max(1.0, np.abs(m).max()):
            raise DomainError(f"CovMatrix2 not positive semidefinite: eigenvalues {eigs}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def vacuum(cls) -> "CovMatrix2":
        return cls(VACUUM_VARIANCE * np.eye(2))

    @classmethod
    def from_variances(cls, xx: float, xp: float, pp: float) -> "CovMatrix2":
        return cls(np.array([[xx, xp], [xp, pp]]))


@dataclass(frozen=True)
class CorrelationMatrix4:
    """4x4 symmetric quadrature correlation matrix of the shared two-mode state."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix, 4, "CorrelationMatrix4")
        _require_symmetric(m, "CorrelationMatrix4")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class PropagatorMatrix:
    """3x3 real matrix evolving (stokes, mirror^dag, anti_stokes^dag)."""

    matrix: np.ndarray
    time: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_square(self.matrix, 3, "PropagatorMatrix"))

    @classmethod
    def identity(cls) -> "PropagatorMatrix":
        return cls(np.eye(3), 0.0)


def physicality_defect(corr: CorrelationMatrix4) -> float:
    """Uncertainty-principle violation of a two-mode correlation matrix.

    A correlation matrix G describes a physical state iff G + (i/2)J is
    positive semidefinite, J being the two-mode symplectic form.  Returns
    max(0, -lambda_min) of that Hermitian matrix; zero means physical.
    """
    h = corr.matrix + 0.5j * SYMPLECTIC_FORM_4
    lam_min = np.linalg.eigvalsh(h)[0]
    return max(0.0, -float(lam_min))


def symplectic_defect(prop: PropagatorMatrix) -> float:
    """Commutator-preservation defect of a propagator, scale-relative.

    A valid propagator M satisfies M eta M^T = eta with eta = diag(+1,-1,-1).
    The max-abs entry of the residual is normalized by max(1, |M|_max)^2:
    the residual is quadratic in M, so for entries of size m the float64
    noise floor is ~m^2 * eps and only the scaled defect is meaningful.
    For O(1) matrices the scaling is a no-op.
    """
    m = prop.matrix
    raw = np.abs(m @ MODE_METRIC_3 @ m.T - MODE_METRIC_3).max()
    scale = max(1.0, float(np.abs(m).max())) ** 2
    return float(raw) / scale
