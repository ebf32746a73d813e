"""Dense small-matrix numerics: PSD roots, pseudo-inverse, expm, RK4, quadrature.

Everything operates on plain ``float64`` numpy arrays.  Paths are arrays whose
leading axis runs over the points of a :class:`TimeGrid`.  All functions are
pure; nothing here mutates its inputs.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    GridMismatch,
    IndefiniteMatrix,
    NonFiniteState,
    NotSymmetric,
    OffGridTime,
    OutOfHorizon,
)

DEFAULT_TOL = 1e-10

__all__ = [
    "DEFAULT_TOL",
    "TimeGrid",
    "psd_sqrt",
    "pinv",
    "expm",
    "rk4_integrate",
    "trapezoid",
    "cumulative_trapezoid",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform subdivision of the horizon [t0, T] into n_steps panels."""

    t0: float
    T: float
    n_steps: int
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.T > self.t0:
            raise ValueError(f"need T > t0, got [{self.t0}, {self.T}]")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        object.__setattr__(
            self, "points", np.linspace(self.t0, self.T, self.n_steps + 1)
        )

    @property
    def h(self) -> float:
        """Panel width (T - t0) / n_steps."""
        return (self.T - self.t0) / self.n_steps

    def refined(self, factor: int) -> np.ndarray:
        """Points of the grid subdivided `factor` times (same endpoints)."""
        return np.linspace(self.t0, self.T, factor * self.n_steps + 1)

    def index_of(self, t: float) -> int:
        """Grid index of time t; rejects off-grid and out-of-horizon times."""
        span = self.T - self.t0
        if t < self.t0 - 1e-12 * span or t > self.T + 1e-12 * span:
            raise OutOfHorizon(f"t={t} outside [{self.t0}, {self.T}]")
        k = int(round((t - self.t0) / self.h))
        k = min(max(k, 0), self.n_steps)
        if abs(self.points[k] - t) > 1e-12 * max(1.0, abs(span)):
            raise OffGridTime(f"t={t} is not a grid point (h={self.h})")
        return k

    def __eq__(self, other):
        return (
            isinstance(other, TimeGrid)
            and self.t0 == other.t0
            and self.T == other.T
            and self.n_steps == other.n_steps
        )

    def __hash__(self):
        return hash((self.t0, self.T, self.n_steps))


def _as_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def psd_sqrt(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Symmetric PSD square root, clamping round-off-negative eigenvalues.

    Parameters
    ----------
    M : (n, n) array_like
        Symmetric positive-semidefinite matrix (within `tol`).
    tol : float
        Relative tolerance for the symmetry check and the eigenvalue floor.

    Returns
    -------
    (n, n) ndarray
        Symmetric S with ``S @ S`` equal to M after clamping eigenvalues
        below zero to zero.

    Raises
    ------
    NotSymmetric
        If ``|M - M.T|`` exceeds the tolerance.
    IndefiniteMatrix
        If an eigenvalue is below ``-tol`` (relative to the spectral scale).
    """
    M = _as_square(M)
    scale = max(1.0, float(np.max(np.abs(M))))
    asym = float(np.max(np.abs(M - M.T)))
    if asym > tol * scale:
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds tol*scale {tol * scale:.3e}")
    w, v = np.linalg.eigh(0.5 * (M + M.T))
    floor = -tol * max(1.0, float(np.max(np.abs(w))))
    if np.min(w) < floor:
        raise IndefiniteMatrix(f"eigenvalue {np.min(w):.3e} below {floor:.3e}")
    s = np.sqrt(np.clip(w, 0.0, None))
    S = (v * s) @ v.T
    return 0.5 * (S + S.T)


def pinv(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with a relative singular-value cutoff.

    Singular values below ``tol`` times the largest singular value are
    treated as zero.  Total function: any finite matrix is accepted.
    """
    M = np.asarray(M, dtype=float)
    return np.linalg.pinv(M, rcond=tol)


def expm(M) -> np.ndarray:
    """Matrix exponential (Pade approximant with scaling and squaring)."""
    return scipy.linalg.expm(_as_square(M))


def rk4_integrate(rhs, x0, grid: TimeGrid, direction: str = "forward") -> np.ndarray:
    """Classical fixed-step RK4 over the grid.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, x) -> dx/dt`` with x an ndarray of fixed shape.
    x0 : array_like
        State at ``grid.t0`` ("forward") or at ``grid.T`` ("backward").
    grid : TimeGrid
        Integration grid; the step is ``grid.h``.
    direction : {"forward", "backward"}
        Backward integrates from T down to t0 (the returned path is still
        ordered from t0 to T, with ``path[-1] == x0``).

    Returns
    -------
    (n_steps + 1, ...) ndarray
        State at every grid point.

    Raises
    ------
    NonFiniteState
        If any intermediate state contains a non-finite entry.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    x = np.array(x0, dtype=float, copy=True)
    n = grid.n_steps
    path = np.empty((n + 1,) + x.shape)
    ts = grid.points
    h = grid.h if direction == "forward" else -grid.h
    order = range(n) if direction == "forward" else range(n, 0, -1)
    pos = 0 if direction == "forward" else n
    path[pos] = x
    for k in order:
        t = ts[k]
        k1 = rhs(t, x)
        k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = rhs(t + h, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(f"non-finite state after step at t={t}")
        pos = k + 1 if direction == "forward" else k - 1
        path[pos] = x
    return path


def _check_path(values, grid: TimeGrid) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape[0] != grid.n_steps + 1:
        raise GridMismatch(
            f"path has {values.shape[0]} samples, grid has {grid.n_steps + 1} points"
        )
    return values


def trapezoid(values, grid: TimeGrid) -> np.ndarray:
    """Composite trapezoid rule over the grid; exact for affine integrands.

    `values` holds one array (scalar, vector or matrix) per grid point.
    """
    values = _check_path(values, grid)
    return grid.h * (values.sum(axis=0) - 0.5 * (values[0] + values[-1]))


def cumulative_trapezoid(values, grid: TimeGrid) -> np.ndarray:
    """Running trapezoid integral; entry k is the integral over [t0, tau_k]."""
    values = _check_path(values, grid)
    out = np.zeros_like(values)
    increments = 0.5 * grid.h * (values[:-1] + values[1:])
    np.cumsum(increments, axis=0, out=out[1:])
    return out
