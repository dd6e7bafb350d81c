"""Stationary distributions and the fundamental/group-inverse/deviation matrices.

The default stationary solver replaces one equation of the singular system
``x (I - P) = 0`` with the normalization row and solves densely, certifying
the residual afterwards. Two independent routes are kept alongside it:

* ``method="power"``: plain power iteration, used as a cross-check oracle;
* ``method="gth"``: state-reduction (subtraction-free) elimination, which
  is componentwise accurate and strictly positive even when tail
  probabilities underflow the direct solve's absolute error. Weighted-norm
  computations with growing weights need this route.
"""

from __future__ import annotations

import numpy as np

from .chains import Distribution, StochasticMatrix
from .errors import PeriodicChain, ReducibleChain, SolverFailure
from .settings import NumericSettings

__all__ = [
    "stationary_distribution",
    "stationary_matrix",
    "fundamental_matrix",
    "group_inverse",
    "deviation_matrix",
]


def _stationary_solve(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    A = (np.eye(n) - P).T
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"stationary system is singular: {exc}") from exc
    return x


def _stationary_gth(P: np.ndarray) -> np.ndarray:
    """State-reduction elimination; uses only additions of nonnegatives."""
    A = P.copy()
    n = A.shape[0]
    scales = np.empty(n)
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        if s <= 0.0:
            raise SolverFailure(f"state-reduction stalled at state {k} (no exit mass)")
        scales[k] = s
        A[k, :k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    x = np.zeros(n)
    x[0] = 1.0
    for k in range(1, n):
        x[k] = np.dot(x[:k], A[:k, k]) / scales[k]
    return x / x.sum()


def _stationary_power(P: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    n = P.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = x @ P
        if np.abs(y - x).sum() <= tol:
            return y / y.sum()
        x = y
    raise SolverFailure(
        f"power iteration did not converge in {max_iter} steps "
        "(periodic chain or slow mixing)"
    )


def stationary_distribution(
    P: StochasticMatrix,
    method: str = "solve",
    settings: NumericSettings | None = None,
    power_tol: float = 1e-14,
    power_max_iter: int = 200_000,
) -> Distribution:
    """Solve pi P = pi, sum(pi) = 1 for an irreducible chain.

    Parameters
    ----------
    P : StochasticMatrix
        Must be irreducible.
    method : {"solve", "gth", "power"}
        "solve" is the dense normalized solve (fast, absolute-error
        accurate); "gth" is componentwise accurate and strictly positive;
        "power" iterates x P until the l1 increment drops below
        ``power_tol`` (aperiodic chains only).

    Returns
    -------
    Distribution
        Certified so that the residual max|pi P - pi| is at most the
        stationarity tolerance.
    """
    settings = settings or P.settings
    if not P.irreducible:
        raise ReducibleChain("stationary distribution requires an irreducible chain")
    if method == "solve":
        x = _stationary_solve(P.entries)
    elif method == "gth":
        x = _stationary_gth(P.entries)
    elif method == "power":
        x = _stationary_power(P.entries, power_tol, power_max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    residual = float(np.abs(x @ P.entries - x).max())
    if residual > settings.stationarity:
        raise SolverFailure(
            f"stationary residual {residual:.3e} exceeds {settings.stationarity:g}"
        )
    if x.min() < -settings.validation:
        raise SolverFailure(
            f"stationary solve produced negative mass {x.min():.3e}"
        )
    return Distribution(x, settings=settings)


def stationary_matrix(pi: Distribution) -> np.ndarray:
    """The rank-one matrix with every row equal to pi."""
    return np.tile(pi.values, (pi.n, 1))


def fundamental_matrix(
    P: StochasticMatrix,
    pi: Distribution | None = None,
    settings: NumericSettings | None = None,
) -> np.ndarray:
    """Inverse of (I - P + Pi), certified on both sides.

    Well defined for periodic chains too, since I - P + Pi is nonsingular
    for any irreducible chain.
    """
    settings = settings or P.settings
    if pi is None:
        pi = stationary_distribution(P, settings=settings)
    n = P.n
    Pi = stationary_matrix(pi)
    M = np.eye(n) - P.entries + Pi
    try:
        R = np.linalg.solve(M, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"fundamental system is singular: {exc}") from exc
    res = max(
        float(np.abs(R @ M - np.eye(n)).max()),
        float(np.abs(M @ R - np.eye(n)).max()),
        float(np.abs(pi.values @ R - pi.values).max()),
    )
    if res > settings.inverse:
        raise SolverFailure(
            f"fundamental matrix residual {res:.3e} exceeds {settings.inverse:g}"
        )
    return R


def group_inverse(
    P: StochasticMatrix,
    pi: Distribution | None = None,
    settings: NumericSettings | None = None,
) -> np.ndarray:
    """Group inverse of A = I - P, computed as (fundamental matrix) - Pi.

    The three group-inverse axioms (A X A = A, X A X = X, A X = X A) plus
    X e = 0 and pi X = 0 are certified before returning.
    """
    settings = settings or P.settings
    if pi is None:
        pi = stationary_distribution(P, settings=settings)
    R = fundamental_matrix(P, pi, settings=settings)
    Pi = stationary_matrix(pi)
    X = R - Pi
    A = np.eye(P.n) - P.entries
    AX = A @ X
    XA = X @ A
    res = max(
        float(np.abs(A @ XA - A).max()),
        float(np.abs(X @ AX - X).max()),
        float(np.abs(AX - XA).max()),
        float(np.abs(X.sum(axis=1)).max()),
        float(np.abs(pi.values @ X).max()),
    )
    if res > settings.inverse:
        raise SolverFailure(
            f"group-inverse axiom residual {res:.3e} exceeds {settings.inverse:g}"
        )
    return X


def deviation_matrix(
    P: StochasticMatrix,
    pi: Distribution | None = None,
    settings: NumericSettings | None = None,
) -> np.ndarray:
    """Sum of (P^k - Pi) over k >= 0; exists only for aperiodic chains.

    Coincides with the group inverse of I - P on a finite irreducible
    aperiodic chain, which is how it is computed here.
    """
    if not P.irreducible:
        raise ReducibleChain("deviation matrix requires an irreducible chain")
    if P.period != 1:
        raise PeriodicChain(
            f"deviation matrix requires an aperiodic chain (period {P.period})"
        )
    return group_inverse(P, pi, settings=settings)
