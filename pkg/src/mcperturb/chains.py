"""Core chain types: transition matrices, generators, distributions, weights.

All types validate their structural invariants at construction and freeze
their numpy storage, so instances are immutable and safe to share across
threads. Irreducibility and (for discrete chains) the period are computed
once and cached on the instance.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ValidationError
from .settings import DEFAULT, NumericSettings

__all__ = [
    "StochasticMatrix",
    "IntensityMatrix",
    "Distribution",
    "WeightFunction",
    "PerturbationPair",
]


def _as_square_matrix(entries, name: str) -> np.ndarray:
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValidationError(f"{name} must have at least one state")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def _is_strongly_connected(support: np.ndarray) -> bool:
    graph = csr_matrix(support.astype(np.int8))
    n_comp, _ = connected_components(graph, directed=True, connection="strong")
    return n_comp == 1


def _period_by_bfs(support: np.ndarray) -> int:
    """Gcd of cycle-length differences seen from state 0 on a BFS tree.

    Exact for strongly connected graphs: the gcd of level[u] + 1 - level[v]
    over all edges (u, v), with levels from a BFS rooted at state 0, equals
    the gcd of all cycle lengths through state 0.
    """
    n = support.shape[0]
    level = np.full(n, -1, dtype=int)
    level[0] = 0
    queue = [0]
    g = 0
    neighbors = [np.nonzero(support[i])[0] for i in range(n)]
    while queue:
        nxt = []
        for u in queue:
            for v in neighbors[u]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
                else:
                    g = math.gcd(g, level[u] + 1 - level[v])
        queue = nxt
    # a second sweep catches edges whose head was unvisited on first sight
    for u in range(n):
        if level[u] < 0:
            continue
        for v in neighbors[u]:
            if level[v] >= 0:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g != 0 else 0


class StochasticMatrix:
    """Row-stochastic transition matrix of a discrete-time chain.

    Parameters
    ----------
    entries : array_like, shape (n, n)
        Transition probabilities. Every entry must be nonnegative and every
        row must sum to 1 within ``settings.validation``.
    settings : NumericSettings, optional
        Tolerance record used for validation.

    Attributes
    ----------
    entries : ndarray
        The validated matrix (read-only).
    n : int
        Number of states.
    irreducible : bool
        Whether the transition graph is strongly connected.
    period : int
        Gcd of cycle lengths through state 0 (1 for aperiodic chains).
    """

    def __init__(self, entries, settings: NumericSettings = DEFAULT):
        P = _as_square_matrix(entries, "transition matrix")
        if np.any(P < 0):
            i, j = np.argwhere(P < 0)[0]
            raise ValidationError(
                f"transition matrix has negative entry {P[i, j]:.3e} at ({i}, {j})"
            )
        row_sums = P.sum(axis=1)
        bad = np.abs(row_sums - 1.0) > settings.validation
        if np.any(bad):
            i = int(np.argmax(np.abs(row_sums - 1.0)))
            raise ValidationError(
                f"row {i} sums to {row_sums[i]:.15f}, not 1 within {settings.validation:g}"
            )
        P.setflags(write=False)
        self.entries = P
        self.n = P.shape[0]
        self.settings = settings
        self.irreducible = _is_strongly_connected(P > 0.0)
        self._period: int | None = None

    @property
    def period(self) -> int:
        """Gcd of cycle lengths through state 0; computed once, on demand."""
        if self._period is None:
            p = _period_by_bfs(self.entries > 0.0) if self.n > 1 else 1
            self._period = p if p != 0 else 1
        return self._period

    @property
    def aperiodic(self) -> bool:
        return self.period == 1

    def power(self, m: int) -> np.ndarray:
        return np.linalg.matrix_power(self.entries, m)

    def __repr__(self):
        return (
            f"StochasticMatrix(n={self.n}, irreducible={self.irreducible}, "
            f"period={self.period})"
        )


class IntensityMatrix:
    """Conservative generator of a continuous-time chain.

    Off-diagonal entries must be nonnegative and every row must sum to 0
    within ``settings.validation``. The uniformization constant
    ``max_i(-Q_ii)`` must be finite and strictly positive.
    """

    def __init__(self, entries, settings: NumericSettings = DEFAULT):
        Q = _as_square_matrix(entries, "intensity matrix")
        off = Q.copy()
        np.fill_diagonal(off, 0.0)
        if np.any(off < 0):
            i, j = np.argwhere(off < 0)[0]
            raise ValidationError(
                f"intensity matrix has negative off-diagonal {Q[i, j]:.3e} at ({i}, {j})"
            )
        row_sums = Q.sum(axis=1)
        scale = max(1.0, float(np.abs(np.diag(Q)).max()))
        if np.any(np.abs(row_sums) > settings.validation * scale):
            i = int(np.argmax(np.abs(row_sums)))
            raise ValidationError(
                f"row {i} sums to {row_sums[i]:.3e}, not conservative within "
                f"{settings.validation:g} (relative to rate scale {scale:g})"
            )
        rates = -np.diag(Q)
        if np.any(rates < -settings.validation):
            i = int(np.argmin(rates))
            raise ValidationError(f"diagonal entry at state {i} is positive")
        uc = float(rates.max())
        if not np.isfinite(uc) or uc <= 0.0:
            raise ValidationError("uniformization constant must be finite and positive")
        Q.setflags(write=False)
        self.entries = Q
        self.n = Q.shape[0]
        self.settings = settings
        self.uniformization_constant = uc
        self.irreducible = _is_strongly_connected(off > 0.0)

    def __repr__(self):
        return (
            f"IntensityMatrix(n={self.n}, irreducible={self.irreducible}, "
            f"uniformization_constant={self.uniformization_constant:g})"
        )


class Distribution:
    """Probability row vector: nonnegative, summing to 1 within tolerance.

    Entries in ``[-validation_tol, 0)`` (solver round-off on underflowed
    components) are clamped to zero before normalization; anything more
    negative is rejected.
    """

    def __init__(self, values, settings: NumericSettings = DEFAULT):
        v = np.array(values, dtype=float).ravel()
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValidationError("distribution must be a finite, nonempty vector")
        neg = v < 0
        if np.any(v < -settings.validation):
            i = int(np.argmin(v))
            raise ValidationError(f"distribution entry {v[i]:.3e} at {i} is negative")
        if np.any(neg):
            v = np.where(neg, 0.0, v)
        total = v.sum()
        if abs(total - 1.0) > settings.validation:
            raise ValidationError(f"distribution sums to {total:.15f}, not 1")
        v = v / total
        v.setflags(write=False)
        self.values = v
        self.n = v.size

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.values > 0.0))

    def __repr__(self):
        return f"Distribution(n={self.n})"


class WeightFunction:
    """Per-state positive weights carrying the weighted norms.

    ``lower_bound`` is min_i V(i) and must be strictly positive.
    """

    def __init__(self, values):
        v = np.array(values, dtype=float).ravel()
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValidationError("weight function must be a finite, nonempty vector")
        lb = float(v.min())
        if lb <= 0.0:
            i = int(np.argmin(v))
            raise ValidationError(f"weight {v[i]:.3e} at state {i} is not positive")
        v.setflags(write=False)
        self.values = v
        self.n = v.size
        self.lower_bound = lb

    def __repr__(self):
        return f"WeightFunction(n={self.n}, lower_bound={self.lower_bound:g})"


def as_weight_array(weights) -> np.ndarray:
    """Coerce a WeightFunction or array-like to a plain positive vector."""
    if isinstance(weights, WeightFunction):
        return weights.values
    v = np.asarray(weights, dtype=float).ravel()
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValidationError("weights must be strictly positive and finite")
    return v


class PerturbationPair:
    """A base chain and a perturbed chain of the same kind and size.

    ``delta`` is the entrywise difference (perturbed - base); its rows sum
    to zero automatically because both members are row-stochastic (or both
    conservative).
    """

    def __init__(self, base, perturbed):
        if type(base) is not type(perturbed):
            raise ValidationError(
                f"pair members must be the same kind, got {type(base).__name__} "
                f"and {type(perturbed).__name__}"
            )
        if not isinstance(base, (StochasticMatrix, IntensityMatrix)):
            raise ValidationError("pair members must be StochasticMatrix or IntensityMatrix")
        if base.n != perturbed.n:
            raise ValidationError(f"pair sizes differ: {base.n} vs {perturbed.n}")
        self.base = base
        self.perturbed = perturbed
        delta = perturbed.entries - base.entries
        delta.setflags(write=False)
        self.delta = delta

    @property
    def kind(self) -> str:
        return "dtmc" if isinstance(self.base, StochasticMatrix) else "ctmc"

    def __repr__(self):
        return f"PerturbationPair(kind={self.kind}, n={self.base.n})"
