"""Numeric tolerances used across validation, solvers, and certificates.

All tolerances live in one record so a caller can tighten or relax the
whole stack consistently. The defaults certify: structural validation at
1e-12, stationarity residuals at 1e-10, inverse residuals at 1e-9.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericSettings:
    validation: float = 1e-12      # row sums, normalization, conservativity
    stationarity: float = 1e-10    # max-norm residual of pi P = pi / pi Q = 0
    inverse: float = 1e-9          # residuals of fundamental/group inverses
    drift: float = 1e-10           # entrywise slack allowed in drift checks
    identity: float = 1e-8         # residuals of the exact perturbation identities
    hypothesis_margin: float = 1e-12  # margin for strict-inequality hypotheses


DEFAULT = NumericSettings()
