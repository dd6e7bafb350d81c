"""Perturbation bounds for continuous-time chains via step-h skeletons.

A bounded conservative generator Q is analyzed through its first-order
skeleton P_h = I + h Q, which is stochastic, irreducible, and aperiodic for
any step h below the reciprocal of the uniformization constant, and shares
Q's stationary distribution. All discrete-time machinery transfers:

* the continuous-time deviation matrix D (the integral of P^t - Pi) equals
  h times the skeleton's deviation matrix, independent of the admissible h;
* Lambda1(P_h) = 1 - h Lambda1(Q), with the generator's ergodicity
  coefficient defined as half the minimal pairwise row defect;
* a drift inequality Q V <= -lambda V + b at the taboo state becomes
  P_h V <= (1 - lambda h) V + b h there.

The bound catalog mirrors the discrete one: deviation-norm, ergodicity
coefficient, column-minima small set, unit drift, and the two
weighted-norm drift bounds (whose continuous forms lose the (1 - lambda)
factors of the discrete versions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .chains import (
    Distribution,
    IntensityMatrix,
    StochasticMatrix,
    WeightFunction,
    as_weight_array,
)
from .errors import (
    DivergentHittingTimes,
    DriftViolated,
    HypothesisFailed,
    InvalidParameters,
    InvalidStep,
    NoPositiveLambda,
    NotErgodic,
    OutOfRadius,
    ReducibleChain,
    SolverFailure,
    UnboundedGenerator,
)
from .norms import matrix_norm, v_norm_matrix, v_norm_measure
from .reports import BoundReport, Hypothesis
from .settings import DEFAULT, NumericSettings
from .solvers import deviation_matrix, stationary_distribution

__all__ = [
    "UniformizedChain",
    "uniformize",
    "pair_step",
    "ctmc_stationary",
    "ctmc_ergodicity_coefficient",
    "ctmc_deviation_matrix",
    "ctmc_deviation_bound",
    "ctmc_lambda1_bound",
    "ctmc_small_set_bound",
    "ctmc_hitting_times",
    "ctmc_unit_drift_bound",
    "CtmcGeometricDriftCertificate",
    "fit_ctmc_geometric_drift",
    "transfer_drift_to_skeleton",
    "ctmc_v_bound_with_stationary",
    "ctmc_v_bound_drift_only",
    "ctmc_v_bounds",
    "mm1_coefficients",
    "batch_arrival_drift",
    "stationary_series_expansion",
]

DEFAULT_STEP_FRACTION = 0.99  # keeps skeleton diagonals strictly positive


@dataclass
class UniformizedChain:
    """Step length, the skeleton transition matrix, and its source generator."""

    h: float
    matrix: StochasticMatrix
    source: IntensityMatrix


def uniformize(
    Q: IntensityMatrix,
    h: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> UniformizedChain:
    """Build the step-h skeleton P_h = I + h Q.

    ``h`` must satisfy 0 < h < 1 / max_i(-Q_ii) strictly; when omitted it
    defaults to 0.99 of that limit.
    """
    uc = Q.uniformization_constant
    if not np.isfinite(uc) or uc <= 0:
        raise UnboundedGenerator("generator has no finite positive rate bound")
    limit = 1.0 / uc
    if h is None:
        h = DEFAULT_STEP_FRACTION * limit
    if not 0.0 < h < limit:
        raise InvalidStep(f"step {h:g} outside the open interval (0, {limit:g})")
    P_h = np.eye(Q.n) + h * Q.entries
    return UniformizedChain(h=h, matrix=StochasticMatrix(P_h, settings=settings), source=Q)


def pair_step(Q: IntensityMatrix, Q_tilde: IntensityMatrix) -> float:
    """Common admissible step for a generator pair."""
    uc = max(Q.uniformization_constant, Q_tilde.uniformization_constant)
    return DEFAULT_STEP_FRACTION / uc


def ctmc_stationary(
    Q: IntensityMatrix,
    method: str = "solve",
    settings: NumericSettings = DEFAULT,
) -> Distribution:
    """Solve pi Q = 0, sum(pi) = 1 for an irreducible bounded generator.

    ``method="solve"`` replaces one equation with the normalization row;
    ``method="gth"`` routes through the skeleton chain's state-reduction
    solve for componentwise accuracy (required under growing weights).
    """
    if not Q.irreducible:
        raise ReducibleChain("stationary measure requires an irreducible generator")
    if method == "gth":
        return stationary_distribution(uniformize(Q).matrix, method="gth", settings=settings)
    if method != "solve":
        raise ValueError(f"unknown method {method!r}")
    n = Q.n
    A = Q.entries.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"stationary system is singular: {exc}") from exc
    scale = max(1.0, Q.uniformization_constant)
    residual = float(np.abs(x @ Q.entries).max())
    if residual > settings.stationarity * scale:
        raise SolverFailure(f"stationary residual {residual:.3e} too large")
    return Distribution(x, settings=settings)


def ctmc_ergodicity_coefficient(Q: IntensityMatrix) -> float:
    """Generator ergodicity coefficient.

    Half the minimum over state pairs i != j of

        |Q_ii - Q_ji| + |Q_ij - Q_jj| - sum_{s != i, j} |Q_is - Q_js|,

    chosen so that the skeleton satisfies Lambda1(P_h) = 1 - h Lambda1(Q)
    for small enough h.
    """
    M = Q.entries
    n = Q.n
    best = np.inf
    for i in range(n):
        diff = np.abs(M - M[i])          # row j minus row i, all j
        tot = diff.sum(axis=1)
        for j in range(i + 1, n):
            inner = tot[j] - diff[j, i] - diff[j, j]
            val = diff[j, i] + diff[j, j] - inner
            if val < best:
                best = val
    return 0.5 * float(best)


def ctmc_deviation_matrix(
    Q: IntensityMatrix,
    h: float | None = None,
    pi: Distribution | None = None,
    settings: NumericSettings = DEFAULT,
) -> np.ndarray:
    """Deviation matrix of the generator: the integral of (P^t - Pi) dt.

    Computed through the skeleton: the step-h chain's deviation matrix is
    D / h, so D = h * D_h — the value is independent of which admissible h
    is used. Certified to satisfy D e = 0 and pi D = 0.
    """
    chain = uniformize(Q, h, settings=settings)
    if pi is None:
        pi = stationary_distribution(chain.matrix, settings=settings)
    D_h = deviation_matrix(chain.matrix, pi, settings=settings)
    D = chain.h * D_h
    scale = max(1.0, float(np.abs(D).max()))
    res = max(float(np.abs(D.sum(axis=1)).max()), float(np.abs(pi.values @ D).max()))
    if res > settings.inverse * scale:
        raise SolverFailure(f"deviation residual {res:.3e} too large")
    return D


def ctmc_deviation_bound(
    Q: IntensityMatrix,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Deviation-norm bound: ell = ||D||, for uniformly ergodic generators.

    On a finite state space the hypothesis holds automatically.
    """
    D = ctmc_deviation_matrix(Q, settings=settings)
    ell = matrix_norm(D)
    return BoundReport(
        bound_name="ctmc_deviation",
        hypotheses=[Hypothesis("||D|| finite", True, f"||D|| = {ell:.12g}")],
        ell=ell,
        delta_norm=delta_norm,
        info={"deviation_norm": ell},
    )


def ctmc_lambda1_bound(
    Q: IntensityMatrix,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Ergodicity-coefficient bound: ell = 1 / Lambda1(Q), needs Lambda1(Q) > 0."""
    lam = ctmc_ergodicity_coefficient(Q)
    if lam <= settings.hypothesis_margin:
        raise HypothesisFailed("Lambda1(Q) > 0", f"Lambda1(Q) = {lam:.12g}")
    return BoundReport(
        bound_name="ctmc_lambda1",
        hypotheses=[Hypothesis("Lambda1(Q) > 0", True, f"Lambda1(Q) = {lam:.12g}")],
        ell=1.0 / lam,
        delta_norm=delta_norm,
        info={"lambda1_Q": lam},
    )


def ctmc_small_set_bound(
    Q: IntensityMatrix,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Column-minimum bound: ell = 1 / sum_k inf_{i != k} Q_ik.

    The step length cancels structurally, so the value is h-free. Fails
    when every column has a zero off-diagonal infimum.
    """
    M = Q.entries.copy()
    np.fill_diagonal(M, np.inf)          # exclude the diagonal from column minima
    delta_k = M.min(axis=0)
    total = float(delta_k.sum())
    if total <= settings.hypothesis_margin:
        raise HypothesisFailed(
            "sum_k inf_{i != k} Q_ik > 0", f"sum = {total:.12g}"
        )
    return BoundReport(
        bound_name="ctmc_small_set",
        hypotheses=[Hypothesis("positive common rate mass", True, f"sum = {total:.12g}")],
        ell=1.0 / total,
        delta_norm=delta_norm,
        info={"column_minima": delta_k},
    )


def ctmc_hitting_times(
    Q: IntensityMatrix,
    target: int,
    settings: NumericSettings = DEFAULT,
) -> np.ndarray:
    """Mean hitting times onto ``target``: solve Q V = -1 off target, V(target) = 0."""
    if not Q.irreducible:
        raise ReducibleChain("hitting times require an irreducible generator")
    n = Q.n
    if not 0 <= target < n:
        raise InvalidParameters(f"target state {target} out of range [0, {n})")
    A = -Q.entries.copy()
    A[target, :] = 0.0
    A[target, target] = 1.0
    b = np.ones(n)
    b[target] = 0.0
    try:
        v = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"hitting-time system is singular: {exc}") from exc
    scale = max(1.0, float(np.abs(v).max()))
    if np.any(v < -settings.inverse * scale):
        raise DivergentHittingTimes(f"negative hitting time {v.min():.3e}")
    v[target] = 0.0
    return v


def ctmc_unit_drift_bound(
    Q: IntensityMatrix,
    drift_values,
    taboo_state: int,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Unit drift bound: ell = 2 (sup V)^2 under Q V <= -1 off the taboo state."""
    V = np.asarray(drift_values, dtype=float).ravel()
    if V.shape != (Q.n,):
        raise InvalidParameters("drift vector length must match the generator size")
    if abs(V[taboo_state]) > settings.drift:
        raise DriftViolated(taboo_state, float(abs(V[taboo_state])), "taboo value must be zero")
    if np.any(V < -settings.drift):
        state = int(np.argmin(V))
        raise DriftViolated(state, float(-V[state]), "drift vector must be nonnegative")
    qv = Q.entries @ V
    slack = qv + 1.0                     # require <= 0 off the taboo state
    slack[taboo_state] = -np.inf
    worst = int(np.argmax(slack))
    scale = max(1.0, Q.uniformization_constant * float(V.max()))
    if slack[worst] > settings.drift * scale:
        raise DriftViolated(worst, float(slack[worst]), "unit drift inequality violated")
    sup_v = float(V.max())
    return BoundReport(
        bound_name="ctmc_unit_drift",
        hypotheses=[
            Hypothesis("Q V <= -1 off taboo", True,
                       f"taboo state {taboo_state}, sup V = {sup_v:.12g}")
        ],
        ell=2.0 * sup_v**2,
        delta_norm=delta_norm,
        info={"taboo_state": taboo_state, "sup_value": sup_v},
    )


@dataclass
class CtmcGeometricDriftCertificate:
    """Drift witness Q V <= -lambda V + b at the taboo state, lambda > 0."""

    taboo_state: int
    weights: WeightFunction
    lam: float
    b: float

    def validate(self, Q: IntensityMatrix, tol: float = DEFAULT.drift) -> None:
        V = self.weights.values
        if V.shape != (Q.n,):
            raise InvalidParameters("weight length must match the generator size")
        rhs = -self.lam * V
        rhs = rhs.copy()
        rhs[self.taboo_state] += self.b
        slack = Q.entries @ V - rhs
        scale = max(1.0, Q.uniformization_constant * float(V.max()))
        worst = int(np.argmax(slack))
        if slack[worst] > tol * scale:
            raise DriftViolated(worst, float(slack[worst]), "generator drift inequality violated")
        if self.lam <= 0:
            raise DriftViolated(self.taboo_state, -self.lam, "decay rate must be positive")


def fit_ctmc_geometric_drift(
    Q: IntensityMatrix,
    weights,
    taboo_state: int,
    settings: NumericSettings = DEFAULT,
) -> CtmcGeometricDriftCertificate:
    """Fit the largest decay rate lambda for given weights; b soaks the taboo row."""
    V = as_weight_array(weights)
    if V.shape != (Q.n,):
        raise InvalidParameters("weight length must match the generator size")
    qv = Q.entries @ V
    rates = -qv / V
    off = np.delete(rates, taboo_state)
    lam = float(off.min())
    if lam <= settings.hypothesis_margin:
        raise NoPositiveLambda(f"best decay rate {lam:.3e} is not positive")
    b = max(0.0, float(qv[taboo_state] + lam * V[taboo_state]))
    wf = weights if isinstance(weights, WeightFunction) else WeightFunction(V)
    return CtmcGeometricDriftCertificate(taboo_state, wf, lam, b)


def transfer_drift_to_skeleton(cert: CtmcGeometricDriftCertificate, h: float):
    """Discrete certificate induced on P_h: P_h V <= (1 - lambda h) V + b h."""
    from .dtmc import GeometricDriftCertificate

    return GeometricDriftCertificate(
        taboo_state=cert.taboo_state,
        weights=cert.weights,
        lam=1.0 - cert.lam * h,
        b=cert.b * h,
    )


def ctmc_v_bound_with_stationary(
    Q: IntensityMatrix,
    cert: CtmcGeometricDriftCertificate,
    pi: Distribution,
    delta_v_norm: float,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Weighted bound using pi(V): gap_V <= c ||pi||_V d / (lambda - c d).

    Requires d = ||Delta||_V < lambda / c with c = 1 + ||e||_V ||pi||_V.
    """
    cert.validate(Q, tol=settings.drift)
    V = cert.weights.values
    pi_v = v_norm_measure(pi.values, V)
    c = 1.0 + (1.0 / V.min()) * pi_v
    threshold = cert.lam / c
    if not delta_v_norm < threshold:
        raise HypothesisFailed(
            "||Delta||_V < lambda / c",
            f"||Delta||_V = {delta_v_norm:.6g}, threshold = {threshold:.6g}",
        )
    value = c * pi_v * delta_v_norm / (cert.lam - c * delta_v_norm)
    return BoundReport(
        bound_name="ctmc_v_norm_with_stationary",
        hypotheses=[
            Hypothesis("generator drift certificate", True,
                       f"lambda = {cert.lam:.6g}, b = {cert.b:.6g}"),
            Hypothesis("||Delta||_V below threshold", True,
                       f"{delta_v_norm:.6g} < {threshold:.6g}"),
            Hypothesis("perturbed chain positive recurrent", True,
                       "implied by the drift margin"),
        ],
        direct_value=value,
        delta_norm=delta_v_norm,
        info={"c": c, "pi_v": pi_v, "threshold": threshold},
    )


def ctmc_v_bound_drift_only(
    cert: CtmcGeometricDriftCertificate,
    delta_v_norm: float,
) -> BoundReport:
    """Weighted bound from drift parameters alone.

    Requires V >= 1 and d < lambda^2 / (b + lambda); reads
    gap_V <= b (b + lambda) d / (lambda^3 - lambda (b + lambda) d).
    """
    V = cert.weights.values
    if V.min() < 1.0 - 1e-12:
        raise HypothesisFailed("V >= 1", f"min V = {V.min():.6g}")
    lam, b = cert.lam, cert.b
    threshold = lam**2 / (b + lam)
    if not delta_v_norm < threshold:
        raise HypothesisFailed(
            "||Delta||_V < lambda^2 / (b + lambda)",
            f"||Delta||_V = {delta_v_norm:.6g}, threshold = {threshold:.6g}",
        )
    num = b * (b + lam) * delta_v_norm
    den = lam**3 - lam * (b + lam) * delta_v_norm
    return BoundReport(
        bound_name="ctmc_v_norm_drift_only",
        hypotheses=[
            Hypothesis("generator drift certificate", True,
                       f"lambda = {lam:.6g}, b = {b:.6g}"),
            Hypothesis("V >= 1", True, f"min V = {V.min():.6g}"),
            Hypothesis("||Delta||_V below threshold", True,
                       f"{delta_v_norm:.6g} < {threshold:.6g}"),
        ],
        direct_value=num / den,
        delta_norm=delta_v_norm,
        info={"threshold": threshold, "margin": threshold - delta_v_norm},
    )


def ctmc_v_bounds(
    Q: IntensityMatrix,
    cert: CtmcGeometricDriftCertificate,
    delta_v_norm: float,
    pi: Distribution | None = None,
    settings: NumericSettings = DEFAULT,
) -> list[BoundReport]:
    """Evaluate both weighted bounds, rendering per-variant failures inline."""
    from .reports import failed_report

    out = []
    if pi is not None:
        try:
            out.append(ctmc_v_bound_with_stationary(Q, cert, pi, delta_v_norm, settings))
        except HypothesisFailed as exc:
            out.append(failed_report("ctmc_v_norm_with_stationary", exc.hypothesis, exc.detail))
    try:
        out.append(ctmc_v_bound_drift_only(cert, delta_v_norm))
    except HypothesisFailed as exc:
        out.append(failed_report("ctmc_v_norm_drift_only", exc.hypothesis, exc.detail))
    return out


def mm1_coefficients(sigma: float, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Row-generating coefficient vectors of the single-server queue.

    Arrivals at rate sigma, service at rate mu; row 0 carries the arrival
    coefficients [-sigma, sigma] and rows i >= 1 the service/arrival band
    [mu, -(mu + sigma), sigma] centered on the diagonal.
    """
    if sigma <= 0 or mu <= 0:
        raise InvalidParameters("rates must be positive")
    a = np.array([-sigma, sigma])
    b = np.array([mu, -(mu + sigma), sigma])
    return a, b


def _validate_band_coefficients(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size < 2 or b.size < 2:
        raise InvalidParameters("coefficient vectors need at least two entries")
    if np.any(a[1:] < 0) or a[0] > 0:
        raise InvalidParameters("row-0 coefficients must be [diag <= 0, rates >= 0...]")
    if b[0] <= 0:
        raise InvalidParameters("downward rate b[0] must be positive")
    if b[1] > 0 or np.any(b[2:] < 0):
        raise InvalidParameters("band coefficients must be [b0 > 0, diag <= 0, rates >= 0...]")
    scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
    if abs(a.sum()) > 1e-12 * scale or abs(b.sum()) > 1e-12 * scale:
        raise InvalidParameters("coefficient vectors must each sum to zero (conservative)")
    return a, b


def batch_arrival_drift(
    a,
    b,
    n_states: int = 200,
    z_grid: int = 256,
    settings: NumericSettings = DEFAULT,
) -> CtmcGeometricDriftCertificate:
    """Geometric drift certificate for a batch-arrival band generator.

    The generator has row 0 equal to the ``a`` coefficients and every row
    i >= 1 equal to the ``b`` band starting one column left of the
    diagonal. With generating functions A(z) = sum a_k z^k and
    B(z) = sum b_k z^k, the weights V(i) = z0^i satisfy
    Q V = (B(z0)/z0) V off state 0, so the decay rate is
    lambda = max over [1, rho] of -B(z)/z, where rho is the upper root of
    B. The function is concave there, so the maximizer z0 is the unique
    root of z B'(z) - B(z); a coarse grid scan brackets it and bisection on
    that monotone derivative condition pins it to full precision (an
    argmax by value comparison alone cannot certify z0 beyond sqrt(eps)).
    The certificate uses b = A(z0) + lambda, taboo state 0.

    Requires the ergodicity condition B'(1) < 0 and at least one upward
    batch rate (otherwise B has no finite upper root and the weights would
    be unbounded).
    """
    a, b = _validate_band_coefficients(a, b)
    if n_states < 2:
        raise InvalidParameters("need at least two states")
    if z_grid < 8:
        raise InvalidParameters("grid resolution too coarse")
    b_prime_at_1 = float(npoly.polyval(1.0, npoly.polyder(b)))
    if not b_prime_at_1 < 0:
        raise NotErgodic(f"mean band drift B'(1) = {b_prime_at_1:.6g} is not negative")
    if not np.any(b[2:] > 0):
        raise InvalidParameters(
            "no upward rates in the band: the drift weights would be unbounded"
        )

    def B(z):
        return npoly.polyval(z, b)

    def Bp(z):
        return npoly.polyval(z, npoly.polyder(b))

    # upper root of B: bracket by doubling, then bisect
    hi = 2.0
    for _ in range(200):
        if B(hi) > 0:
            break
        hi *= 2.0
    else:
        raise InvalidParameters("band generating function never turns positive")
    lo = 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if B(mid) <= 0:
            lo = mid
        else:
            hi = mid
    rho = lo

    # coarse scan of -B(z)/z, then bisection on the stationarity condition
    zs = np.linspace(1.0, rho, z_grid)
    vals = -npoly.polyval(zs, b) / zs
    z_best = float(zs[int(np.argmax(vals))])
    g = lambda z: z * Bp(z) - B(z)       # nondecreasing: g' = z B'' >= 0
    lo, hi = 1.0, rho
    if g(z_best) <= 0:
        lo = z_best
    else:
        hi = z_best
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    z0 = 0.5 * (lo + hi)
    lam = float(-B(z0) / z0)
    if lam <= settings.hypothesis_margin:
        raise NoPositiveLambda(f"decay rate {lam:.3e} is not positive")
    with np.errstate(over="raise"):
        try:
            V = z0 ** np.arange(n_states, dtype=float)
        except FloatingPointError:
            raise InvalidParameters(
                f"weights z0^i overflow at {n_states} states (z0 = {z0:.6g})"
            ) from None
    b_const = float(npoly.polyval(z0, a)) + lam
    return CtmcGeometricDriftCertificate(
        taboo_state=0, weights=WeightFunction(V), lam=lam, b=b_const
    )


def stationary_series_expansion(
    Q: IntensityMatrix,
    G,
    eps: float,
    n_terms: int = 50,
    cert: CtmcGeometricDriftCertificate | None = None,
    pi: Distribution | None = None,
    settings: NumericSettings = DEFAULT,
) -> Distribution:
    """Stationary measure of Q + eps G as the power series pi sum (eps G D)^n.

    ``G`` must be a conservative direction (G e = 0). Admissibility: with a
    drift certificate, eps must lie inside one of its radii
    lambda / (c g1) or lambda^2 / ((b + lambda) g1), where g1 = ||G||_V;
    without one, the spectral radius of eps G D must be below 1.
    Each partial sum has total mass exactly 1 because D e = 0.
    """
    Gm = np.asarray(G, dtype=float)
    if Gm.shape != (Q.n, Q.n):
        raise InvalidParameters("direction matrix must match the generator size")
    scale = max(1.0, float(np.abs(Gm).max()))
    if np.abs(Gm.sum(axis=1)).max() > 1e-12 * scale:
        raise InvalidParameters("direction matrix rows must sum to zero")
    if pi is None:
        pi = ctmc_stationary(Q, settings=settings)
    D = ctmc_deviation_matrix(Q, pi=pi, settings=settings)
    if eps != 0.0:
        if cert is not None:
            V = cert.weights.values
            g1 = v_norm_matrix(Gm, V)
            radii = [cert.lam**2 / ((cert.b + cert.lam) * g1)]
            pi_v = v_norm_measure(pi.values, V)
            c = 1.0 + (1.0 / V.min()) * pi_v
            radii.append(cert.lam / (c * g1))
            if not any(abs(eps) < r for r in radii):
                raise OutOfRadius(
                    f"|eps| = {abs(eps):.6g} outside admissible radii "
                    + ", ".join(f"{r:.6g}" for r in radii)
                )
        else:
            spec = float(np.abs(np.linalg.eigvals(eps * (Gm @ D))).max())
            if spec >= 1.0 - 1e-9:
                raise OutOfRadius(f"spectral radius {spec:.6g} of eps G D not below 1")
    M = eps * (Gm @ D)
    term = pi.values.copy()
    total = pi.values.copy()
    for _ in range(n_terms):
        term = term @ M
        total = total + term
    return Distribution(total, settings=settings)
