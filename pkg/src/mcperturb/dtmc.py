"""Perturbation bounds for discrete-time chains.

Every bound returns a :class:`~mcperturb.reports.BoundReport`. Bounds whose
hypothesis fails raise :class:`~mcperturb.errors.HypothesisFailed` (or a
subclass); aggregation layers render those inline instead of failing.

The catalog:

* ``seneta_bound``        gap <= ||Delta|| / (1 - Lambda1(P)), needs Lambda1(P) < 1
* ``seneta_best_bound``   gap <= Lambda1(A#) ||Delta||, the optimal coefficient
* ``skeleton_bound``      gap <= ||P^m - Ptilde^m|| / (1 - Lambda1(P^m))
* ``small_set_bound``     gap <= m / nu_m ||Delta|| with nu_m the whole-space
                          common mass of the m-step kernel
* ``unit_drift_bound``    gap <= 2 (sup V)^2 ||Delta|| under the unit drift
                          condition P V <= V - 1 off the taboo state
* ``hitting_time_bound``  the same with the minimal drift function, scanning
                          every taboo state
* ``v_bound_with_stationary`` / ``v_bound_drift_only``
                          weighted-norm bounds under a geometric drift
                          condition P V <= lambda V + b at the taboo state

where ``Lambda1`` is the ergodicity coefficient (half the maximal l1
distance between rows) and ``A#`` the group inverse of I - P.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import Distribution, StochasticMatrix, WeightFunction, as_weight_array
from .errors import (
    DivergentHittingTimes,
    DriftViolated,
    HypothesisFailed,
    InvalidParameters,
    NoSmallSet,
    ReducibleChain,
    SolverFailure,
)
from .norms import matrix_norm, v_norm_measure
from .reports import BoundReport, Hypothesis
from .settings import DEFAULT, NumericSettings
from .solvers import group_inverse

__all__ = [
    "ergodicity_coefficient",
    "seneta_bound",
    "seneta_best_bound",
    "skeleton_bound",
    "SmallSetCertificate",
    "small_set_bound",
    "hitting_times",
    "birth_death_hitting_times",
    "UnitDriftCertificate",
    "unit_drift_from_hitting_times",
    "unit_drift_bound",
    "hitting_time_bound",
    "GeometricDriftCertificate",
    "fit_geometric_drift",
    "v_bound_with_stationary",
    "v_bound_drift_only",
]


def ergodicity_coefficient(B) -> float:
    """Half the maximal l1 distance between rows of B.

    Zero for matrices with identical rows; at most 1 for stochastic
    matrices; computed over all row pairs.
    """
    M = np.asarray(B, dtype=float)
    best = 0.0
    for i in range(M.shape[0] - 1):
        d = np.abs(M[i + 1 :] - M[i]).sum(axis=1).max()
        if d > best:
            best = float(d)
    return 0.5 * best


def _entries(P):
    return P.entries if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)


def seneta_bound(
    P: StochasticMatrix,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Ergodicity-coefficient bound: ell = 1 / (1 - Lambda1(P)).

    Raises HypothesisFailed when Lambda1(P) >= 1, up to a small margin that
    guards the division against rounding.
    """
    lam = ergodicity_coefficient(P.entries)
    if lam >= 1.0 - settings.hypothesis_margin:
        raise HypothesisFailed(
            "one-step contraction Lambda1(P) < 1", f"Lambda1(P) = {lam:.12g}"
        )
    ell = 1.0 / (1.0 - lam)
    return BoundReport(
        bound_name="seneta",
        hypotheses=[Hypothesis("Lambda1(P) < 1", True, f"Lambda1(P) = {lam:.12g}")],
        ell=ell,
        delta_norm=delta_norm,
        info={"lambda1_P": lam},
    )


def seneta_best_bound(
    P: StochasticMatrix,
    pi: Distribution | None = None,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Optimal coefficient bound: ell = Lambda1(A#), A# the group inverse of I - P.

    Valid even when Lambda1(P) = 1; the group inverse exists for periodic
    irreducible chains as well, and the report uses it as-is.
    """
    if not P.irreducible:
        raise ReducibleChain("group-inverse bound requires an irreducible chain")
    A_sharp = group_inverse(P, pi, settings=settings)
    ell = ergodicity_coefficient(A_sharp)
    return BoundReport(
        bound_name="seneta_best",
        hypotheses=[
            Hypothesis("irreducible", True),
            Hypothesis("aperiodic", P.aperiodic, f"period = {P.period}"),
        ],
        ell=ell,
        delta_norm=delta_norm,
        info={"lambda1_group_inverse": ell},
    )


def skeleton_bound(
    P: StochasticMatrix,
    perturbed: StochasticMatrix,
    m: int,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """m-step skeleton bound with the exact numerator ||P^m - Ptilde^m||.

    The looser relaxation ||P^m - Ptilde^m|| <= m ||Delta|| is reported in
    ``info`` but the bound value uses the actual m-step difference.
    """
    if m < 1:
        raise InvalidParameters("skeleton step count must be a positive integer")
    Pm = P.power(m)
    lam = ergodicity_coefficient(Pm)
    if lam >= 1.0 - settings.hypothesis_margin:
        raise HypothesisFailed(
            "m-step contraction Lambda1(P^m) < 1",
            f"m = {m}, Lambda1(P^m) = {lam:.12g}",
        )
    num = matrix_norm(Pm - perturbed.power(m))
    delta = matrix_norm(perturbed.entries - P.entries)
    return BoundReport(
        bound_name=f"skeleton[m={m}]",
        hypotheses=[Hypothesis("Lambda1(P^m) < 1", True, f"Lambda1(P^m) = {lam:.12g}")],
        direct_value=num / (1.0 - lam),
        delta_norm=delta,
        info={
            "m": m,
            "lambda1_Pm": lam,
            "m_step_difference_norm": num,
            "linear_relaxation": m * delta / (1.0 - lam),
        },
    )


@dataclass
class SmallSetCertificate:
    """Witness that the whole space is small at step m.

    ``per_state_minima[k]`` is the column minimum inf_i P^m(i, k); their sum
    ``nu_mass`` is the common measure mass, in (0, 1].
    """

    m: int
    nu_mass: float
    per_state_minima: np.ndarray


def small_set_bound(
    P: StochasticMatrix,
    m_max: int = 8,
    perturbed: StochasticMatrix | None = None,
    delta_norm: float | None = None,
) -> tuple[BoundReport, SmallSetCertificate]:
    """Search m = 1..m_max for the best whole-space small-set bound.

    For each m the common mass is nu_m = sum_k inf_i P^m(i, k); the bound
    coefficient is m / nu_m and the returned m minimizes it among steps with
    nu_m > 0. When a perturbed chain is supplied, the tighter direct form
    ||P^m - Ptilde^m|| / nu_m is evaluated alongside the linear form.

    An alternative route through the deviation-matrix norm (summing the
    geometric decay of ||P^n - Pi||) yields 2m / nu_m, twice this
    coefficient, and is therefore never worth computing.
    """
    if m_max < 1:
        raise InvalidParameters("m_max must be a positive integer")
    Pm = np.eye(P.n)
    best = None
    table = []
    for m in range(1, m_max + 1):
        Pm = Pm @ P.entries
        minima = Pm.min(axis=0)
        nu = float(minima.sum())
        table.append((m, nu))
        if nu > 0.0 and (best is None or m / nu < best[0]):
            best = (m / nu, m, nu, minima.copy())
    if best is None:
        raise NoSmallSet(f"nu_m = 0 for every m <= {m_max}")
    ell, m_star, nu_star, minima = best
    cert = SmallSetCertificate(m=m_star, nu_mass=nu_star, per_state_minima=minima)
    info = {"search_table": table, "m": m_star, "nu_mass": nu_star}
    direct_value = None
    if perturbed is not None:
        num = matrix_norm(P.power(m_star) - perturbed.power(m_star))
        direct_value = num / nu_star
        info["m_step_difference_norm"] = num
        if delta_norm is None:
            delta_norm = matrix_norm(perturbed.entries - P.entries)
        info["linear_form"] = ell * delta_norm
    report = BoundReport(
        bound_name=f"small_set[m={m_star}]",
        hypotheses=[Hypothesis("nu_m > 0", True, f"nu_{m_star} = {nu_star:.12g}")],
        ell=ell,
        direct_value=direct_value,
        delta_norm=delta_norm,
        info=info,
    )
    return report, cert


def hitting_times(
    P: StochasticMatrix,
    target: int,
    settings: NumericSettings = DEFAULT,
) -> np.ndarray:
    """Mean first hitting times onto ``target`` by dense linear solve.

    Solves m(i) = 1 + sum_{j != target} P(i, j) m(j) with m(target) = 0,
    certifying the residual. The minimality of the returned solution is the
    job of the value-iteration oracle in :mod:`mcperturb.verify`.
    """
    if not P.irreducible:
        raise ReducibleChain("hitting times require an irreducible chain")
    n = P.n
    if not 0 <= target < n:
        raise InvalidParameters(f"target state {target} out of range [0, {n})")
    A = np.eye(n) - P.entries
    A[target, :] = 0.0
    A[target, target] = 1.0
    b = np.ones(n)
    b[target] = 0.0
    try:
        m = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"hitting-time system is singular: {exc}") from exc
    scale = max(1.0, float(np.abs(m).max()))
    if np.any(m < -settings.inverse * scale):
        raise DivergentHittingTimes(
            f"negative hitting time {m.min():.3e}: transient or truncation pathology"
        )
    residual = float(np.abs(A @ m - b).max())
    if residual > settings.inverse * scale:
        raise SolverFailure(
            f"hitting-time residual {residual:.3e} exceeds tolerance"
        )
    m[target] = 0.0
    return m


def birth_death_hitting_times(a, b, c, j: int) -> np.ndarray:
    """Closed-form mean hitting times onto state j for a birth-death chain.

    Parameters are per-state probabilities on states 0..n: ``a[i]`` down,
    ``b[i]`` up, ``c[i]`` stay, with a[0] = 0 and b[n] = 0. With the
    potential weights mu(0) = 1, mu(k) = (b_0 ... b_{k-1}) / (a_1 ... a_k),

        m(i -> j) = sum_{m=i}^{j-1} (1 / (b_m mu(m))) sum_{k=0}^{m} mu(k)    i < j
        m(i -> j) = sum_{m=j}^{i-1} (1 / (b_m mu(m))) sum_{l=m+1}^{n} mu(l)  i > j

    with empty sums equal to zero.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    n = a.size - 1
    if b.size != n + 1 or c.size != n + 1:
        raise InvalidParameters("a, b, c must all have length n + 1")
    if n < 1:
        raise InvalidParameters("need at least two states")
    if not 0 <= j <= n:
        raise InvalidParameters(f"target state {j} out of range [0, {n}]")
    if abs(a[0]) > 0 or abs(b[n]) > 0:
        raise InvalidParameters("boundary moves a[0] and b[n] must be zero")
    if np.any(a[1:] <= 0) or np.any(b[:n] <= 0):
        raise InvalidParameters("interior down/up probabilities must be positive")
    if np.any(np.abs(a + b + c - 1.0) > 1e-12):
        raise InvalidParameters("rows a[i] + b[i] + c[i] must sum to 1")
    mu = np.empty(n + 1)
    mu[0] = 1.0
    for k in range(1, n + 1):
        mu[k] = mu[k - 1] * b[k - 1] / a[k]
    prefix = np.cumsum(mu)                  # sum_{k<=m} mu(k)
    suffix = np.cumsum(mu[::-1])[::-1]      # sum_{l>=m} mu(l), summed forward
    m_times = np.zeros(n + 1)
    # below the target: climb terms accumulate from j-1 downward
    acc = 0.0
    for i in range(j - 1, -1, -1):
        acc += prefix[i] / (b[i] * mu[i])
        m_times[i] = acc
    # above the target: descent terms accumulate from j upward
    acc = 0.0
    for i in range(j + 1, n + 1):
        acc += suffix[i] / (b[i - 1] * mu[i - 1])
        m_times[i] = acc
    return m_times


@dataclass
class UnitDriftCertificate:
    """Unit drift witness: V >= 0 bounded, V(taboo) = 0, P V <= V - 1 off taboo."""

    taboo_state: int
    values: np.ndarray

    @property
    def sup_value(self) -> float:
        return float(self.values.max())

    def validate(self, P: StochasticMatrix, tol: float = DEFAULT.drift) -> None:
        V = self.values
        i0 = self.taboo_state
        if V.shape != (P.n,):
            raise InvalidParameters("drift vector length must match the chain size")
        if abs(V[i0]) > tol:
            raise DriftViolated(i0, float(abs(V[i0])), "taboo value must be zero")
        if np.any(V < -tol):
            state = int(np.argmin(V))
            raise DriftViolated(state, float(-V[state]), "drift vector must be nonnegative")
        slack = P.entries @ V - (V - 1.0)   # require <= 0 off the taboo state
        slack[i0] = -np.inf
        worst = int(np.argmax(slack))
        if slack[worst] > tol * max(1.0, self.sup_value):
            raise DriftViolated(worst, float(slack[worst]), "unit drift inequality violated")


def unit_drift_from_hitting_times(
    P: StochasticMatrix, taboo_state: int
) -> UnitDriftCertificate:
    """The minimal unit-drift vector: mean hitting times onto the taboo state."""
    return UnitDriftCertificate(taboo_state, hitting_times(P, taboo_state))


def unit_drift_bound(
    P: StochasticMatrix,
    cert: UnitDriftCertificate,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Drift-based bound ell = 2 (sup V)^2; valid for periodic chains too."""
    cert.validate(P, tol=settings.drift)
    sup_v = cert.sup_value
    return BoundReport(
        bound_name="unit_drift",
        hypotheses=[
            Hypothesis(
                "P V <= V - 1 off taboo",
                True,
                f"taboo state {cert.taboo_state}, sup V = {sup_v:.12g}",
            )
        ],
        ell=2.0 * sup_v**2,
        delta_norm=delta_norm,
        info={"taboo_state": cert.taboo_state, "sup_value": sup_v},
    )


def hitting_time_bound(
    P: StochasticMatrix,
    delta_norm: float | None = None,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Exhaustive-scan drift bound: ell = 2 min_i0 (sup_i m(i -> i0))^2.

    Runs one hitting-time solve per candidate taboo state (n dense solves);
    ties break toward the smallest state index. Candidates whose hitting
    times overflow the solver (hard-to-reach states on truncated climb
    chains) are skipped: the bound holds for each candidate separately, and
    an astronomically slow target can never realize the minimum.
    """
    best_sup = None
    best_state = None
    for i0 in range(P.n):
        try:
            sup_m = float(hitting_times(P, i0, settings=settings).max())
        except (DivergentHittingTimes, SolverFailure):
            continue
        if best_sup is None or sup_m < best_sup - 1e-15:
            best_sup = sup_m
            best_state = i0
    if best_sup is None:
        raise DivergentHittingTimes("no taboo state has stable finite hitting times")
    return BoundReport(
        bound_name="hitting_time_drift",
        hypotheses=[
            Hypothesis(
                "finite hitting times from every state",
                True,
                f"best taboo state {best_state}, sup m = {best_sup:.12g}",
            )
        ],
        ell=2.0 * best_sup**2,
        delta_norm=delta_norm,
        info={"taboo_state": best_state, "sup_hitting_time": best_sup},
    )


@dataclass
class GeometricDriftCertificate:
    """Geometric drift witness: P V <= lambda V + b at the taboo state only.

    ``pi_value`` stores pi(V) when a stationary distribution was available
    at fit time; it always satisfies pi(V) <= b / (1 - lambda).
    """

    taboo_state: int
    weights: WeightFunction
    lam: float
    b: float
    pi_value: float | None = None

    def validate(self, P: StochasticMatrix, tol: float = DEFAULT.drift) -> None:
        V = self.weights.values
        if V.shape != (P.n,):
            raise InvalidParameters("weight length must match the chain size")
        rhs = self.lam * V
        rhs = rhs.copy()
        rhs[self.taboo_state] += self.b
        slack = P.entries @ V - rhs
        worst = int(np.argmax(slack))
        if slack[worst] > tol * max(1.0, float(V.max())):
            raise DriftViolated(worst, float(slack[worst]), "geometric drift inequality violated")
        if not self.lam < 1.0:
            raise DriftViolated(self.taboo_state, self.lam - 1.0, "decay rate must be below 1")


def fit_geometric_drift(
    P: StochasticMatrix,
    weights: WeightFunction,
    taboo_state: int,
    pi: Distribution | None = None,
    settings: NumericSettings = DEFAULT,
) -> GeometricDriftCertificate:
    """Fit the tightest geometric drift certificate for a given weight vector.

    lambda is the largest ratio (P V)(i) / V(i) off the taboo state; b soaks
    up whatever the taboo row needs. Raises DriftViolated when lambda >= 1
    (the weights are not a geometric drift function for this chain).
    """
    V = as_weight_array(weights)
    if V.shape != (P.n,):
        raise InvalidParameters("weight length must match the chain size")
    if not 0 <= taboo_state < P.n:
        raise InvalidParameters(f"taboo state {taboo_state} out of range")
    pv = P.entries @ V
    ratios = pv / V
    off = np.delete(ratios, taboo_state)
    lam = float(off.max())
    if lam >= 1.0 - settings.hypothesis_margin:
        state = int(np.argmax(np.where(np.arange(P.n) == taboo_state, -np.inf, ratios)))
        raise DriftViolated(state, lam - 1.0, "no geometric decay for these weights")
    b = max(0.0, float(pv[taboo_state] - lam * V[taboo_state]))
    pi_value = None
    if pi is not None:
        pi_value = float(pi.values @ V)
    wf = weights if isinstance(weights, WeightFunction) else WeightFunction(V)
    return GeometricDriftCertificate(taboo_state, wf, lam, b, pi_value)


def _weighted_ones_norm(V: np.ndarray) -> float:
    # sup_i |1| / V(i)
    return float(1.0 / V.min())


def v_bound_with_stationary(
    P: StochasticMatrix,
    cert: GeometricDriftCertificate,
    pi: Distribution,
    delta_v_norm: float,
    settings: NumericSettings = DEFAULT,
) -> BoundReport:
    """Weighted-norm bound using pi(V): the sharper of the two drift bounds.

    With c = 1 + ||e||_V ||pi||_V the bound requires
    ||Delta||_V < (1 - lambda) / c and reads

        gap_V <= c ||pi||_V ||Delta||_V / (1 - lambda - c ||Delta||_V).

    The same margin certifies that the perturbed chain is positive
    recurrent.
    """
    cert.validate(P, tol=settings.drift)
    V = cert.weights.values
    pi_v = v_norm_measure(pi.values, V)
    c = 1.0 + _weighted_ones_norm(V) * pi_v
    threshold = (1.0 - cert.lam) / c
    if not delta_v_norm < threshold:
        raise HypothesisFailed(
            "||Delta||_V < (1 - lambda) / c",
            f"||Delta||_V = {delta_v_norm:.6g}, threshold = {threshold:.6g}",
        )
    value = c * pi_v * delta_v_norm / (1.0 - cert.lam - c * delta_v_norm)
    return BoundReport(
        bound_name="v_norm_with_stationary",
        hypotheses=[
            Hypothesis("geometric drift certificate", True,
                       f"lambda = {cert.lam:.6g}, b = {cert.b:.6g}"),
            Hypothesis("||Delta||_V below threshold", True,
                       f"{delta_v_norm:.6g} < {threshold:.6g}"),
            Hypothesis("perturbed chain positive recurrent", True,
                       "implied by the drift margin"),
        ],
        direct_value=value,
        delta_norm=delta_v_norm,
        info={"c": c, "pi_v": pi_v, "threshold": threshold,
              "margin": threshold - delta_v_norm},
    )


def v_bound_drift_only(
    cert: GeometricDriftCertificate,
    delta_v_norm: float,
) -> BoundReport:
    """Weighted-norm bound from the drift parameters alone (no pi needed).

    Requires V >= 1 and ||Delta||_V < (1 - lambda)^2 / (b + 1 - lambda);
    looser than the pi(V) form by construction, since pi(V) and c are
    replaced by their drift upper bounds.
    """
    V = cert.weights.values
    if V.min() < 1.0 - 1e-12:
        raise HypothesisFailed("V >= 1", f"min V = {V.min():.6g}")
    one_minus = 1.0 - cert.lam
    threshold = one_minus**2 / (cert.b + one_minus)
    if not delta_v_norm < threshold:
        raise HypothesisFailed(
            "||Delta||_V < (1 - lambda)^2 / (b + 1 - lambda)",
            f"||Delta||_V = {delta_v_norm:.6g}, threshold = {threshold:.6g}",
        )
    num = cert.b * (cert.b + one_minus) * delta_v_norm
    den = one_minus**3 - one_minus * (cert.b + one_minus) * delta_v_norm
    return BoundReport(
        bound_name="v_norm_drift_only",
        hypotheses=[
            Hypothesis("geometric drift certificate", True,
                       f"lambda = {cert.lam:.6g}, b = {cert.b:.6g}"),
            Hypothesis("V >= 1", True, f"min V = {V.min():.6g}"),
            Hypothesis("||Delta||_V below threshold", True,
                       f"{delta_v_norm:.6g} < {threshold:.6g}"),
        ],
        direct_value=num / den,
        delta_norm=delta_v_norm,
        info={"threshold": threshold, "margin": threshold - delta_v_norm},
    )
