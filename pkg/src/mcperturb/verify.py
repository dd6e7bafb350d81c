"""Ground-truth oracles: exact gaps, identity residuals, and bound fuzzing.

Everything here is exact linear algebra on the finite (possibly truncated)
chain; no trajectory simulation. The identity checks certify the algebraic
backbone the bounds rest on:

* perturbation identity:  nu - pi = nu Delta R = nu Delta (R - Pi),
  valid for periodic chains too;
* deviation identity:     nu - pi = nu Delta D, aperiodic chains only;
* taboo-resolvent identity: with T equal to P with the taboo row zeroed,
  R - Pi = Pi [pi (I-T)^{-1} e I - (I-T)^{-1}] + (I-T)^{-1} (I - Pi).

The fuzzer draws row-sum-zero perturbations of exact target norm, solves
the perturbed stationary distribution exactly, and confirms that every
hypothesis-satisfied bound covers the exact gap. Seeds are recorded per
case for bit-reproducible reruns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import IntensityMatrix, PerturbationPair, StochasticMatrix
from .ctmc import (
    batch_arrival_drift,
    ctmc_deviation_bound,
    ctmc_hitting_times,
    ctmc_lambda1_bound,
    ctmc_small_set_bound,
    ctmc_stationary,
    ctmc_unit_drift_bound,
    ctmc_v_bound_drift_only,
    ctmc_v_bound_with_stationary,
    pair_step,
    transfer_drift_to_skeleton,
    uniformize,
)
from .dtmc import (
    fit_geometric_drift,
    hitting_time_bound,
    hitting_times,
    seneta_best_bound,
    seneta_bound,
    skeleton_bound,
    small_set_bound,
    v_bound_drift_only,
    v_bound_with_stationary,
)
from .errors import (
    DivergentHittingTimes,
    DriftViolated,
    HypothesisFailed,
    InvalidParameters,
    NoPositiveLambda,
    NotErgodic,
    SeriesDivergent,
    ValidationError,
)
from .gallery import GalleryModel
from .norms import matrix_norm, total_variation_norm, v_norm_matrix, v_norm_measure
from .reports import USELESS_THRESHOLD, BoundReport
from .settings import DEFAULT, NumericSettings
from .solvers import (
    deviation_matrix,
    fundamental_matrix,
    stationary_distribution,
    stationary_matrix,
)

__all__ = [
    "exact_gap",
    "residual_perturbation_identity",
    "residual_deviation_identity",
    "residual_taboo_inverse_identity",
    "value_iteration_hitting",
    "canonical_pair",
    "skeleton_pair",
    "identity_residuals",
    "BoundOutcome",
    "FuzzCase",
    "FuzzSummary",
    "sample_dtmc_delta",
    "sample_ctmc_delta",
    "fuzz_bounds",
]


def _pair_stationary(pair: PerturbationPair, method: str):
    solve = stationary_distribution if pair.kind == "dtmc" else ctmc_stationary
    return solve(pair.base, method=method), solve(pair.perturbed, method=method)


def exact_gap(pair: PerturbationPair, weights=None, method: str | None = None) -> float:
    """Exactly computed stationary gap ||nu - pi||, weighted when asked.

    With weights the solves route through the componentwise-accurate
    state-reduction method by default, since growing weights amplify
    absolute tail errors of the plain solve.
    """
    if method is None:
        method = "gth" if weights is not None else "solve"
    pi, nu = _pair_stationary(pair, method)
    diff = nu.values - pi.values
    if weights is None:
        return total_variation_norm(diff)
    return v_norm_measure(diff, weights)


def residual_perturbation_identity(pair: PerturbationPair) -> float:
    """Max residual of nu - pi = nu Delta R = nu Delta (R - Pi)."""
    if pair.kind != "dtmc":
        raise InvalidParameters("identity applies to transition-matrix pairs")
    pi = stationary_distribution(pair.base)
    nu = stationary_distribution(pair.perturbed)
    R = fundamental_matrix(pair.base, pi)
    Pi = stationary_matrix(pi)
    lhs = nu.values - pi.values
    r1 = np.abs(lhs - nu.values @ pair.delta @ R).max()
    r2 = np.abs(lhs - nu.values @ pair.delta @ (R - Pi)).max()
    return float(max(r1, r2))


def residual_deviation_identity(pair: PerturbationPair) -> float:
    """Max residual of nu - pi = nu Delta D (aperiodic base chain)."""
    if pair.kind != "dtmc":
        raise InvalidParameters("identity applies to transition-matrix pairs")
    pi = stationary_distribution(pair.base)
    nu = stationary_distribution(pair.perturbed)
    D = deviation_matrix(pair.base, pi)
    lhs = nu.values - pi.values
    return float(np.abs(lhs - nu.values @ pair.delta @ D).max())


def residual_taboo_inverse_identity(
    P: StochasticMatrix,
    taboo_state: int,
    settings: NumericSettings = DEFAULT,
) -> float:
    """Max residual of the taboo-resolvent expression for R - Pi.

    T is P with the taboo row zeroed; its spectral radius must be below 1
    (else SeriesDivergent). The resolvent (I - T)^{-1} comes from a direct
    solve, cross-checked against a vector-probe partial sum of the series
    when the spectral radius estimate is below 0.95.
    """
    n = P.n
    T = P.entries.copy()
    T[taboo_state, :] = 0.0
    rho = float(np.abs(np.linalg.eigvals(T)).max())
    if rho >= 1.0 - 1e-12:
        raise SeriesDivergent(f"taboo matrix spectral radius {rho:.6g} not below 1")
    N = np.linalg.solve(np.eye(n) - T, np.eye(n))
    if rho < 0.95:
        probe = np.ones(n) / n
        acc = probe.copy()
        term = probe.copy()
        for _ in range(2000):
            term = term @ T
            acc += term
            if np.abs(term).max() < 1e-16:
                break
        agree = np.abs(acc - probe @ N).max()
        if agree > settings.identity * max(1.0, np.abs(N).max()):
            raise SeriesDivergent(
                f"resolvent series cross-check disagrees by {agree:.3e}"
            )
    pi = stationary_distribution(P)
    Pi = stationary_matrix(pi)
    R = fundamental_matrix(P, pi)
    kappa = float(pi.values @ N @ np.ones(n))
    rhs = Pi @ (kappa * np.eye(n) - N) + N @ (np.eye(n) - Pi)
    return float(np.abs((R - Pi) - rhs).max())


def value_iteration_hitting(
    P: StochasticMatrix,
    target: int,
    cap: int = 1_000_000,
    tol: float = 1e-12,
    blowup: float = 1e12,
) -> np.ndarray:
    """Minimal nonnegative hitting times by monotone iteration from zero.

    Iterates m <- 1 + P m with m(target) pinned to 0. The iterates increase
    monotonically to the minimal nonnegative solution; divergence (cap
    exceeded, or values past ``blowup``) signals transient or truncation
    pathology.
    """
    n = P.n
    if not 0 <= target < n:
        raise InvalidParameters(f"target state {target} out of range [0, {n})")
    m = np.zeros(n)
    Pe = P.entries
    for _ in range(cap):
        nxt = 1.0 + Pe @ m
        nxt[target] = 0.0
        inc = float(np.abs(nxt - m).max())
        m = nxt
        if inc <= tol * max(1.0, float(m.max())):
            return m
        if m.max() > blowup:
            raise DivergentHittingTimes(
                f"iterates exceeded {blowup:g}; chain looks transient toward {target}"
            )
    raise DivergentHittingTimes(f"no stabilization within {cap} iterations")


def canonical_pair(model: GalleryModel, magnitude: float = 0.01, seed: int = 0):
    """Deterministic seeded perturbation pair for a gallery model.

    Generator models are paired at generator level; use
    :func:`skeleton_pair` to study them through their common-step skeletons.
    """
    rng = np.random.default_rng([seed, 987654321])
    if model.kind == "dtmc":
        Pt, _ = _perturbed_dtmc(rng, model.chain, magnitude)
        if Pt is None:
            raise InvalidParameters(f"could not perturb model {model.name}")
        return PerturbationPair(model.chain, Pt)
    Qt, _ = _perturbed_ctmc(rng, model.chain, magnitude)
    if Qt is None:
        raise InvalidParameters(f"could not perturb model {model.name}")
    return PerturbationPair(model.chain, Qt)


def skeleton_pair(pair: PerturbationPair) -> PerturbationPair:
    """Common-step skeleton pair of a generator pair."""
    h = pair_step(pair.base, pair.perturbed)
    return PerturbationPair(
        uniformize(pair.base, h).matrix,
        uniformize(pair.perturbed, h).matrix,
    )


def identity_residuals(
    model: GalleryModel,
    magnitude: float = 0.01,
    seed: int = 0,
    taboo_state: int = 0,
) -> dict:
    """Residuals of the exact identities on a canonical perturbation.

    Returns the perturbation-identity and taboo-resolvent residuals for
    every model, plus the deviation-identity residual for aperiodic ones.
    Generator models are checked through their skeleton chains, where the
    identities live.
    """
    pair = canonical_pair(model, magnitude=magnitude, seed=seed)
    if model.kind == "ctmc":
        pair = skeleton_pair(pair)
    out = {
        "perturbation_identity": residual_perturbation_identity(pair),
        "taboo_inverse_identity": residual_taboo_inverse_identity(pair.base, taboo_state),
    }
    if pair.base.aperiodic:
        out["deviation_identity"] = residual_deviation_identity(pair)
    return out


# ---------------------------------------------------------------------------
# fuzzing


@dataclass
class BoundOutcome:
    bound_name: str
    bound_value: float
    gap: float
    ok: bool
    useless: bool


@dataclass
class FuzzCase:
    seed: tuple
    delta_norm: float
    gap: float
    outcomes: list[BoundOutcome] = field(default_factory=list)

    @property
    def violations(self) -> list[BoundOutcome]:
        return [o for o in self.outcomes if not o.ok]


@dataclass
class FuzzSummary:
    model: str
    kind: str
    magnitude: float
    n_cases: int
    cases: list[FuzzCase]
    skipped_bounds: dict
    n_rejected: int = 0

    @property
    def n_violations(self) -> int:
        return sum(len(c.violations) for c in self.cases)

    def tightness(self) -> dict:
        """Per-bound min/mean of bound_value / gap over cases with gap > 0."""
        ratios: dict[str, list[float]] = {}
        for c in self.cases:
            for o in c.outcomes:
                if o.gap > 0:
                    ratios.setdefault(o.bound_name, []).append(o.bound_value / o.gap)
        return {
            k: {"min": float(np.min(v)), "mean": float(np.mean(v)), "n": len(v)}
            for k, v in sorted(ratios.items())
        }


def _validity(gap: float, value: float) -> bool:
    return gap <= value * (1.0 + 1e-9) + 1e-15


def sample_dtmc_delta(rng, P: StochasticMatrix, magnitude: float) -> np.ndarray | None:
    """One attempt at a sparse signed perturbation of exact norm ``magnitude``.

    A few rows get 1-3 signed entries; each touched row is rebalanced
    through its largest off-diagonal entry so the row sums stay zero, then
    the whole matrix is scaled to the target max-absolute-row-sum norm.
    Entries too small to absorb a negative bump only receive positive ones.
    Returns None when the draw degenerates (caller retries).
    """
    n = P.n
    delta = np.zeros((n, n))
    n_rows = int(rng.integers(1, min(3, n) + 1))
    rows = rng.choice(n, size=n_rows, replace=False)
    for i in rows:
        off = P.entries[i].copy()
        off[i] = -1.0
        j_star = int(np.argmax(off))
        if P.entries[i, j_star] < 1.5 * magnitude:
            return None
        others = [j for j in range(n) if j != j_star]
        k = int(rng.integers(1, min(3, len(others)) + 1))
        cols = rng.choice(len(others), size=k, replace=False)
        for idx in cols:
            j = others[int(idx)]
            v = rng.normal()
            if P.entries[i, j] < 1.5 * magnitude:
                v = abs(v)
            delta[i, j] += v
        delta[i, j_star] -= delta[i].sum()
    nm = matrix_norm(delta)
    if nm <= 0:
        return None
    return delta * (magnitude / nm)


def sample_ctmc_delta(rng, Q: IntensityMatrix, magnitude: float) -> np.ndarray | None:
    """Conservative perturbation of exact norm: off-diagonal bumps balanced
    on the diagonal; negative bumps only where the rate can absorb them."""
    n = Q.n
    scale = Q.uniformization_constant
    delta = np.zeros((n, n))
    n_rows = int(rng.integers(1, min(3, n) + 1))
    rows = rng.choice(n, size=n_rows, replace=False)
    floor = 1.5 * magnitude
    for i in rows:
        others = [j for j in range(n) if j != i]
        k = int(rng.integers(1, min(3, len(others)) + 1))
        cols = rng.choice(len(others), size=k, replace=False)
        for idx in cols:
            j = others[int(idx)]
            v = rng.normal() * scale
            if Q.entries[i, j] < floor:
                v = abs(v)
            delta[i, j] += v
        delta[i, i] = -delta[i].sum()
    nm = matrix_norm(delta)
    if nm <= 0:
        return None
    return delta * (magnitude / nm)


def _perturbed_dtmc(rng, P, magnitude, tries=50):
    for _ in range(tries):
        delta = sample_dtmc_delta(rng, P, magnitude)
        if delta is None:
            continue
        try:
            Pt = StochasticMatrix(P.entries + delta, settings=P.settings)
        except ValidationError:
            continue
        if Pt.irreducible:
            return Pt, delta
    return None, None


def _perturbed_ctmc(rng, Q, magnitude, tries=50):
    for _ in range(tries):
        delta = sample_ctmc_delta(rng, Q, magnitude)
        if delta is None:
            continue
        try:
            Qt = IntensityMatrix(Q.entries + delta, settings=Q.settings)
        except ValidationError:
            continue
        if Qt.irreducible:
            return Qt, delta
    return None, None


def _dtmc_base_bounds(P, m_max):
    reports: list[BoundReport] = []
    skipped: dict[str, str] = {}
    try:
        reports.append(seneta_bound(P))
    except HypothesisFailed as exc:
        skipped["seneta"] = str(exc)
    reports.append(seneta_best_bound(P))
    try:
        rep, _ = small_set_bound(P, m_max=m_max)
        reports.append(rep)
    except HypothesisFailed as exc:
        skipped["small_set"] = str(exc)
    reports.append(hitting_time_bound(P))
    return reports, skipped


def _ctmc_base_bounds(Q):
    reports: list[BoundReport] = []
    skipped: dict[str, str] = {}
    reports.append(ctmc_deviation_bound(Q))
    try:
        reports.append(ctmc_lambda1_bound(Q))
    except HypothesisFailed as exc:
        skipped["ctmc_lambda1"] = str(exc)
    try:
        reports.append(ctmc_small_set_bound(Q))
    except HypothesisFailed as exc:
        skipped["ctmc_small_set"] = str(exc)
    try:
        v0 = ctmc_hitting_times(Q, 0)
        reports.append(ctmc_unit_drift_bound(Q, v0, 0))
    except (DriftViolated, DivergentHittingTimes) as exc:
        skipped["ctmc_unit_drift"] = str(exc)
    return reports, skipped


def _dtmc_v_setup(P, pi):
    """Geometric drift certificate from hitting times + 1 (bounded weights)."""
    try:
        V = 1.0 + hitting_times(P, 0)
        cert = fit_geometric_drift(P, V, 0, pi=pi)
        return cert
    except (DriftViolated, DivergentHittingTimes):
        return None


def fuzz_bounds(
    model: GalleryModel,
    n_cases: int = 1000,
    magnitude: float = 0.01,
    seed: int = 0,
    include_v_norm: bool = False,
    m_max: int = 8,
    skeleton_m: int = 2,
    skeleton_max_n: int = 32,
) -> FuzzSummary:
    """Randomized bound-validity check against exactly solved perturbations.

    Per case: draw an admissible perturbation of exact norm ``magnitude``,
    solve the perturbed stationary distribution, and check every
    hypothesis-satisfied bound against the exact gap. Violations are
    recorded, not raised; the summary must show zero of them. Any bound
    value at or above 2 is flagged useless (the gap between two probability
    measures never exceeds it).

    With ``include_v_norm`` the weighted-norm drift bounds run alongside:
    for transition-matrix models through a hitting-time-based certificate,
    for generator models through the batch-arrival certificate (when the
    model carries band coefficients), evaluated both in continuous form and
    transferred to the skeleton chain.
    """
    kind = model.kind
    cases: list[FuzzCase] = []
    n_rejected = 0

    if kind == "dtmc":
        P = model.chain
        pi = stationary_distribution(P)
        base_reports, skipped = _dtmc_base_bounds(P, m_max)
        v_cert = _dtmc_v_setup(P, pi) if include_v_norm else None
        use_skeleton = P.n <= skeleton_max_n
        for case_idx in range(n_cases):
            rng = np.random.default_rng([seed, case_idx])
            Pt, delta = _perturbed_dtmc(rng, P, magnitude)
            if Pt is None:
                n_rejected += 1
                continue
            nu = stationary_distribution(Pt)
            gap = total_variation_norm(nu.values - pi.values)
            dn = matrix_norm(delta)
            outcomes = []
            for rep in base_reports:
                val = rep.ell * dn
                outcomes.append(
                    BoundOutcome(rep.bound_name, val, gap, _validity(gap, val),
                                 val >= USELESS_THRESHOLD)
                )
            if use_skeleton:
                try:
                    rep = skeleton_bound(P, Pt, skeleton_m)
                    val = rep.direct_value
                    outcomes.append(
                        BoundOutcome(rep.bound_name, val, gap, _validity(gap, val),
                                     val >= USELESS_THRESHOLD)
                    )
                except HypothesisFailed as exc:
                    skipped.setdefault(f"skeleton[m={skeleton_m}]", str(exc))
            if v_cert is not None:
                W = v_cert.weights.values
                dv = v_norm_matrix(delta, W)
                gap_v = v_norm_measure(nu.values - pi.values, W)
                for fn, name in (
                    (lambda: v_bound_with_stationary(P, v_cert, pi, dv),
                     "v_norm_with_stationary"),
                    (lambda: v_bound_drift_only(v_cert, dv), "v_norm_drift_only"),
                ):
                    try:
                        rep = fn()
                        val = rep.direct_value
                        outcomes.append(
                            BoundOutcome(rep.bound_name, val, gap_v,
                                         _validity(gap_v, val), False)
                        )
                    except HypothesisFailed as exc:
                        skipped.setdefault(name, str(exc))
            cases.append(FuzzCase(seed=(seed, case_idx), delta_norm=dn, gap=gap,
                                  outcomes=outcomes))
    elif kind == "ctmc":
        Q = model.chain
        pi = ctmc_stationary(Q)
        base_reports, skipped = _ctmc_base_bounds(Q)
        v_cert = None
        pi_gth = None
        if include_v_norm and "a" in model.extras and "b" in model.extras:
            try:
                v_cert = batch_arrival_drift(model.extras["a"], model.extras["b"],
                                             n_states=Q.n)
                pi_gth = ctmc_stationary(Q, method="gth")
            except (InvalidParameters, NotErgodic, NoPositiveLambda) as exc:
                skipped["ctmc_v_norm"] = str(exc)
        for case_idx in range(n_cases):
            rng = np.random.default_rng([seed, case_idx])
            Qt, delta = _perturbed_ctmc(rng, Q, magnitude)
            if Qt is None:
                n_rejected += 1
                continue
            nu = ctmc_stationary(Qt)
            gap = total_variation_norm(nu.values - pi.values)
            dn = matrix_norm(delta)
            outcomes = []
            for rep in base_reports:
                val = rep.ell * dn
                outcomes.append(
                    BoundOutcome(rep.bound_name, val, gap, _validity(gap, val),
                                 val >= USELESS_THRESHOLD)
                )
            if v_cert is not None:
                W = v_cert.weights.values
                dv = v_norm_matrix(delta, W)
                nu_gth = ctmc_stationary(Qt, method="gth")
                gap_v = v_norm_measure(nu_gth.values - pi_gth.values, W)
                try:
                    rep = ctmc_v_bound_with_stationary(Q, v_cert, pi_gth, dv)
                    outcomes.append(BoundOutcome(rep.bound_name, rep.direct_value,
                                                 gap_v, _validity(gap_v, rep.direct_value),
                                                 False))
                except HypothesisFailed as exc:
                    skipped.setdefault("ctmc_v_norm_with_stationary", str(exc))
                try:
                    rep = ctmc_v_bound_drift_only(v_cert, dv)
                    outcomes.append(BoundOutcome(rep.bound_name, rep.direct_value,
                                                 gap_v, _validity(gap_v, rep.direct_value),
                                                 False))
                except HypothesisFailed as exc:
                    skipped.setdefault("ctmc_v_norm_drift_only", str(exc))
                # same certificate transferred to the skeleton chain: the
                # step cancels, so the value must coincide with the
                # continuous form; checked here against the same gap
                h = pair_step(Q, Qt)
                d_cert = transfer_drift_to_skeleton(v_cert, h)
                P_h = uniformize(Q, h)
                try:
                    rep = v_bound_with_stationary(P_h.matrix, d_cert, pi_gth, h * dv)
                    outcomes.append(BoundOutcome("v_norm_skeleton_transfer",
                                                 rep.direct_value, gap_v,
                                                 _validity(gap_v, rep.direct_value),
                                                 False))
                except HypothesisFailed as exc:
                    skipped.setdefault("v_norm_skeleton_transfer", str(exc))
            cases.append(FuzzCase(seed=(seed, case_idx), delta_norm=dn, gap=gap,
                                  outcomes=outcomes))
    else:
        raise InvalidParameters(f"unknown model kind {kind!r}")

    return FuzzSummary(
        model=model.name,
        kind=kind,
        magnitude=magnitude,
        n_cases=len(cases),
        cases=cases,
        skipped_bounds=skipped,
        n_rejected=n_rejected,
    )
