"""One-call aggregation of every applicable bound for a chain.

Hypothesis failures are rendered inline as reports with a failed
hypothesis, never raised, so a caller always gets the full table. When a
perturbed chain is supplied, every report carries the exactly computed gap
in its norm and a validity verdict.
"""

from __future__ import annotations

import numpy as np

from .chains import IntensityMatrix, StochasticMatrix, WeightFunction
from .ctmc import (
    CtmcGeometricDriftCertificate,
    ctmc_deviation_bound,
    ctmc_hitting_times,
    ctmc_lambda1_bound,
    ctmc_small_set_bound,
    ctmc_stationary,
    ctmc_unit_drift_bound,
    ctmc_v_bound_drift_only,
    ctmc_v_bound_with_stationary,
    fit_ctmc_geometric_drift,
)
from .dtmc import (
    UnitDriftCertificate,
    fit_geometric_drift,
    hitting_time_bound,
    seneta_best_bound,
    seneta_bound,
    skeleton_bound,
    small_set_bound,
    unit_drift_bound,
    v_bound_drift_only,
    v_bound_with_stationary,
)
from .errors import (
    DivergentHittingTimes,
    DriftViolated,
    HypothesisFailed,
    McPerturbError,
    NoPositiveLambda,
)
from .norms import matrix_norm, total_variation_norm, v_norm_matrix, v_norm_measure
from .reports import BoundReport, Hypothesis, failed_report
from .solvers import stationary_distribution

__all__ = ["bound_catalog"]


def _guard(reports, name, fn):
    try:
        rep = fn()
        reports.append(rep)
        return rep
    except HypothesisFailed as exc:
        reports.append(failed_report(name, exc.hypothesis, exc.detail))
    except (DriftViolated, DivergentHittingTimes, NoPositiveLambda) as exc:
        reports.append(failed_report(name, "certificate valid", str(exc)))
    return None


def _dtmc_catalog(P, perturbed, m_max, weights, taboo_state, skeleton_m):
    pi = stationary_distribution(P)
    delta_norm = None
    if perturbed is not None:
        delta_norm = matrix_norm(perturbed.entries - P.entries)
    reports: list[BoundReport] = []
    _guard(reports, "seneta", lambda: seneta_bound(P, delta_norm))
    _guard(reports, "seneta_best", lambda: seneta_best_bound(P, pi, delta_norm))
    _guard(reports, "small_set",
           lambda: small_set_bound(P, m_max=m_max, perturbed=perturbed,
                                   delta_norm=delta_norm)[0])
    _guard(reports, "hitting_time_drift", lambda: hitting_time_bound(P, delta_norm))
    if perturbed is not None:
        _guard(reports, f"skeleton[m={skeleton_m}]",
               lambda: skeleton_bound(P, perturbed, skeleton_m))
    for rep in reports:
        rep.info.setdefault("norm", "tv")

    if weights is not None:
        W = weights.values if isinstance(weights, WeightFunction) else np.asarray(weights)
        if float(np.min(W)) <= 0:
            cert_unit = UnitDriftCertificate(taboo_state, np.asarray(W, dtype=float))
            rep = _guard(reports, "unit_drift",
                         lambda: unit_drift_bound(P, cert_unit, delta_norm))
            if rep is not None:
                rep.info["norm"] = "tv"
        else:
            wf = weights if isinstance(weights, WeightFunction) else WeightFunction(W)
            try:
                cert = fit_geometric_drift(P, wf, taboo_state, pi=pi)
            except DriftViolated as exc:
                reports.append(failed_report("v_norm_drift_fit", "geometric drift", str(exc)))
                cert = None
            if cert is not None:
                if perturbed is not None:
                    dv = v_norm_matrix(perturbed.entries - P.entries, wf)
                    r1 = _guard(reports, "v_norm_with_stationary",
                                lambda: v_bound_with_stationary(P, cert, pi, dv))
                    r2 = _guard(reports, "v_norm_drift_only",
                                lambda: v_bound_drift_only(cert, dv))
                    for rep in (r1, r2):
                        if rep is not None:
                            rep.info["norm"] = "v"
                else:
                    reports.append(BoundReport(
                        bound_name="v_norm_certificate",
                        hypotheses=[Hypothesis("geometric drift certificate", True,
                                               f"lambda = {cert.lam:.6g}, b = {cert.b:.6g}")],
                        info={"norm": "v", "lambda": cert.lam, "b": cert.b,
                              "pi_v": cert.pi_value},
                    ))
    if perturbed is not None:
        nu = stationary_distribution(perturbed)
        gap_tv = total_variation_norm(nu.values - pi.values)
        gap_v = None
        if weights is not None and isinstance(weights, WeightFunction):
            gap_v = v_norm_measure(nu.values - pi.values, weights)
        reports = [
            rep.with_exact_gap(gap_v if rep.info.get("norm") == "v" else gap_tv)
            if rep.bound_value is not None and
               (rep.info.get("norm") != "v" or gap_v is not None)
            else rep
            for rep in reports
        ]
    return reports


def _ctmc_catalog(Q, perturbed, weights, taboo_state):
    pi = ctmc_stationary(Q)
    delta_norm = None
    if perturbed is not None:
        delta_norm = matrix_norm(perturbed.entries - Q.entries)
    reports: list[BoundReport] = []
    _guard(reports, "ctmc_deviation", lambda: ctmc_deviation_bound(Q, delta_norm))
    _guard(reports, "ctmc_lambda1", lambda: ctmc_lambda1_bound(Q, delta_norm))
    _guard(reports, "ctmc_small_set", lambda: ctmc_small_set_bound(Q, delta_norm))

    def _unit():
        v0 = ctmc_hitting_times(Q, taboo_state)
        return ctmc_unit_drift_bound(Q, v0, taboo_state, delta_norm)

    _guard(reports, "ctmc_unit_drift", _unit)
    for rep in reports:
        rep.info.setdefault("norm", "tv")

    cert: CtmcGeometricDriftCertificate | None = None
    if weights is not None:
        wf = weights if isinstance(weights, WeightFunction) else WeightFunction(weights)
        try:
            cert = fit_ctmc_geometric_drift(Q, wf, taboo_state)
        except (NoPositiveLambda, DriftViolated) as exc:
            reports.append(failed_report("ctmc_v_norm_drift_fit", "generator drift", str(exc)))
    gap_v = None
    if perturbed is not None:
        nu = ctmc_stationary(perturbed)
        gap_tv = total_variation_norm(nu.values - pi.values)
        if cert is not None:
            pi_g = ctmc_stationary(Q, method="gth")
            nu_g = ctmc_stationary(perturbed, method="gth")
            dv = v_norm_matrix(perturbed.entries - Q.entries, cert.weights)
            gap_v = v_norm_measure(nu_g.values - pi_g.values, cert.weights)
            r1 = _guard(reports, "ctmc_v_norm_with_stationary",
                        lambda: ctmc_v_bound_with_stationary(Q, cert, pi_g, dv))
            r2 = _guard(reports, "ctmc_v_norm_drift_only",
                        lambda: ctmc_v_bound_drift_only(cert, dv))
            for rep in (r1, r2):
                if rep is not None:
                    rep.info["norm"] = "v"
        reports = [
            rep.with_exact_gap(gap_v if rep.info.get("norm") == "v" else gap_tv)
            if rep.bound_value is not None and
               (rep.info.get("norm") != "v" or gap_v is not None)
            else rep
            for rep in reports
        ]
    elif cert is not None:
        reports.append(BoundReport(
            bound_name="ctmc_v_norm_certificate",
            hypotheses=[Hypothesis("generator drift certificate", True,
                                   f"lambda = {cert.lam:.6g}, b = {cert.b:.6g}")],
            info={"norm": "v", "lambda": cert.lam, "b": cert.b},
        ))
    return reports


def bound_catalog(
    chain: StochasticMatrix | IntensityMatrix,
    perturbed=None,
    m_max: int = 8,
    weights: WeightFunction | None = None,
    taboo_state: int = 0,
    skeleton_m: int = 2,
) -> list[BoundReport]:
    """Every applicable bound for the chain, with failures rendered inline.

    ``weights`` switches on the drift-based bounds: strictly positive
    weights are fitted as a geometric drift certificate (weighted-norm
    bounds); a vector with zeros is treated as a unit-drift function with
    ``taboo_state`` as its zero.
    """
    if isinstance(chain, StochasticMatrix):
        return _dtmc_catalog(chain, perturbed, m_max, weights, taboo_state, skeleton_m)
    if isinstance(chain, IntensityMatrix):
        return _ctmc_catalog(chain, perturbed, weights, taboo_state)
    raise McPerturbError(f"unsupported chain type {type(chain).__name__}")
