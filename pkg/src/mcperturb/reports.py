"""Bound reports: the named result of one perturbation bound.

A report records which hypotheses were checked, the bound's numeric
content, and (when a perturbed chain was supplied) the exactly computed
stationary gap together with a validity verdict. Bounds linear in the
perturbation size carry the coefficient ``ell`` (so gap <= ell * ||Delta||);
bounds that are nonlinear functions of the perturbation carry
``direct_value`` instead.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

__all__ = ["Hypothesis", "BoundReport", "USELESS_THRESHOLD"]

# any total-variation bound at or above this is vacuous: the gap between two
# probability measures never exceeds 2
USELESS_THRESHOLD = 2.0


@dataclass
class Hypothesis:
    name: str
    holds: bool
    detail: str = ""


@dataclass
class BoundReport:
    bound_name: str
    hypotheses: list[Hypothesis] = field(default_factory=list)
    ell: float | None = None
    direct_value: float | None = None
    delta_norm: float | None = None
    exact_gap: float | None = None
    valid: bool | None = None
    info: dict = field(default_factory=dict)

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    @property
    def bound_value(self) -> float | None:
        """Numeric bound on the stationary gap, when computable.

        Prefers the direct (tighter) form when present; otherwise the
        linear form ell * delta_norm when both pieces are known.
        """
        if self.direct_value is not None:
            return self.direct_value
        if self.ell is not None and self.delta_norm is not None:
            return self.ell * self.delta_norm
        return None

    @property
    def useless(self) -> bool | None:
        v = self.bound_value
        return None if v is None else bool(v >= USELESS_THRESHOLD)

    def with_exact_gap(self, gap: float, rel_slack: float = 1e-9) -> "BoundReport":
        """Attach an exactly computed gap and the validity verdict.

        ``valid`` is true when the bound value covers the gap up to a tiny
        relative slack for floating-point ties.
        """
        out = dataclasses.replace(self, exact_gap=float(gap))
        v = out.bound_value
        if v is not None and out.hypotheses_hold:
            out.valid = bool(gap <= v * (1.0 + rel_slack) + 1e-15)
        return out

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["bound_value"] = self.bound_value
        d["hypotheses_hold"] = self.hypotheses_hold
        d["useless"] = self.useless
        return d


def failed_report(bound_name: str, hypothesis: str, detail: str = "") -> BoundReport:
    """Report for a bound whose hypothesis failed (rendered, never raised)."""
    return BoundReport(
        bound_name=bound_name,
        hypotheses=[Hypothesis(hypothesis, False, detail)],
    )
