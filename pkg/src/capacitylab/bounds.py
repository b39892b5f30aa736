"""Entropy/capacity bounds assembled from computed spectral radii.

All bounds are reported in exponentiated form (e^h).  Every bound carries
two numbers: ``value``, computed from the point estimates, and
``safe_value``, computed from the certified enclosures of the inputs with
outward rounding, so it remains a valid bound despite numerical error.
Rigor classes: "rigorous" (proved inequality, converged inputs),
"conditional" (depends on an unproven recipe or monotonicity assumption),
"heuristic" (even/odd 1-vertex bracketing ansatz).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from mpmath import mp, mpf

from .graphs import find_friendly_colours
from .one_vertex import build_one_vertex_2d
from .operators import build_row_transfer_2d
from .spectral import IterationConfig, perron_radius


@dataclass
class EntropyBound:
    quantity: str      # "e^h2" | "e^h3"
    kind: str          # "lower" | "upper"
    rigor: str         # "rigorous" | "conditional" | "heuristic"
    value: object
    safe_value: object
    formula: str
    inputs: dict = field(default_factory=dict)

    def to_dict(self):
        return {"quantity": self.quantity, "kind": self.kind,
                "rigor": self.rigor, "value": str(self.value),
                "safe_value": str(self.safe_value), "formula": self.formula,
                "inputs": self.inputs}


def _require_converged(est, name):
    if not est.converged:
        raise ValueError(f"rigorous bound needs a converged estimate for {name}")


def _outward(x, direction, ulps=8):
    """Nudge x outward by a few ulps to absorb mpmath rounding."""
    eps = mpf(2) ** (ulps - mp.prec)
    return x * (1 + eps) if direction > 0 else x * (1 - eps)


def lower_bound_open_2d(rho_large, rho_small, p, digits=None):
    """e^h2 >= (rho_large / rho_small)^(1/p) for radii at row widths
    p + 2q + 1 and 2q + 1 of an isotropic symmetric system."""
    _require_converged(rho_large, "numerator")
    _require_converged(rho_small, "denominator")
    if p < 1:
        raise ValueError("p must be >= 1")
    digits = digits or rho_large.precision_digits
    with mp.workdps(digits + 10):
        value = (rho_large.value / rho_small.value) ** (mpf(1) / p)
        safe = _outward((rho_large.cw_lower / rho_small.cw_upper) ** (mpf(1) / p), -1)
    return EntropyBound("e^h2", "lower", "rigorous", value, safe,
                        formula=f"(rho_large/rho_small)^(1/{p})",
                        inputs={"p": p,
                                "rho_large": str(rho_large.value),
                                "rho_small": str(rho_small.value)})


def upper_bound_open_2d(rho, n, digits=None):
    """e^h2 <= rho(T_n)^(1/n)."""
    _require_converged(rho, "rho")
    digits = digits or rho.precision_digits
    with mp.workdps(digits + 10):
        value = rho.value ** (mpf(1) / n)
        safe = _outward(rho.cw_upper ** (mpf(1) / n), +1)
    return EntropyBound("e^h2", "upper", "rigorous", value, safe,
                        formula=f"rho(T_{n})^(1/{n})",
                        inputs={"n": n, "rho": str(rho.value)})


def lower_bound_periodic_2d(rho_big, rho_small, p, q, digits=None):
    """e^h2 >= (rho(T_{p+2q,per}) / rho(T_{2q,per}))^(1/p); for q = 0 the
    denominator is the spectral radius of the constraint graph itself."""
    _require_converged(rho_big, "numerator")
    _require_converged(rho_small, "denominator")
    if p < 1 or q < 0:
        raise ValueError("need p >= 1, q >= 0")
    digits = digits or rho_big.precision_digits
    with mp.workdps(digits + 10):
        value = (rho_big.value / rho_small.value) ** (mpf(1) / p)
        safe = _outward((rho_big.cw_lower / rho_small.cw_upper) ** (mpf(1) / p), -1)
    return EntropyBound("e^h2", "lower", "rigorous", value, safe,
                        formula=f"(rho(T_per_{p + 2 * q})/rho(T_per_{2 * q}))^(1/{p})",
                        inputs={"p": p, "q": q,
                                "rho_big": str(rho_big.value),
                                "rho_small": str(rho_small.value)})


def upper_bound_periodic_2d(rho, torus_size, digits=None):
    """e^h2 <= rho(T_{2n,per})^(1/2n); valid for even torus sizes only."""
    if torus_size % 2 != 0:
        raise ValueError("the periodic upper bound holds for even torus sizes only")
    _require_converged(rho, "rho")
    digits = digits or rho.precision_digits
    with mp.workdps(digits + 10):
        value = rho.value ** (mpf(1) / torus_size)
        safe = _outward(rho.cw_upper ** (mpf(1) / torus_size), +1)
    return EntropyBound("e^h2", "upper", "rigorous", value, safe,
                        formula=f"rho(T_per_{torus_size})^(1/{torus_size})",
                        inputs={"torus_size": torus_size, "rho": str(rho.value)})


def bounds_periodic_2d(rho_big, rho_small, p, q, rho_even, torus_size,
                       digits=None):
    """The periodic lower/upper bound pair."""
    return (lower_bound_periodic_2d(rho_big, rho_small, p, q, digits=digits),
            upper_bound_periodic_2d(rho_even, torus_size, digits=digits))


def upper_bound_periodic_3d(rho, m1, m2, digits=None):
    """e^h3 <= rho(T_{(m1,m2),per})^(1/(m1*m2)) for even torus sides."""
    if m1 % 2 != 0 or m2 % 2 != 0:
        raise ValueError("the 3D periodic upper bound needs even torus sides")
    _require_converged(rho, "rho")
    digits = digits or rho.precision_digits
    with mp.workdps(digits + 10):
        value = rho.value ** (mpf(1) / (m1 * m2))
        safe = _outward(rho.cw_upper ** (mpf(1) / (m1 * m2)), +1)
    return EntropyBound("e^h3", "upper", "rigorous", value, safe,
                        formula=f"rho(T_per_({m1},{m2}))^(1/{m1 * m2})",
                        inputs={"m1": m1, "m2": m2, "rho": str(rho.value)})


def corner_ratio_lower_bound_3d(rho_11, rho_21, rho_12, rho_22, m1, m2,
                                digits=None):
    """Corner-ratio estimate e^h3 >= rho_22 * rho_11 / (rho_21 * rho_12)
    over slab sizes (m1,m2), (m1+1,m2), (m1,m2+1), (m1+1,m2+1).

    Marked conditional: the published 3D lower-bound recipe this imitates
    is not fully specified, so the result is an estimate, not a theorem.
    """
    ests = {"rho_11": (rho_11, (m1, m2)), "rho_21": (rho_21, (m1 + 1, m2)),
            "rho_12": (rho_12, (m1, m2 + 1)), "rho_22": (rho_22, (m1 + 1, m2 + 1))}
    for name, (est, expect) in ests.items():
        _require_converged(est, name)
        geom = est.meta.get("geometry")
        if geom is not None and tuple(geom) != expect:
            raise ValueError(f"size pattern mismatch: {name} has geometry "
                             f"{tuple(geom)}, expected {expect}")
    digits = digits or rho_22.precision_digits
    with mp.workdps(digits + 10):
        value = rho_22.value * rho_11.value / (rho_21.value * rho_12.value)
        safe = _outward(rho_22.cw_lower * rho_11.cw_lower
                        / (rho_21.cw_upper * rho_12.cw_upper), -1)
    return EntropyBound("e^h3", "lower", "conditional", value, safe,
                        formula="rho_22*rho_11/(rho_21*rho_12)",
                        inputs={"m1": m1, "m2": m2,
                                **{k: str(v[0].value) for k, v in ests.items()}})


# ---------------------------------------------------------------------------
# diagnostics built on computed radii

@dataclass
class SandwichReport:
    """Slack of log rho(T_{n-1,per})/n <= log rho(S_n) <=
    min(log rho(T_n)/n, log rho(T_{n+1,per})/n)."""

    n: int
    log_one_vertex: object
    lower: object
    upper: object
    gap_lower: object
    gap_upper: object

    @property
    def ok(self):
        return self.gap_lower >= 0 and self.gap_upper >= 0


def sandwich_check_one_vertex(sys, n, cfg=None, estimates=None):
    """Evaluate the 1-vertex sandwich inequalities for an isotropic
    symmetric system at width n; a violation indicates a bug (or an
    injected fault) somewhere in the operator stack."""
    if not (sys.isotropic and sys.symmetric):
        raise ValueError("the sandwich inequalities need an isotropic symmetric system")
    if n < 2:
        raise ValueError("n must be >= 2")
    cfg = cfg or IterationConfig()
    if estimates is None:
        estimates = {
            "T_per_nm1": perron_radius(
                build_row_transfer_2d(sys, n - 1, "periodic"), cfg),
            "S_n": perron_radius(build_one_vertex_2d(sys, n), cfg),
            "T_n": perron_radius(build_row_transfer_2d(sys, n, "open"), cfg),
            "T_per_np1": perron_radius(
                build_row_transfer_2d(sys, n + 1, "periodic"), cfg),
        }
    with mp.workdps(cfg.precision_digits + 10):
        log_s = mp.log(estimates["S_n"].value)
        lower = mp.log(estimates["T_per_nm1"].value) / n
        upper = min(mp.log(estimates["T_n"].value) / n,
                    mp.log(estimates["T_per_np1"].value) / n)
        return SandwichReport(n, log_s, lower, upper,
                              gap_lower=log_s - lower, gap_upper=upper - log_s)


@dataclass
class FriendlyBoundReport:
    n: int
    lhs: object   # log rho(R_n) / (n+1)
    rhs: object   # log rho(P_{n+1})
    slack: object

    @property
    def holds(self):
        return self.slack >= 0


def friendly_lower_bound_2d(sys, rho_r, n, rho_p, digits=40):
    """Check log rho(R_{n,2})/(n+1) <= log rho(P_{n+1,2}); requires the
    system to have a friendly colour (the hypothesis of the inequality)."""
    if not find_friendly_colours(sys):
        raise ValueError(f"system {sys.name} has no friendly colour; "
                         "the 1-vertex lower bound does not apply")
    _require_converged(rho_r, "rho_R")
    _require_converged(rho_p, "rho_P")
    with mp.workdps(digits + 10):
        lhs = mp.log(rho_r.value) / (n + 1)
        rhs = mp.log(rho_p.value)
        return FriendlyBoundReport(n, lhs, rhs, rhs - lhs)


@dataclass
class HeuristicBracketReport:
    even_values: list            # [(n, value)] ascending n
    odd_values: list
    even_increasing: bool
    odd_decreasing: bool
    bracket: object              # (lower, upper) or None
    violation: str = ""


def heuristic_bracket_2d(values):
    """Even/odd 1-vertex bracket: if the even-width radii increase and the
    odd-width radii decrease over the provided values, return
    (max even, min odd) as a heuristic bracket for e^h2."""
    evens = sorted((n, v) for n, v in values if n % 2 == 0)
    odds = sorted((n, v) for n, v in values if n % 2 == 1)
    even_inc = all(a[1] < b[1] for a, b in zip(evens, evens[1:]))
    odd_dec = all(a[1] > b[1] for a, b in zip(odds, odds[1:]))
    violation = ""
    if not even_inc:
        bad = next((a, b) for a, b in zip(evens, evens[1:]) if not a[1] < b[1])
        violation = f"even subsequence not increasing at n={bad[0][0]}->{bad[1][0]}"
    elif not odd_dec:
        bad = next((a, b) for a, b in zip(odds, odds[1:]) if not a[1] > b[1])
        violation = f"odd subsequence not decreasing at n={bad[0][0]}->{bad[1][0]}"
    bracket = None
    if even_inc and odd_dec and evens and odds:
        bracket = (evens[-1][1], odds[-1][1])
    return HeuristicBracketReport(evens, odds, even_inc, odd_dec, bracket,
                                  violation)


# ---------------------------------------------------------------------------
# reporting

@dataclass
class BoundReport:
    best_lower: object
    best_upper: object
    conditional: list
    heuristic: list
    all_bounds: list

    def to_dict(self):
        return {
            "best_rigorous_lower": self.best_lower.to_dict() if self.best_lower else None,
            "best_rigorous_upper": self.best_upper.to_dict() if self.best_upper else None,
            "conditional": [b.to_dict() for b in self.conditional],
            "heuristic": [b.to_dict() for b in self.heuristic],
            "all": [b.to_dict() for b in self.all_bounds],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self):
        lines = []
        if self.best_lower:
            lines.append(f"best rigorous lower: {self.best_lower.safe_value} "
                         f"({self.best_lower.formula})")
        if self.best_upper:
            lines.append(f"best rigorous upper: {self.best_upper.safe_value} "
                         f"({self.best_upper.formula})")
        for b in self.conditional:
            lines.append(f"conditional {b.kind}: {b.value} ({b.formula})")
        for b in self.heuristic:
            lines.append(f"heuristic {b.kind}: {b.value} ({b.formula})")
        if not lines:
            lines.append("no bounds")
        return "\n".join(lines)


def bound_report(bounds):
    """Classify a list of EntropyBounds and pick the best rigorous pair."""
    rig_lower = [b for b in bounds if b.rigor == "rigorous" and b.kind == "lower"]
    rig_upper = [b for b in bounds if b.rigor == "rigorous" and b.kind == "upper"]
    best_lower = max(rig_lower, key=lambda b: b.safe_value, default=None)
    best_upper = min(rig_upper, key=lambda b: b.safe_value, default=None)
    return BoundReport(
        best_lower=best_lower, best_upper=best_upper,
        conditional=[b for b in bounds if b.rigor == "conditional"],
        heuristic=[b for b in bounds if b.rigor == "heuristic"],
        all_bounds=list(bounds))
