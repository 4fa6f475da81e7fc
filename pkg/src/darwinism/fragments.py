"""Fragment averaging, the deficit fragment size, and redundancy definitions.

The averaged fragment information is an exact hypergeometric expectation over
compositions; it is monotone non-decreasing in the fragment size, so the
smallest qualifying size is found by bisection and the whole machinery stays
O(smaller class * log n_total) even for 1e9-spin environments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import qcb
from .errors import DeficitUnreachableError, SpecValidationError
from .info import binary_entropy, holevo_from_overlap
from .model import (
    DeficitSpec,
    EnvironmentSpec,
    composition_support,
    log_binomial,
    validate_deficit,
    validate_spec,
)

CURVE_METHODS = ("exact", "monte-carlo", "qcb-asymptotic")


@dataclass(frozen=True)
class CurvePoint:
    fragment_size: int
    avg_info: float
    method: str
    stderr: Optional[float] = None


@dataclass(frozen=True)
class InfoCurve:
    """Averaged information versus fragment size, with provenance labels."""

    entries: tuple[CurvePoint, ...]

    def __post_init__(self):
        sizes = [e.fragment_size for e in self.entries]
        if sizes != sorted(set(sizes)):
            raise SpecValidationError("fragment sizes must be strictly increasing")
        for e in self.entries:
            if e.method not in CURVE_METHODS:
                raise SpecValidationError(f"unknown curve method {e.method!r}")
            if e.method == "exact" and e.stderr is not None:
                raise SpecValidationError("exact entries carry no standard error")
            if e.avg_info < -1e-12:
                raise SpecValidationError("negative information value")


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float


@dataclass(frozen=True)
class RedundancyReport:
    """Both redundancy definitions plus the Chernoff estimates and flags.

    validity_flags may contain "qcb_valid", "max_formula_valid" and
    "deficit_unreachable" (the last only when a secondary route fell short
    while the averaging route succeeded).  Estimate fields are None when the
    corresponding route does not apply (delta = 1, gamma2_bad < 1, or an
    unreachable maximization route).
    """

    f_delta: int
    f_delta_interpolated: float
    r_avg: float
    r_max_discrete: Optional[int]
    r_max_continuous: Optional[float]
    r_qcb: Optional[float]
    r_qcb_expanded: Optional[float]
    ratio_avg_over_max: Optional[float]
    validity_flags: frozenset[str]


def p_all_bad(spec: EnvironmentSpec, fragment_size: int) -> float:
    """Probability that a uniform fragment misses every good spin.

    Equals the product (n_bad/n)((n_bad-1)/(n-1))... and, identically, the
    hypergeometric pmf at f_bad = fragment_size; evaluated in log space.
    """
    validate_spec(spec)
    if not (0 <= fragment_size <= spec.n_total):
        raise SpecValidationError(
            f"fragment_size {fragment_size} outside [0, {spec.n_total}]"
        )
    if fragment_size > spec.n_bad:
        return 0.0
    return math.exp(
        log_binomial(spec.n_bad, fragment_size) - log_binomial(spec.n_total, fragment_size)
    )


def avg_holevo_exact(spec: EnvironmentSpec, fragment_size: int) -> float:
    """Fragment-averaged Holevo quantity in bits, exact over compositions.

    Expectation of holevo_from_overlap over the hypergeometric composition
    law.  For the perfect model this collapses to H_S * (1 - P_all_bad);
    monotone non-decreasing in the fragment size in general.
    """
    validate_spec(spec)
    if fragment_size == 0:
        return 0.0
    f_bad, weights = composition_support(spec, fragment_size)
    f_good = fragment_size - f_bad
    overlaps = np.power(spec.gamma2_good, f_good.astype(np.float64)) * np.power(
        spec.gamma2_bad, f_bad.astype(np.float64)
    )
    chi = holevo_from_overlap(overlaps, spec.p0)
    value = float(weights @ np.atleast_1d(chi))
    # weight-sum rounding can push the value an ulp past the analytic range
    return min(max(value, 0.0), binary_entropy(spec.p0))


def find_fragment_size(spec: EnvironmentSpec, deficit: DeficitSpec) -> int:
    """Smallest fragment size whose averaged Holevo reaches (1-delta) * H_S.

    The threshold is closed (>= target qualifies).  delta = 1 returns 1:
    every fragment trivially carries at least zero information.  Raises
    DeficitUnreachableError when even the whole environment falls short.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    target = (1.0 - deficit.delta) * binary_entropy(spec.p0)
    if avg_holevo_exact(spec, spec.n_total) < target:
        raise DeficitUnreachableError(
            f"even the full environment reaches only "
            f"{avg_holevo_exact(spec, spec.n_total):.6g} of {target:.6g} bits"
        )
    lo, hi = 1, spec.n_total
    while lo < hi:
        mid = (lo + hi) // 2
        if avg_holevo_exact(spec, mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def crossing_fragment_size(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Linear interpolation of the deficit crossing; diagnostic only.

    Observers intercept whole spins, so the integer from find_fragment_size
    is the operative value; this reports where the continuous curve crosses.
    """
    f = find_fragment_size(spec, deficit)
    target = (1.0 - deficit.delta) * binary_entropy(spec.p0)
    hi_val = avg_holevo_exact(spec, f)
    lo_val = avg_holevo_exact(spec, f - 1) if f >= 1 else 0.0
    if hi_val <= lo_val:
        return float(f)
    return (f - 1) + (target - lo_val) / (hi_val - lo_val)


def redundancy_avg(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Averaging-based redundancy n_total / fragment size at the deficit.

    delta = 1 returns n_total by the zero-information convention (every
    environment spin holds at least zero information).
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if deficit.delta == 1.0:
        return float(spec.n_total)
    return spec.n_total / find_fragment_size(spec, deficit)


def min_good_spins(spec: EnvironmentSpec, deficit: DeficitSpec) -> int:
    """Smallest all-good fragment reaching (1-delta) * H_S.

    Bad spins are free filler for disjoint fragments, so only good spins
    limit the count.  Raises DeficitUnreachableError when even all n_good
    good spins fall short.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    target = (1.0 - deficit.delta) * binary_entropy(spec.p0)

    def chi(k: int) -> float:
        return holevo_from_overlap(spec.gamma2_good**k, spec.p0)

    if spec.n_good < 1 or chi(spec.n_good) < target:
        raise DeficitUnreachableError(
            f"{spec.n_good} good spins reach only "
            f"{chi(spec.n_good) if spec.n_good else 0.0:.6g} of {target:.6g} bits"
        )
    lo, hi = 1, spec.n_good
    while lo < hi:
        mid = (lo + hi) // 2
        if chi(mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def redundancy_max(spec: EnvironmentSpec, deficit: DeficitSpec) -> int:
    """Maximization-based redundancy: disjoint fragments at the deficit.

    floor(n_good / k) with k the minimal per-fragment good-spin count; the
    perfect model gives n_good for every delta < 1.  delta = 1 jumps to
    n_total by the same convention as redundancy_avg.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if deficit.delta == 1.0:
        return spec.n_total
    return spec.n_good // min_good_spins(spec, deficit)


def mc_avg_holevo(
    spec: EnvironmentSpec, fragment_size: int, n_samples: int, seed: int
) -> MonteCarloEstimate:
    """Monte Carlo fragment-averaged Holevo with its standard error.

    Samples the composition directly from the hypergeometric law, which is
    equivalent to sampling spin subsets under permutation invariance and a
    fragment-size factor faster.  Deterministic for a given seed.
    """
    validate_spec(spec)
    if not (0 <= fragment_size <= spec.n_total):
        raise SpecValidationError(
            f"fragment_size {fragment_size} outside [0, {spec.n_total}]"
        )
    if n_samples < 2:
        raise SpecValidationError("n_samples must be >= 2")
    if max(spec.n_good, spec.n_bad) >= 10**9:
        raise SpecValidationError(
            "Monte Carlo sampling requires each spin class below 1e9; "
            "use the exact route at this scale"
        )
    rng = np.random.default_rng(seed)
    if fragment_size == 0:
        f_bad = np.zeros(n_samples, dtype=np.int64)
    else:
        f_bad = rng.hypergeometric(spec.n_bad, spec.n_good, fragment_size, size=n_samples)
    f_good = fragment_size - f_bad
    overlaps = np.power(spec.gamma2_good, f_good.astype(np.float64)) * np.power(
        spec.gamma2_bad, f_bad.astype(np.float64)
    )
    chi = np.atleast_1d(holevo_from_overlap(overlaps, spec.p0))
    value = float(chi.mean())
    stderr = float(chi.std(ddof=1) / math.sqrt(n_samples))
    return MonteCarloEstimate(value=value, stderr=stderr)


def stirling_fragment_size(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Stirling-limit deficit fragment size n_bad * ln(1/delta) / n_good.

    Perfect-model asymptote for n_bad >> n_good; returned unrounded so its
    gap to the exact search is visible.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if spec.n_good == 0:
        raise SpecValidationError("Stirling estimate needs at least one good spin")
    return spec.n_bad * math.log(1.0 / deficit.delta) / spec.n_good


def info_curve(
    spec: EnvironmentSpec,
    sizes: range | list[int],
    method: str = "exact",
    n_samples: int = 100_000,
    seed: int = 0,
) -> InfoCurve:
    """Averaged-information curve over the given fragment sizes.

    Monte Carlo entries use a per-size stream derived from (seed, size), so
    the curve is reproducible however the sizes are scheduled.
    """
    validate_spec(spec)
    if method not in CURVE_METHODS:
        raise SpecValidationError(f"unknown curve method {method!r}")
    entries = []
    for f in sizes:
        if method == "exact":
            entries.append(CurvePoint(f, avg_holevo_exact(spec, f), "exact"))
        elif method == "monte-carlo":
            est = mc_avg_holevo(spec, f, n_samples, seed=split_seed(seed, f))
            entries.append(CurvePoint(f, est.value, "monte-carlo", est.stderr))
        else:
            entries.append(CurvePoint(f, qcb.holevo_asymptotic(spec, f), "qcb-asymptotic"))
    return InfoCurve(entries=tuple(entries))


def split_seed(seed: int, task_key: int) -> int:
    """Deterministic per-task seed derived from a root seed and a task key."""
    return int(np.random.SeedSequence([seed, task_key]).generate_state(1)[0])


def redundancy_report(spec: EnvironmentSpec, deficit: DeficitSpec) -> RedundancyReport:
    """Full report: both definitions, Chernoff estimates, validity flags.

    Raises DeficitUnreachableError when the averaging route fails; a failing
    maximization route only flags the report.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    flags = set()
    delta = deficit.delta

    if delta == 1.0:
        f_delta, f_interp = 1, 1.0
        r_avg: float = float(spec.n_total)
    else:
        f_delta = find_fragment_size(spec, deficit)
        f_interp = crossing_fragment_size(spec, deficit)
        r_avg = spec.n_total / f_delta

    r_max: Optional[int]
    try:
        r_max = redundancy_max(spec, deficit)
    except DeficitUnreachableError:
        r_max = None
        flags.add("deficit_unreachable")

    if delta < 1.0:
        r_max_cont: Optional[float] = qcb.redundancy_max_qcb(spec, deficit)
        r_qcb: Optional[float] = qcb.redundancy_qcb(spec, deficit)
        if qcb.qcb_estimate_valid(spec, deficit):
            flags.add("qcb_valid")
        if deficit.delta <= spec.gamma2_good < 1.0:
            flags.add("max_formula_valid")
        r_qcb_exp: Optional[float] = (
            qcb.redundancy_goodbad_expanded(spec, deficit)
            if spec.gamma2_bad == 1.0
            else None
        )
    else:
        r_max_cont = r_qcb = r_qcb_exp = None

    ratio = r_avg / r_max if r_max else None
    return RedundancyReport(
        f_delta=f_delta,
        f_delta_interpolated=f_interp,
        r_avg=r_avg,
        r_max_discrete=r_max,
        r_max_continuous=r_max_cont,
        r_qcb=r_qcb,
        r_qcb_expanded=r_qcb_exp,
        ratio_avg_over_max=ratio,
        validity_flags=frozenset(flags),
    )
