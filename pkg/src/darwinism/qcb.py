"""Chernoff-bound asymptotics for record distinguishability.

The per-spin distinguishability exponent for pure dephasing is the squared
conditional-state overlap itself, with the Chernoff parameter fixed at 1/2;
the environment-typical exponent is minus the log of the class-averaged
overlap.  Entropies stay in bits, the exponent is in nats per intercepted
spin, and the two only meet through the dimensionless error probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SpecValidationError
from .info import binary_entropy
from .model import DeficitSpec, EnvironmentSpec, validate_deficit, validate_spec


@dataclass(frozen=True)
class ChernoffExponent:
    """Typical discrimination exponent, nats per intercepted spin.

    ``divergent`` marks the perfectly distinguishable case (class-averaged
    overlap 0), where every single spin identifies the branch; the value is
    then +inf, a first-class flagged state rather than an error.
    """

    value: float
    divergent: bool = False


@dataclass(frozen=True)
class DefinitionRatio:
    """Value of the redundancy-definition ratio with boundary/validity flags."""

    value: float
    at_boundary: bool
    in_qcb_region: bool


def typical_chernoff(spec: EnvironmentSpec) -> ChernoffExponent:
    """Exponent -ln of the class-averaged per-spin squared overlap."""
    validate_spec(spec)
    mean_overlap = (
        spec.n_bad * spec.gamma2_bad + spec.n_good * spec.gamma2_good
    ) / spec.n_total
    if mean_overlap == 0.0:
        return ChernoffExponent(math.inf, divergent=True)
    return ChernoffExponent(-math.log(mean_overlap), divergent=False)


def error_probability(xi: ChernoffExponent, fragment_size: int) -> float:
    """Asymptotic branch-discrimination error exp(-xi * fragment_size).

    The prefactor is fixed to 1 (it only rescales, never changes the decay);
    consumers clamp to 1/2 before feeding a binary entropy.  A divergent
    exponent discriminates perfectly from the first spin.
    """
    if fragment_size < 0:
        raise SpecValidationError("fragment_size must be >= 0")
    if fragment_size == 0:
        return 1.0
    if xi.divergent:
        return 0.0
    return math.exp(-xi.value * fragment_size)


def holevo_asymptotic(spec: EnvironmentSpec, fragment_size: int) -> float:
    """Fano-route fragment information H_S - H(P_e), floored at 0 bits."""
    validate_spec(spec)
    pe = min(error_probability(typical_chernoff(spec), fragment_size), 0.5)
    h_s = binary_entropy(spec.p0)
    return max(h_s - binary_entropy(pe), 0.0)


def redundancy_qcb(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Chernoff-bound redundancy estimate n_total * xi / ln(1/delta).

    +inf when the exponent diverges (use the validity flag).  delta = 1 is
    handled by the averaging route's footnote convention, not here.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if deficit.delta == 1.0:
        raise SpecValidationError("delta = 1 has no Chernoff estimate; use the averaging route")
    xi = typical_chernoff(spec)
    if xi.divergent:
        return math.inf
    return spec.n_total * xi.value / math.log(1.0 / deficit.delta)


def qcb_estimate_valid(spec: EnvironmentSpec, deficit: DeficitSpec) -> bool:
    """Whether the Chernoff estimate is inside its realm of validity.

    The estimate needs redundancy >= 1; for the perfect model that means
    n_good >= ln(1/delta).  A divergent exponent is likewise out of scope.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if deficit.delta == 1.0:
        return False
    if typical_chernoff(spec).divergent:
        return False
    if spec.is_perfect() and spec.n_good < math.log(1.0 / deficit.delta):
        return False
    return True


def redundancy_goodbad_expanded(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Small-exponent expansion n_good * (1 - gamma2_good) / ln(1/delta).

    Only meaningful for inert bad spins (gamma2_bad = 1); always at or below
    the unexpanded estimate for the same spec.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if spec.gamma2_bad != 1.0:
        raise SpecValidationError("expansion requires gamma2_bad = 1")
    if deficit.delta == 1.0:
        raise SpecValidationError("delta = 1 has no Chernoff estimate; use the averaging route")
    return spec.n_good * (1.0 - spec.gamma2_good) / math.log(1.0 / deficit.delta)


def redundancy_max_qcb(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Continuous disjoint-fragment redundancy n_good * ln(gamma2) / ln(delta).

    Capped at n_good: once gamma2_good < delta each good spin alone carries a
    sufficient record and the count stops depending on the overlap.  The
    boundary overlaps 0 and 1 fall under the cap / zero conventions.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    g = spec.gamma2_good
    if g >= 1.0:
        return 0.0
    if g == 0.0 or g < deficit.delta or deficit.delta == 1.0:
        return float(spec.n_good)
    return min(spec.n_good * math.log(g) / math.log(deficit.delta), float(spec.n_good))


def redundancy_near_unity_deficit(spec: EnvironmentSpec, deficit: DeficitSpec) -> float:
    """Diagnostic small-fragment estimate n_good / (1 - delta).

    Matches the Chernoff estimate for deficits near 1; exposed for
    diagnostics only, never as a primary estimate.
    """
    validate_spec(spec)
    validate_deficit(deficit)
    if deficit.delta == 1.0:
        return math.inf
    return spec.n_good / (1.0 - deficit.delta)


def definition_ratio(gamma2_good: float, deficit: DeficitSpec) -> DefinitionRatio:
    """Ratio (1-g)/ln(1/g) between the averaging and maximizing redundancies.

    Monotonically increasing in g with limit 1 as g -> 1; over the validity
    region g >= delta its minimum sits at g = delta with value
    (1-delta)/ln(1/delta).  The boundary overlaps return their limits 0 and 1
    with the boundary flag set.
    """
    validate_deficit(deficit)
    if not (0.0 <= gamma2_good <= 1.0):
        raise SpecValidationError(f"overlap out of range: {gamma2_good!r}")
    in_region = gamma2_good >= deficit.delta
    if gamma2_good == 0.0:
        return DefinitionRatio(0.0, at_boundary=True, in_qcb_region=in_region)
    if gamma2_good == 1.0:
        return DefinitionRatio(1.0, at_boundary=True, in_qcb_region=in_region)
    value = (1.0 - gamma2_good) / math.log(1.0 / gamma2_good)
    return DefinitionRatio(value, at_boundary=False, in_qcb_region=in_region)
