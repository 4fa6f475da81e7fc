"""Good/bad spin environment model and fragment combinatorics.

The environment consists of ``n_good`` spins whose conditional states have
per-spin squared overlap ``gamma2_good`` and ``n_bad`` spins with squared
overlap ``gamma2_bad``; the system pointer probabilities are ``(p0, 1-p0)``.
Every closed form downstream treats the two classes as homogeneous; per-spin
heterogeneity lives only in the dense-state oracle.

All combinatorics run in log space so that environments up to 1e9 spins are
evaluable without big integers.  Log-binomials use an exact sum-of-logs path
for small indices and a log-gamma difference beyond, which keeps the
hypergeometric pmf normalized to ~1e-12 at ordinary scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecValidationError

# Below this index the falling factorial is summed term by term (exact to
# ~1e-12 at any n); above it a log-gamma difference is used.
_EXACT_LOG_SUM_CUTOFF = 4096


@dataclass(frozen=True)
class EnvironmentSpec:
    """Counts and per-spin squared overlaps of the two environment classes.

    gamma2_good / gamma2_bad are the squared overlaps of the two conditional
    single-spin states, in [0, 1]; 0 means a perfect record, 1 means no
    record.  p0 is the pointer probability of the first branch.
    """

    n_good: int
    n_bad: int
    gamma2_good: float
    gamma2_bad: float
    p0: float = 0.5

    @property
    def n_total(self) -> int:
        return self.n_good + self.n_bad

    def is_perfect(self) -> bool:
        """True for the diametrically opposed model (perfect good, inert bad)."""
        return self.gamma2_good == 0.0 and self.gamma2_bad == 1.0


@dataclass(frozen=True)
class FragmentComposition:
    """Numbers of good and bad spins in an intercepted fragment."""

    f_good: int
    f_bad: int

    @property
    def size(self) -> int:
        return self.f_good + self.f_bad


@dataclass(frozen=True)
class DeficitSpec:
    """Information deficit delta in (0, 1]: the fraction of the pointer
    entropy an observer is prepared to forgo."""

    delta: float


def validate_spec(spec: EnvironmentSpec) -> EnvironmentSpec:
    """Check every invariant of an environment spec; report all violations.

    Returns the spec unchanged if valid, raises SpecValidationError listing
    every violated invariant otherwise.
    """
    problems = []
    if spec.n_good < 0 or spec.n_bad < 0:
        problems.append("negative spin count")
    if spec.n_good + spec.n_bad < 1:
        problems.append("empty environment")
    for name, g in (("gamma2_good", spec.gamma2_good), ("gamma2_bad", spec.gamma2_bad)):
        if not (0.0 <= g <= 1.0):
            problems.append(f"overlap out of range: {name}={g!r}")
    if not (0.0 <= spec.p0 <= 1.0):
        problems.append(f"probability out of range: p0={spec.p0!r}")
    if problems:
        raise SpecValidationError("; ".join(problems))
    return spec


def validate_deficit(deficit: DeficitSpec) -> DeficitSpec:
    if not (0.0 < deficit.delta <= 1.0):
        raise SpecValidationError(f"deficit out of range (0, 1]: {deficit.delta!r}")
    return deficit


def validate_composition(spec: EnvironmentSpec, comp: FragmentComposition) -> FragmentComposition:
    validate_spec(spec)
    if comp.f_good < 0 or comp.f_bad < 0:
        raise SpecValidationError("negative fragment composition")
    if comp.f_good > spec.n_good or comp.f_bad > spec.n_bad:
        raise SpecValidationError(
            f"composition ({comp.f_good}, {comp.f_bad}) exceeds environment "
            f"({spec.n_good}, {spec.n_bad})"
        )
    return comp


def _log_falling_factorial(n: int, k: int) -> float:
    """ln of n*(n-1)*...*(n-k+1) for integers 0 <= k <= n."""
    if k == 0:
        return 0.0
    if k <= _EXACT_LOG_SUM_CUTOFF:
        # pairwise-summed exact logs; absolute error ~1e-12 even at n ~ 1e9
        return float(np.log(np.arange(n, n - k, -1, dtype=np.float64)).sum())
    return math.lgamma(n + 1) - math.lgamma(n - k + 1)


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k); -inf outside the support."""
    if k < 0 or k > n:
        return -math.inf
    k = min(k, n - k)
    return _log_falling_factorial(n, k) - _log_falling_factorial(k, k)


def log_hypergeometric_pmf(spec: EnvironmentSpec, fragment_size: int, f_bad: int) -> float:
    """ln P(exactly f_bad bad spins in a uniform size-``fragment_size`` subset)."""
    validate_spec(spec)
    if not (0 <= fragment_size <= spec.n_total):
        raise SpecValidationError(
            f"fragment_size {fragment_size} outside [0, {spec.n_total}]"
        )
    f_good = fragment_size - f_bad
    if f_bad < 0 or f_bad > spec.n_bad or f_good < 0 or f_good > spec.n_good:
        return -math.inf
    return (
        log_binomial(spec.n_bad, f_bad)
        + log_binomial(spec.n_good, f_good)
        - log_binomial(spec.n_total, fragment_size)
    )


def hypergeometric_pmf(spec: EnvironmentSpec, fragment_size: int, f_bad: int) -> float:
    """P(a uniformly drawn size-``fragment_size`` subset contains f_bad bad spins).

    Drawn without replacement from the n_good + n_bad population; infeasible
    compositions return 0.  Computed in log-factorial space, so counts up to
    1e9 neither overflow nor need big integers.
    """
    return math.exp(log_hypergeometric_pmf(spec, fragment_size, f_bad))


def composition_support(spec: EnvironmentSpec, fragment_size: int) -> tuple[np.ndarray, np.ndarray]:
    """All feasible f_bad values for a fragment size, with their probabilities.

    Returns (f_bad values, pmf values) as aligned arrays.  Probabilities are
    anchored at the smallest feasible f_bad and extended by the exact ratio
    recurrence, so the vector is cheap even when the counts are huge: its
    length is bounded by the smaller spin class, not the fragment size.
    """
    validate_spec(spec)
    if not (0 <= fragment_size <= spec.n_total):
        raise SpecValidationError(
            f"fragment_size {fragment_size} outside [0, {spec.n_total}]"
        )
    lo = max(0, fragment_size - spec.n_good)
    hi = min(fragment_size, spec.n_bad)
    f_bad = np.arange(lo, hi + 1, dtype=np.int64)
    anchor = log_hypergeometric_pmf(spec, fragment_size, lo)
    if hi == lo:
        return f_bad, np.array([math.exp(anchor)])
    # pmf(b+1)/pmf(b) = (n_bad-b)(F-b) / ((b+1)(n_good-F+b+1))
    b = f_bad[:-1].astype(np.float64)
    steps = (
        np.log(spec.n_bad - b)
        + np.log(fragment_size - b)
        - np.log(b + 1.0)
        - np.log(spec.n_good - fragment_size + b + 1.0)
    )
    logw = anchor + np.concatenate(([0.0], np.cumsum(steps)))
    return f_bad, np.exp(logw)


def fragment_overlap(spec: EnvironmentSpec, comp: FragmentComposition) -> float:
    """Squared conditional-state overlap of a whole fragment.

    Overlaps multiply across spins: gamma2_good**f_good * gamma2_bad**f_bad.
    The empty fragment has overlap 1 (empty product); any perfectly recording
    spin (gamma2 = 0) annihilates it.
    """
    validate_composition(spec, comp)
    return spec.gamma2_good ** comp.f_good * spec.gamma2_bad ** comp.f_bad
