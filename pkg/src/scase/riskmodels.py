"""Quantitative catastrophe-risk models.

Closed forms
------------

* ``naive_population_risk``: n independent subsystems each failing with
  probability p give overall risk 1 - (1 - p)^n.
* ``race_success_probability``: each catastrophe attempt succeeds, is caught,
  or continues undetected; the chance an attempt succeeds before one is
  caught is P(succeeds) / [P(caught) + P(succeeds)] -- the absorption
  probability of the three-outcome geometric race.
* ``practiced_race``: evaluates the race at the success probability an
  attacker reaches after a conservative number of free failed practice
  attempts, indexed into a non-decreasing success schedule.
* ``unilateral_risk``: P(at least one competent attempt) times the race.
* ``joint_infraction_probability``: independent components must all infract
  simultaneously, so the joint rate is the product of per-component rates.
* ``incentive_deterred`` / ``caught_threshold``: an agent modeled as a
  utility maximizer declines to misbehave iff
  U(default) > U(unacceptable) * [1 - P(caught)] + U(caught) * P(caught).

Monte Carlo
-----------

``simulate_deployment`` replays the attempt race per deployment window and
reports the catastrophe frequency with a 95% normal-approximation half-width.

RNG: replication ``r`` of a run seeded with ``s`` draws from its own
SplitMix64 stream whose initial state is ``mix(s XOR mix(r + 1))``, where
``mix`` is the SplitMix64 output permutation and each draw advances the
state by the 64-bit golden-ratio constant.  The rule is documented so that
any worker computing replication ``r`` produces bit-identical draws; results
are therefore independent of how trials are partitioned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64
#: Hard cap on attempts per replication; reached only under response
#: policies that never absorb (e.g. tightening with a tiny success rate).
MAX_ATTEMPTS_PER_REPLICATION = 100_000


def _check_prob(value: float, what: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ModelError("PROB_RANGE", f"{what} {value} is outside [0, 1]")
    return value


# ---------------------------------------------------------------------------
# Model parameter types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PopulationModel:
    """n subsystems, each with independent unacceptable-outcome probability p."""

    p: float
    n: int

    def __post_init__(self):
        _check_prob(self.p, "p")
        if self.n < 1:
            raise ModelError("BAD_PARAM", f"subsystem count must be >= 1, got {self.n}")


@dataclass(frozen=True)
class AttemptModel:
    """Parameters of the catastrophe-attempt race.

    ``p_succeed`` and ``p_caught`` are per-attempt probabilities; their sum
    may be below 1, the remainder being an attempt that continues undetected.
    ``practice_schedule`` lists per-attempt success probabilities, non-
    decreasing (attackers only improve with practice); ``practice_k`` is the
    conservative count of free failed practice attempts granted before the
    closed-form race is evaluated.
    """

    p_attempt: float = 1.0
    p_succeed: float = 0.0
    p_caught: float = 0.0
    practice_schedule: tuple[float, ...] = ()
    practice_k: int = 0

    def __post_init__(self):
        _check_prob(self.p_attempt, "p_attempt")
        _check_prob(self.p_succeed, "p_succeed")
        _check_prob(self.p_caught, "p_caught")
        if self.p_succeed + self.p_caught > 1.0:
            raise ModelError("BAD_PARAM", "p_succeed + p_caught exceeds 1")
        if self.practice_k < 0:
            raise ModelError("BAD_PARAM", "practice_k must be non-negative")
        previous = 0.0
        for entry in self.practice_schedule:
            _check_prob(entry, "practice_schedule entry")
            if entry < previous:
                raise ModelError("BAD_PARAM", "practice_schedule must be non-decreasing")
            previous = entry


@dataclass(frozen=True)
class UtilityModel:
    """Outcome utilities of an agent plus its per-episode catch probability."""

    u_default: float
    u_unacceptable: float
    u_caught: float
    p_caught: float = 0.0

    def __post_init__(self):
        for name in ("u_default", "u_unacceptable", "u_caught"):
            if not math.isfinite(getattr(self, name)):
                raise ModelError("BAD_PARAM", f"{name} must be finite")
        _check_prob(self.p_caught, "p_caught")


#: Causes that can make nominally independent components infract together.
CORRELATION_CAUSES = (
    "CorrelatedMistakes",
    "ControlFailure",
    "Jailbreak",
    "Trojan",
    "AlignmentFaking",
)


@dataclass(frozen=True)
class RedundancyModel:
    """Independent per-component infraction rates for a fault-tolerant stack."""

    infraction_rates: tuple[float, ...]
    correlation_causes: tuple[str, ...] = ()

    def __post_init__(self):
        for rate in self.infraction_rates:
            _check_prob(rate, "infraction rate")
        for cause in self.correlation_causes:
            if cause not in CORRELATION_CAUSES:
                raise ModelError("BAD_PARAM", f"unknown correlation cause {cause!r}")


class ResponsePolicy(enum.Enum):
    """What the operator does after a caught attempt."""

    ONE_AND_DONE = "one-and-done"  # undeploy: the window ends without catastrophe
    CONTINUE_WITH_TIGHTENING = "tighten"  # keep running, scale p_succeed down


@dataclass(frozen=True)
class SimulationParams:
    model: AttemptModel
    trials: int
    seed: int = 0
    response_policy: ResponsePolicy = ResponsePolicy.ONE_AND_DONE
    tighten_factor: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ModelError("BAD_PARAM", "trials must be >= 1")
        if not (0.0 < self.tighten_factor <= 1.0):
            raise ModelError("BAD_PARAM", "tighten_factor must be in (0, 1]")


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def naive_population_risk(model: PopulationModel) -> float:
    """1 - (1 - p)^n, via log1p/expm1 so tiny p at large n stays accurate."""
    if model.p == 0.0:
        return 0.0
    if model.p == 1.0:
        return 1.0
    return -math.expm1(model.n * math.log1p(-model.p))


def race_success_probability(p_succeed: float, p_caught: float) -> float:
    """P(an attempt succeeds before one is caught) = s / (s + c).

    Computed as 1 / (1 + c/s): same quotient, but the rounding of s + c no
    longer leaks into exact-ratio inputs (e.g. (0.01, 0.04) yields 0.2).
    """
    s = _check_prob(p_succeed, "p_succeed")
    c = _check_prob(p_caught, "p_caught")
    if s + c > 1.0:
        raise ModelError("BAD_PARAM", "p_succeed + p_caught exceeds 1")
    if s == 0.0 and c == 0.0:
        raise ModelError("DEGENERATE_RACE", "p_succeed and p_caught are both 0; the race never resolves")
    if s == 0.0:
        return 0.0
    return 1.0 / (1.0 + c / s)


def practiced_race(model: AttemptModel) -> float:
    """Race evaluated at the success probability reached after free practice.

    The attacker is granted ``practice_k`` failed attempts, so the race runs
    at ``practice_schedule[min(practice_k, len - 1)]``.
    """
    if not model.practice_schedule:
        raise ModelError("EMPTY_SCHEDULE", "practice_schedule is empty")
    index = min(model.practice_k, len(model.practice_schedule) - 1)
    return race_success_probability(model.practice_schedule[index], model.p_caught)


def unilateral_risk(model: AttemptModel) -> float:
    """P(at least one competent attempt) x P(success before a catch)."""
    if model.p_attempt == 0.0:
        return 0.0
    if model.practice_schedule:
        race = practiced_race(model)
    else:
        race = race_success_probability(model.p_succeed, model.p_caught)
    return model.p_attempt * race


def joint_infraction_probability(model: RedundancyModel) -> float:
    """Product of the independent per-component infraction rates.

    The declared correlation causes do not change the number; they gate the
    coverage lints that demand each cause be argued away.
    """
    if not model.infraction_rates:
        raise ModelError("EMPTY_RATES", "infraction_rates is empty")
    product = 1.0
    for rate in model.infraction_rates:
        product *= rate
    return product


def incentive_deterred(model: UtilityModel) -> bool:
    """True iff the agent strictly prefers the default outcome to an attempt."""
    expected_attempt = model.u_unacceptable * (1.0 - model.p_caught) + model.u_caught * model.p_caught
    return model.u_default > expected_attempt


class Deterrence(enum.Enum):
    """Non-numeric outcomes of ``caught_threshold``."""

    NO_DETERRENCE_NEEDED = "no_deterrence_needed"  # misbehaving never pays
    UNDETERRABLE = "undeterrable"  # no catch probability dissuades the agent


def caught_threshold(model: UtilityModel):
    """Catch probability above which the agent is deterred.

    Returns a float threshold (deterred for all p_caught strictly above it),
    or Deterrence.NO_DETERRENCE_NEEDED when the unacceptable outcome is worth
    no more than the default, or Deterrence.UNDETERRABLE when being caught is
    at least as good as the default so no catch probability helps.
    """
    if model.u_unacceptable <= model.u_default:
        return Deterrence.NO_DETERRENCE_NEEDED
    if model.u_caught >= model.u_default:
        return Deterrence.UNDETERRABLE
    threshold = (model.u_unacceptable - model.u_default) / (model.u_unacceptable - model.u_caught)
    return min(1.0, max(0.0, threshold))


# ---------------------------------------------------------------------------
# Monte Carlo simulation
# ---------------------------------------------------------------------------


def _mix(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output permutation (vectorized over uint64)."""
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def _stream_states(seed: int, lo: int, hi: int) -> np.ndarray:
    """Initial SplitMix64 state for replications lo..hi-1 of a seeded run."""
    reps = np.arange(lo + 1, hi + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(_U64(seed & 0xFFFFFFFFFFFFFFFF) ^ _mix(reps * _GOLDEN))


def _draw(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Advance each stream one step; returns (new states, uniforms in [0,1))."""
    with np.errstate(over="ignore"):
        states = states + _GOLDEN
        z = _mix(states)
    return states, (z >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _simulate_range(params: SimulationParams, lo: int, hi: int) -> int:
    """Number of catastrophic replications among replication indices lo..hi-1."""
    model = params.model
    schedule = model.practice_schedule if model.practice_schedule else (model.p_succeed,)
    caught = model.p_caught
    for entry in schedule:
        if entry + caught > 1.0:
            raise ModelError("BAD_PARAM", "schedule entry + p_caught exceeds 1")
        if entry == 0.0 and caught == 0.0:
            raise ModelError("DEGENERATE_RACE", "schedule entry and p_caught are both 0")
    tighten = params.response_policy is ResponsePolicy.CONTINUE_WITH_TIGHTENING
    top_entry = max(schedule)
    if top_entry == 0.0:
        return 0  # success is impossible; every window ends without catastrophe

    states = _stream_states(params.seed, lo, hi)
    states, u = _draw(states)
    active = u < model.p_attempt
    states = states[active]
    multiplier = np.ones(states.shape[0], dtype=np.float64)

    successes = 0
    attempt = 0
    while states.shape[0] and attempt < MAX_ATTEMPTS_PER_REPLICATION:
        s = schedule[min(attempt, len(schedule) - 1)] * multiplier
        states, u = _draw(states)
        hit = u < s
        catch = ~hit & (u < s + caught)
        successes += int(hit.sum())
        if tighten:
            multiplier = np.where(catch, multiplier * params.tighten_factor, multiplier)
            # Once tightening has driven the residual success probability
            # below noise, the window can no longer end in catastrophe.
            keep = ~hit & (multiplier * top_entry >= 1e-15)
        else:
            keep = ~hit & ~catch
        states = states[keep]
        multiplier = multiplier[keep]
        attempt += 1
    return successes


def simulate_deployment(params: SimulationParams) -> tuple[float, float]:
    """Seeded Monte Carlo estimate of the per-window catastrophe probability.

    Each replication: with probability ``p_attempt`` an attempt sequence
    begins; attempts then iterate the three-outcome race along the practice
    schedule.  A caught attempt ends the window without catastrophe under
    ONE_AND_DONE, or scales subsequent success probabilities by
    ``tighten_factor`` and continues under CONTINUE_WITH_TIGHTENING.
    Catastrophe iff a success occurs.  Returns (sample mean, 95% half-width).
    Deterministic for a fixed seed and trial count, independent of
    partitioning (see module docstring for the stream-splitting rule).
    """
    successes = _simulate_range(params, 0, params.trials)
    estimate = successes / params.trials
    half_width = 1.96 * math.sqrt(estimate * (1.0 - estimate) / params.trials)
    return estimate, half_width
