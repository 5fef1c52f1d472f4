"""Global inaccuracy via desirability errors, and the expected-accuracy gap.

A prevision p sorts gambles into almost-desirable (``p(X) >= 0``) and not.
At world i the ideal sorting is by the sign of the payoff ``x_i``, so p can
err in two ways on a gamble X:

* type 1 -- p accepts X but ``x_i < 0`` (accepted a loser);
* type 2 -- p rejects X but ``x_i >= 0`` (rejected a keeper).

The inaccuracy of p at world i is the integral of ``|x_i|`` over both error
regions with respect to an admissible measure (see
:mod:`deference_lab.measures`): each mistake costs its stake.  The scores
here are Monte-Carlo estimates of those integrals.

:func:`expected_gap` estimates how much *worse* the agent expects the
expert to score than itself, weighting world i's score difference by the
agent's own probability of world i.  :func:`rhs_identity` estimates the
same quantity along an entirely different route -- partial expectations of
X over the acceptance event and its complement, split by the sign of the
agent's prevision -- and exists so the algebraic identity between the two
can be verified numerically rather than trusted.  Both estimators share
one sample stream per (seed, N, measure), which makes their difference a
low-variance statistic.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .core import Gamble, ProbMass, ValidationError, expectation
from .measures import MeasureSpec
from .sampling import ScoreEstimate, mc_estimate
from .trust import Scenario

__all__ = [
    "ErrorKind",
    "is_almost_desirable",
    "error_class",
    "inaccuracy_mc",
    "expected_gap",
    "rhs_identity",
]


class ErrorKind(Enum):
    NONE = "none"
    TYPE1 = "type1"
    TYPE2 = "type2"


def is_almost_desirable(p: ProbMass, x: Gamble) -> bool:
    """Whether x has nonnegative prevision under p (weak inequality)."""
    return expectation(p, x) >= 0.0


def error_class(p: ProbMass, i: int, x: Gamble) -> ErrorKind:
    """How p's desirability verdict on x errs at world i, if at all.

    Conventions are fixed once and exactly: acceptance is ``p(X) >= 0``,
    type 1 requires ``x_i < 0``, type 2 requires ``x_i >= 0``.  Boundary
    cases carry no measure, but pinning them keeps unit tests exact.
    """
    if i < 0 or i >= x.n:
        raise ValidationError(f"world index {i} out of range for n={x.n}")
    accepted = expectation(p, x) >= 0.0
    payoff = float(x.values[i])
    if accepted and payoff < 0.0:
        return ErrorKind.TYPE1
    if not accepted and payoff >= 0.0:
        return ErrorKind.TYPE2
    return ErrorKind.NONE


def _check_measure(mu: MeasureSpec, dim: int) -> None:
    if mu.dim is not None and mu.dim != dim:
        raise ValidationError(f"measure is {mu.dim}-dimensional, scores need {dim}")


def inaccuracy_mc(
    p: ProbMass, i: int, mu: MeasureSpec, samples: int, seed: int
) -> ScoreEstimate:
    """Monte-Carlo estimate of p's inaccuracy at world i under mu.

    Averages ``|x_i|`` over sampled gambles on which p's verdict disagrees
    with the sign of the world-i payoff.  For the ideal mass at world i the
    error regions are empty, so the estimate is exactly zero with zero
    standard error.
    """
    if i < 0 or i >= p.n:
        raise ValidationError(f"world index {i} out of range for n={p.n}")
    _check_measure(mu, p.n)
    weights = p.weights

    def values(xs: np.ndarray) -> np.ndarray:
        accepted = (xs @ weights) >= 0.0
        payoff = xs[:, i]
        type1 = accepted & (payoff < 0.0)
        type2 = ~accepted & (payoff >= 0.0)
        return np.abs(payoff) * (type1 | type2)

    return mc_estimate(mu.sampler(p.n), values, samples, seed)


def _stacked_previsions(scenario: Scenario) -> np.ndarray:
    """Expert rows with the agent appended, for one shared matmul.

    Running the expert and agent previsions of each sample through the same
    matrix product means identical mass functions give bit-identical
    columns, so an expert equal to the agent cancels exactly, sample by
    sample, not just in expectation.
    """
    return np.vstack([scenario.expert_matrix(), scenario.agent.weights])


def expected_gap(
    scenario: Scenario, mu: MeasureSpec, samples: int, seed: int
) -> ScoreEstimate:
    """Agent-expected inaccuracy of the expert minus the agent's own.

    One stream of sampled gambles is evaluated against every term: the
    estimator is the sample mean of

        g(X) = sum_i pi(w_i) |x_i| ([expert errs at i] - [agent errs at i]).

    Negative values mean the agent expects the expert to score better.
    """
    _check_measure(mu, scenario.n)
    n = scenario.n
    pi = scenario.agent.weights
    stacked_t = _stacked_previsions(scenario).T

    def values(xs: np.ndarray) -> np.ndarray:
        prev = xs @ stacked_t
        expert_accepts = prev[:, :n] >= 0.0
        agent_accepts = prev[:, n] >= 0.0
        total = np.zeros(len(xs))
        for i in range(n):
            if pi[i] == 0.0:
                continue
            payoff = xs[:, i]
            gains = payoff >= 0.0
            expert_errs = expert_accepts[:, i] != gains
            agent_errs = agent_accepts != gains
            total += pi[i] * np.abs(payoff) * (
                expert_errs.astype(float) - agent_errs.astype(float)
            )
        return total

    return mc_estimate(mu.sampler(n), values, samples, seed)


def rhs_identity(
    scenario: Scenario, mu: MeasureSpec, samples: int, seed: int
) -> ScoreEstimate:
    """The gap's partial-expectation form, estimated on the same stream.

    Per sampled gamble X with acceptance event A = [P(X) >= 0]:

        h(X) = - pi(X 1_A)      if pi(A) > 0 and pi(X) < 0
               + pi(X 1_{A^c})  if pi(A^c) > 0 and pi(X) >= 0

    (zero when neither side's condition holds).  Shares the sample stream
    with :func:`expected_gap` for equal (seed, N, mu), so the two
    estimates separate only by floating-point noise if the algebra that
    equates them is right -- that is exactly what the identity tests pin.
    """
    _check_measure(mu, scenario.n)
    n = scenario.n
    pi = scenario.agent.weights
    stacked_t = _stacked_previsions(scenario).T

    def values(xs: np.ndarray) -> np.ndarray:
        prev = xs @ stacked_t
        accepted = prev[:, :n] >= 0.0
        agent_value = prev[:, n]
        accept_prob = accepted @ pi
        accept_part = (xs * accepted) @ pi
        reject_prob = (~accepted) @ pi
        reject_part = (xs * ~accepted) @ pi
        first = (accept_prob > 0.0) & (agent_value < 0.0)
        second = (reject_prob > 0.0) & (agent_value >= 0.0)
        return -accept_part * first + reject_part * second

    return mc_estimate(mu.sampler(n), values, samples, seed)
