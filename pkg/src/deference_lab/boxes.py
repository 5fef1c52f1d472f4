"""Open neighbourhoods on which a trust violation holds uniformly.

A single violating gamble is not enough for measure-theoretic arguments:
the constructions here fatten a witness X into an open axis-aligned box of
gambles that all violate trust the same way, with the same acceptance
event, while staying clear of the n hyperplanes ``{Y : P_i(Y) = 0}`` on
which expert previsions vanish.

Two margins control the box for a witness with event A = [P(X) >= 0] and
``pi(X | A) < 0``:

* ``value_margin`` -- how much X can be lifted uniformly before the
  conditional value reaches zero; equals ``-pi(X | A)`` since a uniform
  lift moves the conditional one-for-one.
* ``event_margin`` -- how much X can be lifted before an excluded world
  enters the acceptance event; equals ``min(-P_i(X))`` over worlds outside
  A (infinite when A is everything).

With ``delta`` below both, every Y strictly between X and X + delta keeps
the event and stays violating; the box is open, hence of positive Lebesgue
measure.  The mirrored construction (gambles just *below* a witness whose
conditional given ``[P(X) < 0]`` is strictly positive) backs the
positive-side case; its margin bound is less tight to reason about, so the
box contract is verified by interior sampling before the box is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    Event,
    Gamble,
    ProbMass,
    ValidationError,
    conditional_expectation,
    expectation,
)
from .trust import Scenario, expert_event

__all__ = [
    "Orientation",
    "ViolationBox",
    "NotAViolationWitness",
    "DegenerateBoxError",
    "value_margin",
    "event_margin",
    "build_violation_box",
    "build_positive_box",
]

#: Fixed seed for the internal post-condition sampling of positive boxes.
_BOX_CHECK_SEED = 0x5EED
_BOX_CHECK_POINTS = 1_000
_BOX_SHRINK_LIMIT = 20


class NotAViolationWitness(ValidationError):
    """The gamble does not witness the violation the construction needs."""


class DegenerateBoxError(RuntimeError):
    """No shrinking of the candidate box satisfied its contract."""


class Orientation(Enum):
    """Which strict inequality holds uniformly on the box interior."""

    NEGATIVE_SIDE = "negative_side"  # pi(Y | [P(Y) >= 0]) < 0
    POSITIVE_SIDE = "positive_side"  # pi(Y | [P(Y) < 0]) > 0


@dataclass(frozen=True)
class ViolationBox:
    """An open box of gambles violating trust uniformly, minus hyperplanes.

    ``lower``/``upper`` are componentwise *open* bounds.  ``hyperplanes``
    holds the expert mass functions; the open set represented is the box
    interior with the (Lebesgue-null) zero sets ``P_i(Y) = 0`` removed,
    so membership is tested pointwise rather than carved out geometrically.
    """

    base: Gamble
    event: Event
    value_margin: float
    event_margin: float
    delta: float
    lower: np.ndarray
    upper: np.ndarray
    orientation: Orientation
    hyperplanes: tuple[ProbMass, ...]

    def __post_init__(self) -> None:
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValidationError(f"box width must be positive and finite, got {self.delta}")
        if self.delta > min(self.value_margin, self.event_margin):
            raise ValidationError("box width exceeds the margins that justify it")
        if not np.all(self.upper - self.lower > 0.0):
            raise ValidationError("box must be nonempty and open in every coordinate")
        lower = self.lower.copy()
        upper = self.upper.copy()
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return self.base.n

    def midpoint(self) -> Gamble:
        return Gamble((self.lower + self.upper) / 2.0)

    def contains(self, y: Gamble) -> bool:
        """Strict interior membership, excluding the expert hyperplanes."""
        if y.n != self.n:
            return False
        inside = bool(np.all(y.values > self.lower) and np.all(y.values < self.upper))
        return inside and all(expectation(p, y) != 0.0 for p in self.hyperplanes)

    def sample_interior(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform draws from the open set; hyperplane hits are redrawn.

        Exact hits have probability zero, so the redraw loop is a formality
        that keeps the advertised set and the sampled set identical.
        """
        width = self.upper - self.lower
        points = self.lower + rng.random((count, self.n)) * width
        normals = np.vstack([p.weights for p in self.hyperplanes])
        for _ in range(100):
            on_plane = np.any(points @ normals.T == 0.0, axis=1)
            if not on_plane.any():
                return points
            redraw = int(np.count_nonzero(on_plane))
            points[on_plane] = self.lower + rng.random((redraw, self.n)) * width
        raise RuntimeError("could not sample off the expert hyperplanes")  # pragma: no cover

    def mirrored(self) -> "ViolationBox":
        """The negated box -Y, which backs the opposite strict inequality.

        Negating every gamble flips acceptance into rejection away from the
        hyperplanes, so the conditioning event is preserved while the
        orientation swaps.
        """
        flipped = (
            Orientation.POSITIVE_SIDE
            if self.orientation is Orientation.NEGATIVE_SIDE
            else Orientation.NEGATIVE_SIDE
        )
        return ViolationBox(
            base=-self.base,
            event=self.event,
            value_margin=self.value_margin,
            event_margin=self.event_margin,
            delta=self.delta,
            lower=-self.upper,
            upper=-self.lower,
            orientation=flipped,
            hyperplanes=self.hyperplanes,
        )


def _require_negative_witness(scenario: Scenario, x: Gamble) -> tuple[Event, float]:
    event = expert_event(scenario, x, 0.0)
    value = conditional_expectation(scenario.agent, x, event)
    if value is None or not value < 0.0:
        raise NotAViolationWitness(
            "not a trust violation witness: conditional value given [P(X) >= 0] "
            f"is {'undefined' if value is None else value}"
        )
    return event, value


def value_margin(scenario: Scenario, x: Gamble) -> float:
    """Uniform lift that drives the witness's conditional value to zero.

    A lift by epsilon moves the conditional by exactly epsilon, so the
    admissible lifts are ``(0, -pi(X | A))`` in closed form; no numeric
    search is involved.
    """
    _, value = _require_negative_witness(scenario, x)
    return -value


def event_margin(scenario: Scenario, x: Gamble) -> float:
    """Uniform lift below which the acceptance event cannot change.

    Worlds already accepting only become more accepting under a lift, so
    the binding constraint is the most nearly accepting excluded world:
    ``min(-P_i(X))`` outside the event, infinite if nothing is excluded.
    """
    event, _ = _require_negative_witness(scenario, x)
    outside = [i for i in range(scenario.n) if i not in event]
    if not outside:
        return math.inf
    return min(-expectation(scenario.expert[i], x) for i in outside)


def build_violation_box(scenario: Scenario, x: Gamble) -> ViolationBox:
    """The open box (X, X + delta) of uniformly violating gambles.

    ``delta`` is the smaller of the two margins; when the witness itself
    has strictly negative unconditional prevision, delta is additionally
    capped at ``-pi(X)`` so the whole box keeps a negative prevision (the
    mirrored box then lies entirely on the nonnegative side, which the
    adversarial measure construction relies on).
    """
    event, value = _require_negative_witness(scenario, x)
    lam = -value
    xi = event_margin(scenario, x)
    delta = min(lam, xi)
    unconditional = expectation(scenario.agent, x)
    if unconditional < 0.0:
        delta = min(delta, -unconditional)
    return ViolationBox(
        base=x,
        event=event,
        value_margin=lam,
        event_margin=xi,
        delta=delta,
        lower=x.values.copy(),
        upper=x.values + delta,
        orientation=Orientation.NEGATIVE_SIDE,
        hyperplanes=tuple(scenario.expert),
    )


def _positive_box_post_holds(scenario: Scenario, box: ViolationBox) -> bool:
    rng = np.random.default_rng(np.random.SeedSequence(_BOX_CHECK_SEED))
    points = box.sample_interior(rng, _BOX_CHECK_POINTS)
    e_t = scenario.expert_matrix().T
    pi = scenario.agent.weights
    rejected = (points @ e_t) < 0.0
    expected = np.zeros(scenario.n, dtype=bool)
    expected[box.event.sorted_members()] = True
    if not np.all(rejected == expected):
        return False
    partial = (points * rejected) @ pi
    total = points @ pi
    return bool(np.all(partial > 0.0) and np.all(total >= 0.0))


def build_positive_box(scenario: Scenario, x: Gamble) -> ViolationBox:
    """The mirrored construction below a positive-side witness.

    Preconditions: ``pi(X) >= 0``, the rejection event B = [P(X) < 0] has
    positive probability, and ``pi(X | B) > 0``.  The box is
    ``(X - delta, X)``; its width starts at the minimum of the conditional
    value, the event-stability margin ``min(P_i(X))`` over accepting
    worlds, and (when ``pi(X) > 0``) the unconditional slack that keeps the
    whole box on the nonnegative side.  Because this case has no vetted
    closed form, the contract -- constant rejection event, strictly
    positive conditional, nonnegative prevision -- is checked on sampled
    interior points, halving the width up to 20 times before giving up.
    """
    unconditional = expectation(scenario.agent, x)
    if unconditional < 0.0:
        raise NotAViolationWitness(
            f"positive-side witness needs pi(X) >= 0, got {unconditional}"
        )
    rejection = expert_event(scenario, x, 0.0).complement()
    value = conditional_expectation(scenario.agent, x, rejection)
    if value is None:
        raise NotAViolationWitness(
            "positive-side witness needs a rejection event of positive probability"
        )
    if not value > 0.0:
        raise NotAViolationWitness(
            f"positive-side witness needs pi(X | [P(X) < 0]) > 0, got {value}"
        )
    accepting = [i for i in range(scenario.n) if i not in rejection]
    stability = (
        min(expectation(scenario.expert[i], x) for i in accepting) if accepting else math.inf
    )
    delta = min(value, stability)
    if unconditional > 0.0:
        delta = min(delta, unconditional)
    if not delta > 0.0:
        raise DegenerateBoxError(
            f"degenerate box: no positive width available (candidate {delta})"
        )

    for _ in range(_BOX_SHRINK_LIMIT):
        box = ViolationBox(
            base=x,
            event=rejection,
            value_margin=value,
            event_margin=stability,
            delta=delta,
            lower=x.values - delta,
            upper=x.values.copy(),
            orientation=Orientation.POSITIVE_SIDE,
            hyperplanes=tuple(scenario.expert),
        )
        if _positive_box_post_holds(scenario, box):
            return box
        delta /= 2.0
    raise DegenerateBoxError(
        f"degenerate box: contract still failing at width {delta} after "
        f"{_BOX_SHRINK_LIMIT} halvings"
    )
