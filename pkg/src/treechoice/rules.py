"""Conditional set-valued choice rules over exact rational contexts.

Every rule maps a non-empty, event-consistent gamble set to a non-empty
subset of it, conditional on a non-empty event. All arithmetic is exact
(`fractions.Fraction`); ties are never broken, the full optimal set is
returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    EmptyEvent,
    EmptySet,
    InconsistentSet,
    MissingContext,
    SpaceMismatch,
)
from .model import (
    Event,
    Gamble,
    GambleSet,
    PossibilitySpace,
    RewardTable,
    check_a_consistency,
)


@dataclass(frozen=True)
class MassFunction:
    """A strictly positive probability mass function on a possibility space."""

    space: PossibilitySpace
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.masses) != self.space.size:
            raise ValueError("one mass per state required")
        if any(m <= 0 for m in self.masses):
            raise ValueError("all state masses must be strictly positive")
        if sum(self.masses) != 1:
            raise ValueError("masses must sum to one")

    @classmethod
    def uniform(cls, space: PossibilitySpace) -> MassFunction:
        n = space.size
        return cls(space, (Fraction(1, n),) * n)

    @classmethod
    def of(cls, space: PossibilitySpace, by_label: dict[str, Fraction]) -> MassFunction:
        return cls(space, tuple(Fraction(by_label[s]) for s in space.states))

    @classmethod
    def from_weights(cls, space: PossibilitySpace, weights: Sequence[int]) -> MassFunction:
        total = sum(weights)
        return cls(space, tuple(Fraction(w, total) for w in weights))

    def mass_of(self, event: Event) -> Fraction:
        if event.space != self.space:
            raise SpaceMismatch("event over a different space")
        return sum((self.masses[i] for i in event.indices()), Fraction(0))

    def restricted(self, space: PossibilitySpace, kept: Sequence[int]) -> MassFunction:
        """Renormalize onto the sub-space formed by the kept state indices."""
        total = sum(self.masses[i] for i in kept)
        return MassFunction(space, tuple(self.masses[i] / total for i in kept))


def conditional_expectation(
    p: MassFunction, gamble: Gamble, event: Event, utilities: RewardTable
) -> Fraction:
    """Exact conditional expectation of the utility of `gamble` given `event`.

    Positivity of the mass function guarantees the conditional is defined for
    every non-empty event.
    """
    if event.is_empty:
        raise EmptyEvent("cannot condition on the empty event")
    num = sum(
        (p.masses[i] * utilities.utility(gamble.values[i]) for i in event.indices()),
        Fraction(0),
    )
    return num / p.mass_of(event)


@dataclass(frozen=True)
class ChoiceContext:
    """Numeric context a rule may draw on: utilities, and optionally a single
    mass function or a finite credal list of mass functions (all strictly
    positive, so conditioning is always defined)."""

    utilities: RewardTable
    probability: Optional[MassFunction] = None
    credal: Optional[tuple[MassFunction, ...]] = None

    def __post_init__(self):
        if self.credal is not None and len(self.credal) == 0:
            raise ValueError("credal list must be non-empty when present")

    def restricted(self, space: PossibilitySpace, kept: Sequence[int]) -> ChoiceContext:
        return ChoiceContext(
            utilities=self.utilities,
            probability=None
            if self.probability is None
            else self.probability.restricted(space, kept),
            credal=None
            if self.credal is None
            else tuple(p.restricted(space, kept) for p in self.credal),
        )


class ChoiceRule:
    """A conditional choice function bound to its numeric context.

    Subclasses implement `_select`; `select` wraps it with the shared
    contract checks (non-empty input, non-empty event, event-consistency)
    and returns a canonical GambleSet.
    """

    name = "abstract"
    needs: frozenset[str] = frozenset()

    def __init__(self, context: ChoiceContext):
        for requirement in self.needs:
            if getattr(context, requirement) is None:
                raise MissingContext(f"rule {self.name!r} needs {requirement}")
        self.context = context

    def select(self, gambles: GambleSet, given: Event) -> GambleSet:
        if len(gambles) == 0:
            raise EmptySet("cannot select from an empty gamble set")
        if given.is_empty:
            raise EmptyEvent("cannot select conditional on the empty event")
        verdict = check_a_consistency(gambles, given)
        if not verdict:
            raise InconsistentSet(
                "gamble set is not consistent with the conditioning event",
                witness=verdict.witness,
            )
        chosen = GambleSet(self._select(gambles, given))
        assert 0 < len(chosen) and chosen.issubset(gambles)
        return chosen

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        raise NotImplementedError

    def _u(self, gamble: Gamble, index: int) -> Fraction:
        return self.context.utilities.utility(gamble.values[index])

    def _exp(self, p: MassFunction, gamble: Gamble, given: Event) -> Fraction:
        return conditional_expectation(p, gamble, given, self.context.utilities)

    def rebind(self, context: ChoiceContext) -> "ChoiceRule":
        return type(self)(context)

    def __repr__(self) -> str:
        return f"<rule {self.name}>"


class EuMax(ChoiceRule):
    """Maximize conditional expected utility under the single mass function;
    the full argmax set is returned."""

    name = "eu_max"
    needs = frozenset({"probability"})

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        p = self.context.probability
        scored = [(self._exp(p, g, given), g) for g in gambles]
        best = max(s for s, _ in scored)
        return [g for s, g in scored if s == best]


class PointwiseDominance(ChoiceRule):
    """Keep a gamble unless another weakly exceeds its utility on every state
    of the conditioning event, strictly somewhere on it."""

    name = "pointwise_dominance"

    def _dominates(self, y: Gamble, x: Gamble, given: Event) -> bool:
        strict = False
        for i in given.indices():
            uy, ux = self._u(y, i), self._u(x, i)
            if uy < ux:
                return False
            if uy > ux:
                strict = True
        return strict

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        return [
            x
            for x in gambles
            if not any(self._dominates(y, x, given) for y in gambles)
        ]


class Maximality(ChoiceRule):
    """Keep a gamble unless another has strictly greater conditional
    expectation under every mass function in the credal list."""

    name = "maximality"
    needs = frozenset({"credal"})

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        credal = self.context.credal

        def dominated(x: Gamble) -> bool:
            return any(
                all(self._exp(p, y, given) > self._exp(p, x, given) for p in credal)
                for y in gambles
            )

        return [x for x in gambles if not dominated(x)]


class EAdmissibility(ChoiceRule):
    """Keep a gamble iff it maximizes conditional expectation under at least
    one mass function in the credal list."""

    name = "e_admissibility"
    needs = frozenset({"credal"})

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        admissible: set[Gamble] = set()
        for p in self.context.credal:
            scored = [(self._exp(p, g, given), g) for g in gambles]
            best = max(s for s, _ in scored)
            admissible.update(g for s, g in scored if s == best)
        return [g for g in gambles if g in admissible]


class GammaMaximin(ChoiceRule):
    """Maximize the worst-case conditional expectation over the credal list."""

    name = "gamma_maximin"
    needs = frozenset({"credal"})

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        credal = self.context.credal
        scored = [
            (min(self._exp(p, g, given) for p in credal), g) for g in gambles
        ]
        best = max(s for s, _ in scored)
        return [g for s, g in scored if s == best]


class IntervalDominance(ChoiceRule):
    """Keep a gamble unless another's lower expectation strictly exceeds its
    upper expectation over the credal list."""

    name = "interval_dominance"
    needs = frozenset({"credal"})

    def _select(self, gambles: GambleSet, given: Event) -> list[Gamble]:
        credal = self.context.credal
        lower = {g: min(self._exp(p, g, given) for p in credal) for g in gambles}
        upper = {g: max(self._exp(p, g, given) for p in credal) for g in gambles}
        return [
            x for x in gambles if not any(lower[y] > upper[x] for y in gambles)
        ]


RULES: dict[str, type[ChoiceRule]] = {
    cls.name: cls
    for cls in (
        EuMax,
        PointwiseDominance,
        Maximality,
        EAdmissibility,
        GammaMaximin,
        IntervalDominance,
    )
}


def make_rule(name: str, context: ChoiceContext) -> ChoiceRule:
    try:
        cls = RULES[name]
    except KeyError:
        raise ValueError(
            f"unknown rule {name!r}; known: {', '.join(sorted(RULES))}"
        ) from None
    return cls(context)
