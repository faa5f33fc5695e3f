"""Property identifiers and the instance shapes the law checkers consume.

Each instance type carries exactly the data quantified over by one family of
properties, plus `validate` (the property's preconditions), canonical
shrinking moves, and re-mapping onto a smaller possibility space.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Sequence, Union

from .errors import MalformedInstance
from .model import (
    Event,
    Gamble,
    GambleSet,
    PossibilitySpace,
    RewardTable,
    check_a_consistency,
    is_partition,
)


class PropertyId(Enum):
    P1_conditioning = "P1"
    P2_intersection = "P2"
    P3_mixture = "P3"
    P4_strong_path_independence = "P4"
    P5_very_strong_path_independence = "P5"
    P6_total_preorder = "P6"
    P7_backward_conditioning = "P7"
    P8_insensitivity = "P8"
    P9_preservation = "P9"
    P10_backward_mixture = "P10"
    P11_path_independence = "P11"
    L_setsum_factorization = "L"

    @classmethod
    def parse(cls, text: str) -> PropertyId:
        for member in cls:
            if text in (member.name, member.value):
                return member
        raise ValueError(f"unknown property {text!r}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise MalformedInstance(message)


def _require_consistent(gambles, event: Event, what: str) -> None:
    verdict = check_a_consistency(gambles, event)
    _require(bool(verdict), f"{what} is not consistent with {event!r}")


def _map_space(space: PossibilitySpace, kept: Sequence[int]) -> PossibilitySpace:
    return PossibilitySpace(tuple(space.states[i] for i in kept))


def _map_event(event: Event, space: PossibilitySpace, kept: Sequence[int]) -> Event:
    bits = 0
    for new_index, old_index in enumerate(kept):
        if event.contains_index(old_index):
            bits |= 1 << new_index
    return Event(space, bits)


def _map_gamble(g: Gamble, space: PossibilitySpace, kept: Sequence[int]) -> Gamble:
    return Gamble(space, tuple(g.values[i] for i in kept))


def _map_set(s: GambleSet, space: PossibilitySpace, kept: Sequence[int]) -> GambleSet:
    return GambleSet(_map_gamble(g, space, kept) for g in s)


@dataclass(frozen=True)
class ConditioningInstance:
    """(gambles, given): shape for the conditioning property."""

    gambles: GambleSet
    given: Event

    @property
    def space(self) -> PossibilitySpace:
        return self.given.space

    def validate(self) -> None:
        _require(not self.given.is_empty, "conditioning event is empty")
        _require(len(self.gambles) > 0, "gamble set is empty")
        _require_consistent(self.gambles, self.given, "gamble set")

    def drop_gamble_candidates(self) -> Iterator[ConditioningInstance]:
        for g in self.gambles:
            rest = [x for x in self.gambles if x != g]
            if rest:
                yield replace(self, gambles=GambleSet(rest))

    def restricted(self, kept: Sequence[int]) -> ConditioningInstance:
        space = _map_space(self.space, kept)
        return ConditioningInstance(
            _map_set(self.gambles, space, kept), _map_event(self.given, space, kept)
        )


@dataclass(frozen=True)
class SubsetInstance:
    """(gambles, subset, given): shape for intersection / insensitivity /
    preservation properties."""

    gambles: GambleSet
    subset: GambleSet
    given: Event

    @property
    def space(self) -> PossibilitySpace:
        return self.given.space

    def validate(self) -> None:
        _require(not self.given.is_empty, "conditioning event is empty")
        _require(len(self.subset) > 0, "subset is empty")
        _require(self.subset.issubset(self.gambles), "subset not within the set")
        _require_consistent(self.gambles, self.given, "gamble set")

    def drop_gamble_candidates(self) -> Iterator[SubsetInstance]:
        for g in self.gambles:
            rest = GambleSet(x for x in self.gambles if x != g)
            sub = GambleSet(x for x in self.subset if x != g)
            if len(rest) > 0 and len(sub) > 0:
                yield SubsetInstance(rest, sub, self.given)

    def restricted(self, kept: Sequence[int]) -> SubsetInstance:
        space = _map_space(self.space, kept)
        return SubsetInstance(
            _map_set(self.gambles, space, kept),
            _map_set(self.subset, space, kept),
            _map_event(self.given, space, kept),
        )


@dataclass(frozen=True)
class MixtureInstance:
    """(gambles, other, part, given): gambles live on `part` of `given`,
    `other` on the complement; shape for the mixture properties."""

    gambles: GambleSet
    other: Gamble
    part: Event
    given: Event

    @property
    def space(self) -> PossibilitySpace:
        return self.given.space

    def validate(self) -> None:
        inside = self.part & self.given
        outside = self.part.complement() & self.given
        _require(not inside.is_empty, "part does not meet the conditioning event")
        _require(not outside.is_empty, "part covers the conditioning event")
        _require(len(self.gambles) > 0, "gamble set is empty")
        _require_consistent(self.gambles, inside, "gamble set")
        _require_consistent([self.other], outside, "the off-part gamble")

    def drop_gamble_candidates(self) -> Iterator[MixtureInstance]:
        for g in self.gambles:
            rest = [x for x in self.gambles if x != g]
            if rest:
                yield replace(self, gambles=GambleSet(rest))

    def restricted(self, kept: Sequence[int]) -> MixtureInstance:
        space = _map_space(self.space, kept)
        return MixtureInstance(
            _map_set(self.gambles, space, kept),
            _map_gamble(self.other, space, kept),
            _map_event(self.part, space, kept),
            _map_event(self.given, space, kept),
        )


@dataclass(frozen=True)
class FamilyInstance:
    """(parts, given): a family of gamble sets; shape for the path
    independence / total preorder properties."""

    parts: tuple[GambleSet, ...]
    given: Event

    @property
    def space(self) -> PossibilitySpace:
        return self.given.space

    def union(self) -> GambleSet:
        out = GambleSet([])
        for part in self.parts:
            out = out.union(part)
        return out

    def validate(self) -> None:
        _require(not self.given.is_empty, "conditioning event is empty")
        _require(len(self.parts) > 0, "family is empty")
        _require(all(len(p) > 0 for p in self.parts), "family contains an empty set")
        _require_consistent(self.union(), self.given, "family union")

    def drop_gamble_candidates(self) -> Iterator[FamilyInstance]:
        for index, part in enumerate(self.parts):
            for g in part:
                rest = GambleSet(x for x in part if x != g)
                if len(rest) > 0:
                    parts = self.parts[:index] + (rest,) + self.parts[index + 1:]
                elif len(self.parts) > 1:
                    parts = self.parts[:index] + self.parts[index + 1:]
                else:
                    continue
                yield FamilyInstance(parts, self.given)

    def restricted(self, kept: Sequence[int]) -> FamilyInstance:
        space = _map_space(self.space, kept)
        return FamilyInstance(
            tuple(_map_set(p, space, kept) for p in self.parts),
            _map_event(self.given, space, kept),
        )


@dataclass(frozen=True)
class BackwardConditioningInstance:
    """(gambles, part, given, others): the backward-conditioning shape; the
    `others` set supplies the off-part continuations."""

    gambles: GambleSet
    part: Event
    given: Event
    others: GambleSet

    @property
    def space(self) -> PossibilitySpace:
        return self.given.space

    def validate(self) -> None:
        inside = self.part & self.given
        outside = self.part.complement() & self.given
        _require(not inside.is_empty, "part does not meet the conditioning event")
        _require(not outside.is_empty, "part covers the conditioning event")
        _require(len(self.gambles) > 0, "gamble set is empty")
        _require(len(self.others) > 0, "off-part set is empty")
        _require_consistent(self.gambles, inside, "gamble set")
        _require_consistent(self.others, outside, "off-part set")

    def drop_gamble_candidates(self) -> Iterator[BackwardConditioningInstance]:
        for g in self.gambles:
            rest = [x for x in self.gambles if x != g]
            if rest:
                yield replace(self, gambles=GambleSet(rest))
        for z in self.others:
            rest = [x for x in self.others if x != z]
            if rest:
                yield replace(self, others=GambleSet(rest))

    def restricted(self, kept: Sequence[int]) -> BackwardConditioningInstance:
        space = _map_space(self.space, kept)
        return BackwardConditioningInstance(
            _map_set(self.gambles, space, kept),
            _map_event(self.part, space, kept),
            _map_event(self.given, space, kept),
            _map_set(self.others, space, kept),
        )


@dataclass(frozen=True)
class SetSumInstance:
    """(partition, parts, given): one gamble set per partition block; shape
    for the set-sum factorization law."""

    partition: tuple[Event, ...]
    parts: tuple[GambleSet, ...]
    given: Event

    @property
    def space(self) -> PossibilitySpace:
        return self.given.space

    def validate(self) -> None:
        _require(len(self.partition) == len(self.parts), "one set per block required")
        _require(is_partition(list(self.partition)), "blocks do not partition the space")
        _require(not self.given.is_empty, "conditioning event is empty")
        for block, part in zip(self.partition, self.parts):
            inside = block & self.given
            _require(not inside.is_empty, "a block misses the conditioning event")
            _require(len(part) > 0, "a block's gamble set is empty")
            _require_consistent(part, inside, "a block's gamble set")

    def drop_gamble_candidates(self) -> Iterator[SetSumInstance]:
        for index, part in enumerate(self.parts):
            for g in part:
                rest = GambleSet(x for x in part if x != g)
                if len(rest) > 0:
                    yield SetSumInstance(
                        self.partition,
                        self.parts[:index] + (rest,) + self.parts[index + 1:],
                        self.given,
                    )

    def restricted(self, kept: Sequence[int]) -> SetSumInstance:
        space = _map_space(self.space, kept)
        return SetSumInstance(
            tuple(_map_event(e, space, kept) for e in self.partition),
            tuple(_map_set(p, space, kept) for p in self.parts),
            _map_event(self.given, space, kept),
        )


Instance = Union[
    ConditioningInstance,
    SubsetInstance,
    MixtureInstance,
    FamilyInstance,
    BackwardConditioningInstance,
    SetSumInstance,
]

INSTANCE_SHAPES: dict[PropertyId, type] = {
    PropertyId.P1_conditioning: ConditioningInstance,
    PropertyId.P2_intersection: SubsetInstance,
    PropertyId.P3_mixture: MixtureInstance,
    PropertyId.P4_strong_path_independence: FamilyInstance,
    PropertyId.P5_very_strong_path_independence: FamilyInstance,
    PropertyId.P6_total_preorder: FamilyInstance,
    PropertyId.P7_backward_conditioning: BackwardConditioningInstance,
    PropertyId.P8_insensitivity: SubsetInstance,
    PropertyId.P9_preservation: SubsetInstance,
    PropertyId.P10_backward_mixture: MixtureInstance,
    PropertyId.P11_path_independence: FamilyInstance,
    PropertyId.L_setsum_factorization: SetSumInstance,
}


def instance_gambles(instance: Instance) -> GambleSet:
    """Every gamble mentioned anywhere in the instance."""
    if isinstance(instance, ConditioningInstance):
        return instance.gambles
    if isinstance(instance, SubsetInstance):
        return instance.gambles
    if isinstance(instance, MixtureInstance):
        return instance.gambles.union(GambleSet([instance.other]))
    if isinstance(instance, FamilyInstance):
        return instance.union()
    if isinstance(instance, BackwardConditioningInstance):
        return instance.gambles.union(instance.others)
    if isinstance(instance, SetSumInstance):
        out = GambleSet([])
        for part in instance.parts:
            out = out.union(part)
        return out
    raise TypeError(f"not an instance: {instance!r}")


def reward_table_for_instance(instance: Instance) -> RewardTable:
    """Utility table for instances built over literal reward symbols."""
    symbols: set[str] = set()
    for g in instance_gambles(instance):
        symbols.update(g.values)
    return RewardTable.from_literals(symbols)
