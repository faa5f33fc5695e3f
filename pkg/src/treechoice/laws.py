"""Executable property checkers, falsification with witness shrinking, and
subtree-perfectness reports.

Checkers are falsifiers: a clean run over sampled instances only ever
corroborates a property, it never proves it. Violations always carry a
witness that re-checks on its own.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import MalformedInstance
from .model import Gamble, GambleSet, combine_on_partition, gamble_set_sum
from .props import (
    BackwardConditioningInstance,
    ConditioningInstance,
    FamilyInstance,
    INSTANCE_SHAPES,
    Instance,
    MixtureInstance,
    PropertyId,
    SetSumInstance,
    SubsetInstance,
)
from .rules import ChoiceRule
from .solve import SolveReport, norm_opt
from .trees import (
    DEFAULT_ENUMERATION_CAP,
    Chance,
    Decision,
    DecisionTree,
    NodeId,
    NormalFormDecision,
    chance_expansion,
    restrict_solution,
    validate,
)

CORROBORATED = "corroborated"
VIOLATED = "violated"


@dataclass(frozen=True)
class InstanceCheck:
    """Verdict for a single property instance. A vacuous pass means the
    property's premise never fired on this instance."""

    prop: PropertyId
    holds: bool
    vacuous: bool = False
    witness: Optional[dict] = None


def _holds(prop: PropertyId, vacuous: bool = False) -> InstanceCheck:
    return InstanceCheck(prop, True, vacuous=vacuous)


def _violated(prop: PropertyId, witness: dict) -> InstanceCheck:
    return InstanceCheck(prop, False, witness=witness)


def _mix(instance: MixtureInstance, on_part: Gamble) -> Gamble:
    return combine_on_partition(
        [(instance.part, on_part), (instance.part.complement(), instance.other)]
    )


def _check_conditioning(rule: ChoiceRule, inst: ConditioningInstance) -> InstanceCheck:
    prop = PropertyId.P1_conditioning
    selected = rule.select(inst.gambles, inst.given)
    premise_fired = False
    for x in selected:
        for y in inst.gambles:
            if x != y and x.equal_on(y, inst.given):
                premise_fired = True
                if y not in selected:
                    return _violated(
                        prop,
                        {
                            "selected": x,
                            "equal_on_event_but_rejected": y,
                            "selection": selected,
                        },
                    )
    return _holds(prop, vacuous=not premise_fired)


def _check_intersection(rule: ChoiceRule, inst: SubsetInstance) -> InstanceCheck:
    prop = PropertyId.P2_intersection
    sel_all = rule.select(inst.gambles, inst.given)
    expected = sel_all.intersection(inst.subset)
    if len(expected) == 0:
        return _holds(prop, vacuous=True)
    sel_sub = rule.select(inst.subset, inst.given)
    if sel_sub == expected:
        return _holds(prop)
    return _violated(
        prop,
        {"selection_on_set": sel_all, "expected": expected, "actual": sel_sub},
    )


def _check_mixture(rule: ChoiceRule, inst: MixtureInstance) -> InstanceCheck:
    prop = PropertyId.P3_mixture
    lhs = rule.select(GambleSet(_mix(inst, x) for x in inst.gambles), inst.given)
    inner = rule.select(inst.gambles, inst.part & inst.given)
    rhs = GambleSet(_mix(inst, x) for x in inner)
    if lhs == rhs:
        return _holds(prop)
    return _violated(prop, {"expected": rhs, "actual": lhs, "inner_selection": inner})


def _check_strong_path_independence(
    rule: ChoiceRule, inst: FamilyInstance
) -> InstanceCheck:
    prop = PropertyId.P4_strong_path_independence
    union = inst.union()
    overall = rule.select(union, inst.given)
    per_part = [rule.select(part, inst.given) for part in inst.parts]
    eligible = [i for i, sel in enumerate(per_part) if sel.issubset(overall)]
    covered = GambleSet([])
    for i in eligible:
        covered = covered.union(per_part[i])
    if eligible and covered == overall:
        return _holds(prop)
    return _violated(
        prop,
        {
            "overall": overall,
            "per_part": per_part,
            "best_cover": covered,
        },
    )


def _check_very_strong_path_independence(
    rule: ChoiceRule, inst: FamilyInstance
) -> InstanceCheck:
    prop = PropertyId.P5_very_strong_path_independence
    union = inst.union()
    overall = rule.select(union, inst.given)
    per_part = [rule.select(part, inst.given) for part in inst.parts]
    covered = GambleSet([])
    for part, sel in zip(inst.parts, per_part):
        if len(part.intersection(overall)) > 0:
            covered = covered.union(sel)
    if covered == overall:
        return _holds(prop)
    return _violated(
        prop, {"overall": overall, "per_part": per_part, "required_union": covered}
    )


def _check_total_preorder(rule: ChoiceRule, inst: FamilyInstance) -> InstanceCheck:
    prop = PropertyId.P6_total_preorder
    members = list(inst.union())
    prefers: dict[tuple[Gamble, Gamble], bool] = {}
    for x, y in itertools.combinations(members, 2):
        pair_selection = rule.select(GambleSet([x, y]), inst.given)
        prefers[(x, y)] = x in pair_selection
        prefers[(y, x)] = y in pair_selection

    def ge(a: Gamble, b: Gamble) -> bool:
        return True if a == b else prefers[(a, b)]

    for x, y in itertools.combinations(members, 2):
        if not ge(x, y) and not ge(y, x):
            return _violated(prop, {"incomparable_pair": (x, y)})
    for x, y, z in itertools.permutations(members, 3):
        if ge(x, y) and ge(y, z) and not ge(x, z):
            return _violated(prop, {"intransitive_cycle": (x, y, z)})
    for part in inst.parts:
        maximal = GambleSet(
            x for x in part if all(ge(x, y) for y in part)
        )
        selected = rule.select(part, inst.given)
        if maximal != selected:
            return _violated(
                prop,
                {"set": part, "revealed_maximal": maximal, "selected": selected},
            )
    return _holds(prop)


def _check_backward_conditioning(
    rule: ChoiceRule, inst: BackwardConditioningInstance
) -> InstanceCheck:
    prop = PropertyId.P7_backward_conditioning
    inside = inst.part & inst.given
    complement = inst.part.complement()
    sel_inside = rule.select(inst.gambles, inside)
    big = GambleSet(
        combine_on_partition([(inst.part, x), (complement, z)])
        for x in inst.gambles
        for z in inst.others
    )
    sel_big = rule.select(big, inst.given)
    premise_fired = False
    for x in sel_inside:
        anchored = any(
            combine_on_partition([(inst.part, x), (complement, z)]) in sel_big
            for z in inst.others
        )
        if not anchored:
            continue
        for y in inst.gambles:
            if x != y and x.equal_on(y, inst.part):
                premise_fired = True
                if y not in sel_inside:
                    return _violated(
                        prop,
                        {
                            "selected": x,
                            "equal_on_part_but_rejected": y,
                            "inner_selection": sel_inside,
                        },
                    )
    return _holds(prop, vacuous=not premise_fired)


def _check_insensitivity(rule: ChoiceRule, inst: SubsetInstance) -> InstanceCheck:
    prop = PropertyId.P8_insensitivity
    sel_all = rule.select(inst.gambles, inst.given)
    if not sel_all.issubset(inst.subset):
        return _holds(prop, vacuous=True)
    sel_sub = rule.select(inst.subset, inst.given)
    if sel_sub == sel_all:
        return _holds(prop)
    return _violated(prop, {"expected": sel_all, "actual": sel_sub})


def _check_preservation(rule: ChoiceRule, inst: SubsetInstance) -> InstanceCheck:
    prop = PropertyId.P9_preservation
    sel_all = rule.select(inst.gambles, inst.given)
    lower = sel_all.intersection(inst.subset)
    if len(lower) == 0:
        return _holds(prop, vacuous=True)
    sel_sub = rule.select(inst.subset, inst.given)
    if lower.issubset(sel_sub):
        return _holds(prop)
    return _violated(
        prop, {"required_members": lower, "actual": sel_sub, "selection_on_set": sel_all}
    )


def _check_backward_mixture(rule: ChoiceRule, inst: MixtureInstance) -> InstanceCheck:
    prop = PropertyId.P10_backward_mixture
    lhs = rule.select(GambleSet(_mix(inst, x) for x in inst.gambles), inst.given)
    inner = rule.select(inst.gambles, inst.part & inst.given)
    rhs = GambleSet(_mix(inst, x) for x in inner)
    if lhs.issubset(rhs):
        return _holds(prop)
    return _violated(prop, {"upper_bound": rhs, "actual": lhs, "inner_selection": inner})


def _check_path_independence(rule: ChoiceRule, inst: FamilyInstance) -> InstanceCheck:
    prop = PropertyId.P11_path_independence
    union = inst.union()
    overall = rule.select(union, inst.given)
    inner = GambleSet([])
    for part in inst.parts:
        inner = inner.union(rule.select(part, inst.given))
    second_round = rule.select(inner, inst.given)
    if overall == second_round:
        return _holds(prop)
    return _violated(
        prop, {"direct": overall, "two_stage": second_round, "survivors": inner}
    )


def _check_setsum_factorization(rule: ChoiceRule, inst: SetSumInstance) -> InstanceCheck:
    prop = PropertyId.L_setsum_factorization
    combined = gamble_set_sum(list(inst.partition), list(inst.parts))
    lhs = rule.select(combined, inst.given)
    factored = [
        rule.select(part, block & inst.given)
        for block, part in zip(inst.partition, inst.parts)
    ]
    rhs = gamble_set_sum(list(inst.partition), factored)
    if lhs == rhs:
        return _holds(prop)
    return _violated(prop, {"expected": rhs, "actual": lhs, "per_block": factored})


_CHECKERS: dict[PropertyId, Callable[[ChoiceRule, Instance], InstanceCheck]] = {
    PropertyId.P1_conditioning: _check_conditioning,
    PropertyId.P2_intersection: _check_intersection,
    PropertyId.P3_mixture: _check_mixture,
    PropertyId.P4_strong_path_independence: _check_strong_path_independence,
    PropertyId.P5_very_strong_path_independence: _check_very_strong_path_independence,
    PropertyId.P6_total_preorder: _check_total_preorder,
    PropertyId.P7_backward_conditioning: _check_backward_conditioning,
    PropertyId.P8_insensitivity: _check_insensitivity,
    PropertyId.P9_preservation: _check_preservation,
    PropertyId.P10_backward_mixture: _check_backward_mixture,
    PropertyId.P11_path_independence: _check_path_independence,
    PropertyId.L_setsum_factorization: _check_setsum_factorization,
}


def check_property_instance(
    prop: PropertyId, rule: ChoiceRule, instance: Instance
) -> InstanceCheck:
    """Evaluate the property's equality/inclusion literally on one instance."""
    expected_shape = INSTANCE_SHAPES[prop]
    if not isinstance(instance, expected_shape):
        raise MalformedInstance(
            f"{prop.value} takes a {expected_shape.__name__}, "
            f"got {type(instance).__name__}"
        )
    instance.validate()
    return _CHECKERS[prop](rule, instance)


@dataclass(frozen=True)
class ViolationWitness:
    """A re-checkable counterexample: the (shrunk) instance together with the
    exact rule (context included) it violates."""

    instance: Instance
    rule: ChoiceRule
    detail: dict


@dataclass(frozen=True)
class LawReport:
    prop: PropertyId
    rule_name: str
    instances_checked: int
    verdict: str
    witness: Optional[ViolationWitness] = None

    @property
    def violated(self) -> bool:
        return self.verdict == VIOLATED


def _still_violated(prop: PropertyId, rule: ChoiceRule, instance: Instance) -> Optional[dict]:
    try:
        result = check_property_instance(prop, rule, instance)
    except MalformedInstance:
        return None
    return result.witness if not result.holds else None


def shrink_violation(
    prop: PropertyId, rule: ChoiceRule, instance: Instance
) -> tuple[Instance, ChoiceRule, dict]:
    """Greedily drop gambles, then states, while the violation persists.

    Deterministic: candidates are tried in canonical order and the first
    successful reduction restarts the scan. Mass functions are renormalized
    when states are dropped.
    """
    detail = _still_violated(prop, rule, instance)
    assert detail is not None, "shrink_violation needs a violating instance"
    current, current_rule = instance, rule
    reduced = True
    while reduced:
        reduced = False
        for candidate in current.drop_gamble_candidates():
            found = _still_violated(prop, current_rule, candidate)
            if found is not None:
                current, detail = candidate, found
                reduced = True
                break
        if reduced:
            continue
        size = current.space.size
        if size <= 1:
            continue
        for drop in range(size):
            kept = tuple(i for i in range(size) if i != drop)
            candidate = current.restricted(kept)
            candidate_rule = current_rule.rebind(
                current_rule.context.restricted(candidate.space, kept)
            )
            found = _still_violated(prop, candidate_rule, candidate)
            if found is not None:
                current, current_rule, detail = candidate, candidate_rule, found
                reduced = True
                break
    return current, current_rule, detail


def falsify_property(
    prop: PropertyId,
    rule_policy: Callable,
    config=None,
    budget: int = 1000,
    seed: int = 0,
) -> LawReport:
    """Search sampled instances for a violation; stop and shrink at the first.

    `rule_policy(space, rewards, rng)` binds the rule to each generated
    instance's possibility space. Budget exhaustion corroborates, it never
    proves.
    """
    from . import generate  # deferred: generate builds the instances checked here

    config = generate.GenConfig() if config is None else config
    rule_name = None
    for index in range(budget):
        instance = generate.random_gamble_instance(prop, config, seed=generate.subseed(seed, index))
        rewards = generate.reward_table_for_instance(instance)
        rng = generate.rng_for(seed, "context", index)
        rule = rule_policy(instance.space, rewards, rng)
        rule_name = rule.name
        result = check_property_instance(prop, rule, instance)
        if not result.holds:
            shrunk, shrunk_rule, detail = shrink_violation(prop, rule, instance)
            return LawReport(
                prop=prop,
                rule_name=rule.name,
                instances_checked=index + 1,
                verdict=VIOLATED,
                witness=ViolationWitness(shrunk, shrunk_rule, detail),
            )
    return LawReport(
        prop=prop,
        rule_name=rule_name if rule_name is not None else "?",
        instances_checked=budget,
        verdict=CORROBORATED,
    )


def divergence_tree_for_mixture_witness(instance: MixtureInstance) -> DecisionTree:
    """Convert a backward-mixture violation into a tree where backward
    induction and the normal form operator disagree.

    The part-event carries a decision fan over the instance's gambles, the
    complement carries the single continuation. A gamble that is optimal in
    the mixed set but not on the part alone is then reachable for the normal
    form operator yet pruned by the subtree stage of backward induction.
    """
    fan = Decision(tuple(chance_expansion(g) for g in instance.gambles))
    root = Chance(
        (
            (instance.part, fan),
            (instance.part.complement(), chance_expansion(instance.other)),
        )
    )
    return validate(DecisionTree(instance.space, root, instance.given))


@dataclass(frozen=True)
class NodeComparison:
    """One node's verdict: the subtree's own solution vs the restriction of
    the root solution to that node."""

    node: NodeId
    ok: bool
    subtree_solution: frozenset[NormalFormDecision]
    restricted: frozenset[NormalFormDecision]


@dataclass(frozen=True)
class PerfectionReport:
    weak: bool
    root: SolveReport
    comparisons: tuple[NodeComparison, ...]

    @property
    def perfect(self) -> bool:
        return all(c.ok for c in self.comparisons)

    def violations(self) -> tuple[NodeComparison, ...]:
        return tuple(c for c in self.comparisons if not c.ok)


def check_weak_subtree_perfectness(
    tree: DecisionTree, rule: ChoiceRule, cap: int = DEFAULT_ENUMERATION_CAP
) -> PerfectionReport:
    """Inclusion-only variant: every restriction of the root solution must
    sit inside the subtree's own solution."""
    return check_subtree_perfectness(tree, rule, weak=True, cap=cap)


def check_subtree_perfectness(
    tree: DecisionTree,
    rule: ChoiceRule,
    weak: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> PerfectionReport:
    """Compare optimize-then-restrict against restrict-then-optimize at every
    node reached by the root solution. Strong perfectness demands equality,
    the weak variant only inclusion of the restriction."""
    root_report = norm_opt(tree, rule, cap)
    comparisons = []
    for path in tree.paths():
        if not any(m.contains_node(path) for m in root_report.solution):
            continue
        restricted = restrict_solution(root_report.solution, path)
        if path:
            subtree_solution = norm_opt(tree.subtree_at(path), rule, cap).solution
        else:
            subtree_solution = root_report.solution
        ok = (
            restricted <= subtree_solution
            if weak
            else restricted == subtree_solution
        )
        comparisons.append(NodeComparison(path, ok, subtree_solution, restricted))
    return PerfectionReport(weak=weak, root=root_report, comparisons=tuple(comparisons))
