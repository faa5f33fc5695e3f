"""Normal form and backward-induction solvers, extensive-form extraction,
and the normal/extensive equivalence check."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import EmptySolution, EnumerationLimitExceeded
from .model import Event, Gamble, GambleSet, combine_on_partition
from .rules import ChoiceRule
from .trees import (
    DEFAULT_ENUMERATION_CAP,
    Chance,
    Decision,
    DecisionTree,
    Leaf,
    Node,
    NodeId,
    NormalFormDecision,
    gamb,
    nfd,
    validate,
)

Solution = frozenset[NormalFormDecision]


def induced_gambles(solution: Iterable[NormalFormDecision]) -> GambleSet:
    return GambleSet(member.gamble for member in solution)


@dataclass(frozen=True)
class SolveReport:
    """Solver output: the optimal strategies, the gambles they induce, and
    deterministic size statistics."""

    solution: Solution
    induced: GambleSet
    method: str
    stats: dict

    def members(self) -> tuple[NormalFormDecision, ...]:
        return tuple(sorted(self.solution, key=lambda m: m.choices))


def norm_opt(
    tree: DecisionTree, rule: ChoiceRule, cap: int = DEFAULT_ENUMERATION_CAP
) -> SolveReport:
    """The normal form operator: keep exactly those strategies whose induced
    gamble the rule selects from the tree's full gamble set given its event."""
    validate(tree)
    decisions = nfd(tree, cap)
    pool = gamb(tree, cap)
    chosen = rule.select(pool, tree.root_event)
    solution = frozenset(d for d in decisions if d.gamble in chosen)
    assert induced_gambles(solution) == chosen
    return SolveReport(
        solution=solution,
        induced=chosen,
        method="normal",
        stats={
            "nodes": tree.node_counts(),
            "nfd_count": len(decisions),
            "gamble_count": len(pool),
            "solution_count": len(solution),
        },
    )


def back_opt(
    tree: DecisionTree, rule: ChoiceRule, cap: int = DEFAULT_ENUMERATION_CAP
) -> SolveReport:
    """Backward induction: solve every subtree, glue the survivors, and
    re-apply the rule at each node on the glued candidates' gambles."""
    validate(tree)
    stages: list[dict] = []

    def solve(node: Node, path: NodeId, ev: Event) -> list[tuple[dict, Gamble]]:
        if isinstance(node, Leaf):
            return [({}, Gamble.constant(tree.space, node.reward))]
        if isinstance(node, Decision):
            candidates: list[tuple[dict, Gamble]] = []
            for i, child in enumerate(node.children):
                for choices, gamble in solve(child, path + (i,), ev):
                    candidates.append(({path: i, **choices}, gamble))
        else:
            per_branch = [
                (event, solve(child, path + (i,), ev & event))
                for i, (event, child) in enumerate(node.branches)
            ]
            count = 1
            for _, sols in per_branch:
                count *= len(sols)
            if count > cap:
                raise EnumerationLimitExceeded(
                    f"{count} glued candidates exceed the cap of {cap}"
                )
            candidates = []
            for combo in itertools.product(*(sols for _, sols in per_branch)):
                merged: dict = {}
                parts = []
                for (event, _), (choices, gamble) in zip(per_branch, combo):
                    merged.update(choices)
                    parts.append((event, gamble))
                candidates.append((merged, combine_on_partition(parts)))
        pool = GambleSet(g for _, g in candidates)
        chosen = rule.select(pool, ev)
        kept = [(c, g) for c, g in candidates if g in chosen]
        stages.append(
            {"node": list(path), "candidates": len(candidates), "kept": len(kept)}
        )
        return kept

    survivors = solve(tree.root, (), tree.root_event)
    solution = frozenset(
        NormalFormDecision.of(tree, choices) for choices, _ in survivors
    )
    return SolveReport(
        solution=solution,
        induced=induced_gambles(solution),
        method="backward",
        stats={
            "nodes": tree.node_counts(),
            "stages": stages,
            "solution_count": len(solution),
        },
    )


@dataclass(frozen=True)
class ExtensiveSolution:
    """The source tree with a kept/pruned mark on every decision arc.

    Arcs are identified by the child node's path. Regions below pruned arcs
    are retained in the tree but flagged unreachable, so node addressing
    stays stable.
    """

    tree: DecisionTree
    kept_arcs: frozenset[NodeId]
    pruned_arcs: frozenset[NodeId]
    unreachable: frozenset[NodeId]

    def is_kept(self, arc: NodeId) -> bool:
        return arc in self.kept_arcs


def extract_extensive(
    tree: DecisionTree, solution: Iterable[NormalFormDecision]
) -> ExtensiveSolution:
    """Keep a decision arc iff its child lies in at least one member of the
    solution; chance arcs are always kept within the reachable region."""
    members = list(solution)
    if not members:
        raise EmptySolution("cannot extract an extensive form from no members")
    kept: set[NodeId] = set()
    for member in members:
        kept.update(member.arc_paths())

    pruned: set[NodeId] = set()
    unreachable: set[NodeId] = set()

    def walk(node: Node, path: NodeId, reachable: bool) -> None:
        if not reachable and path:
            unreachable.add(path)
        if isinstance(node, Decision):
            for i, child in enumerate(node.children):
                arc = path + (i,)
                child_reachable = reachable and arc in kept
                if reachable and arc not in kept:
                    pruned.add(arc)
                walk(child, arc, child_reachable)
        elif isinstance(node, Chance):
            for i, (_, child) in enumerate(node.branches):
                walk(child, path + (i,), reachable)

    walk(tree.root, (), True)
    return ExtensiveSolution(
        tree=tree,
        kept_arcs=frozenset(kept),
        pruned_arcs=frozenset(pruned),
        unreachable=frozenset(unreachable),
    )


def nfd_of_extensive(
    extensive: ExtensiveSolution, cap: int = DEFAULT_ENUMERATION_CAP
) -> Solution:
    """All strategies of the source tree that only use kept decision arcs."""
    tree = extensive.tree

    def enumerate_node(node: Node, path: NodeId) -> list[dict[NodeId, int]]:
        if isinstance(node, Leaf):
            return [{}]
        if isinstance(node, Decision):
            out = []
            for i, child in enumerate(node.children):
                if path + (i,) not in extensive.kept_arcs:
                    continue
                for sub in enumerate_node(child, path + (i,)):
                    out.append({path: i, **sub})
            return out
        per_branch = [
            enumerate_node(child, path + (i,))
            for i, (_, child) in enumerate(node.branches)
        ]
        count = 1
        for sols in per_branch:
            count *= len(sols)
        if count > cap:
            raise EnumerationLimitExceeded(
                f"{count} strategies exceed the cap of {cap}"
            )
        out = []
        for combo in itertools.product(*per_branch):
            merged: dict[NodeId, int] = {}
            for sub in combo:
                merged.update(sub)
            out.append(merged)
        return out

    return frozenset(
        NormalFormDecision.of(tree, choices)
        for choices in enumerate_node(tree.root, ())
    )


@dataclass(frozen=True)
class ExtensiveEquivalence:
    """Whether the extracted extensive form re-expands to exactly the normal
    form solution; `witness` is a strategy of the extensive form missing from
    the normal form solution."""

    equal: bool
    solution: Solution
    extensive: ExtensiveSolution
    witness: Optional[NormalFormDecision] = None

    def __bool__(self) -> bool:
        return self.equal


def equivalence_for_solution(
    tree: DecisionTree,
    solution: Iterable[NormalFormDecision],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ExtensiveEquivalence:
    members = frozenset(solution)
    extensive = extract_extensive(tree, members)
    expanded = nfd_of_extensive(extensive, cap)
    extra = sorted(expanded - members, key=lambda m: m.choices)
    return ExtensiveEquivalence(
        equal=not extra,
        solution=members,
        extensive=extensive,
        witness=extra[0] if extra else None,
    )


def check_normal_extensive_equivalence(
    tree: DecisionTree, rule: ChoiceRule, cap: int = DEFAULT_ENUMERATION_CAP
) -> ExtensiveEquivalence:
    report = norm_opt(tree, rule, cap)
    return equivalence_for_solution(tree, report.solution, cap)
