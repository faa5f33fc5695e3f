"""Differential checks against a play-out oracle.

The oracle computes a strategy's gamble by simulating each state of the
world through the tree (follow the kept arc at decision nodes, the branch
containing the state at chance nodes) and re-implements two selection rules
from scratch. It shares no code path with the library's gamble algebra.
"""

from fractions import Fraction

import pytest

from treechoice.generate import (
    GenConfig,
    random_consistent_tree,
    reward_table_for_tree,
    rng_for,
    seeded_rule_policy,
    subseed,
)
from treechoice.solve import norm_opt
from treechoice.trees import Chance, Decision, Leaf, nfd

CONFIG = GenConfig(max_depth=4, omega_range=(2, 6), nfd_ceiling=250)


def play_out(tree, choices, state_index):
    node = tree.root
    path = ()
    while not isinstance(node, Leaf):
        if isinstance(node, Decision):
            index = choices[path]
            node = node.children[index]
        else:
            index = next(
                i
                for i, (event, _) in enumerate(node.branches)
                if event.contains_index(state_index)
            )
            node = node.branches[index][1]
        path = path + (index,)
    return node.reward


def oracle_gamble(tree, member):
    return tuple(
        play_out(tree, member.choice_map, i) for i in range(tree.space.size)
    )


def oracle_eu_solution(tree, members, probability, utilities):
    given = tree.root_event
    weight = sum(probability.masses[i] for i in given.indices())
    scores = {}
    for member in members:
        values = oracle_gamble(tree, member)
        scores[member] = sum(
            (
                probability.masses[i] * utilities.utility(values[i])
                for i in given.indices()
            ),
            Fraction(0),
        ) / weight
    best = max(scores.values())
    return {m for m, s in scores.items() if s == best}


def oracle_dominance_solution(tree, members, utilities):
    given = list(tree.root_event.indices())
    vectors = {m: oracle_gamble(tree, m) for m in members}

    def beats(a, b):
        av, bv = vectors[a], vectors[b]
        ge = all(utilities.utility(av[i]) >= utilities.utility(bv[i]) for i in given)
        gt = any(utilities.utility(av[i]) > utilities.utility(bv[i]) for i in given)
        return ge and gt

    # optimal gambles, then every strategy inducing one of them
    undominated = {
        vectors[m]
        for m in members
        if not any(beats(other, m) for other in members)
    }
    return {m for m in members if vectors[m] in undominated}


@pytest.mark.parametrize("index", range(60))
def test_gambles_match_play_out_oracle(index):
    tree = random_consistent_tree(CONFIG, seed=subseed("diff", index))
    for member in nfd(tree):
        assert member.gamble.values == oracle_gamble(tree, member)


@pytest.mark.parametrize("index", range(40))
def test_eu_solutions_match_play_out_oracle(index):
    tree = random_consistent_tree(CONFIG, seed=subseed("diff-eu", index))
    rewards = reward_table_for_tree(tree)
    rule = seeded_rule_policy("eu_max")(tree.space, rewards, rng_for("diff-eu", index))
    expected = oracle_eu_solution(
        tree, nfd(tree), rule.context.probability, rewards
    )
    assert norm_opt(tree, rule).solution == expected


@pytest.mark.parametrize("index", range(40))
def test_dominance_solutions_match_play_out_oracle(index):
    tree = random_consistent_tree(CONFIG, seed=subseed("diff-dom", index))
    rewards = reward_table_for_tree(tree)
    rule = seeded_rule_policy("pointwise_dominance")(
        tree.space, rewards, rng_for("diff-dom", index)
    )
    expected = oracle_dominance_solution(tree, nfd(tree), rewards)
    assert norm_opt(tree, rule).solution == expected
