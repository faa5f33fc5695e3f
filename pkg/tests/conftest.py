from pathlib import Path

import pytest

from treechoice.model import GambleSet
from treechoice.rules import ChoiceContext, ChoiceRule, make_rule
from treechoice.textio import parse_context_file, parse_tree_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_doc(name):
    return parse_tree_file((FIXTURES / name).read_text())


def load_context(name):
    return parse_context_file((FIXTURES / name).read_text())


@pytest.fixture(scope="session")
def incomparable_doc():
    return load_doc("incomparable.tree")


@pytest.fixture(scope="session")
def lake_doc():
    return load_doc("lake.tree")


@pytest.fixture(scope="session")
def cross_doc():
    return load_doc("cross.tree")


@pytest.fixture(scope="session")
def leaf_doc():
    return load_doc("leaf.tree")


@pytest.fixture
def incomparable_dominance(incomparable_doc):
    return make_rule("pointwise_dominance", ChoiceContext(incomparable_doc.rewards))


@pytest.fixture
def incomparable_eu(incomparable_doc):
    context = load_context("incomparable_uniform.prob").bind(incomparable_doc.space, incomparable_doc.rewards)
    return make_rule("eu_max", context)


@pytest.fixture
def incomparable_credal_context(incomparable_doc):
    return load_context("incomparable_credal.ctx").bind(incomparable_doc.space, incomparable_doc.rewards)


@pytest.fixture
def lake_eu(lake_doc):
    context = load_context("lake_uniform.prob").bind(lake_doc.space, lake_doc.rewards)
    return make_rule("eu_max", context)


def gambles_by_values(gamble_set: GambleSet):
    return {g.values for g in gamble_set}


class FussyPairsRule(ChoiceRule):
    """Test-only pathological rule: full set normally, but on two-element
    sets keeps only the canonically first gamble. Violates preservation
    of non-optimality (Sen's alpha)."""

    name = "fussy_pairs"

    def _select(self, gambles, given):
        members = list(gambles)
        if len(members) == 2:
            return members[:1]
        return members
