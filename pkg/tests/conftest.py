import pytest

from mdpq import Query, builtin_model


@pytest.fixture(scope="session")
def network():
    return builtin_model("network")


@pytest.fixture(scope="session")
def lost(network):
    return frozenset(network.states_with_label("lost"))


@pytest.fixture(scope="session")
def q_a(lost):
    return Query(frozenset({"A"}), lost)


@pytest.fixture(scope="session")
def q_b(lost):
    return Query(frozenset({"B"}), lost)


@pytest.fixture(scope="session")
def suzy():
    return builtin_model("suzy_billy")


@pytest.fixture(scope="session")
def q_suzy():
    return Query(frozenset({"ST"}), frozenset({"Shatter"}))
