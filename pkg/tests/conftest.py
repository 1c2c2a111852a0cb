from fractions import Fraction

import pytest

from graphons import (StepGraphon, cycle, dyadic, from_simple_graph, frucht,
                      nonlip, path, petersen, random_rational)


@pytest.fixture(scope="session")
def bipartite():
    h = Fraction(1, 2)
    return StepGraphon([h, h], [[Fraction(0), Fraction(1)],
                                [Fraction(1), Fraction(0)]])


@pytest.fixture(scope="session")
def c5_graphon():
    return from_simple_graph(cycle(5))


@pytest.fixture(scope="session")
def petersen_graphon():
    return from_simple_graph(petersen())


@pytest.fixture(scope="session")
def nonlip_graphon():
    return nonlip(Fraction(1, 100))


def corpus_graphons():
    """The ten standing test graphons (names match the acceptance suite)."""
    return [
        ("P3", from_simple_graph(path(3))),
        ("P4", from_simple_graph(path(4))),
        ("C5", from_simple_graph(cycle(5))),
        ("C6", from_simple_graph(cycle(6))),
        ("petersen", from_simple_graph(petersen())),
        ("frucht", from_simple_graph(frucht())),
        ("nonlip", nonlip(Fraction(1, 100))),
        ("dyadic3", dyadic(3)),
        ("rand5", random_rational(5, seed=101)),
        ("rand6", random_rational(6, seed=202)),
    ]


@pytest.fixture(scope="session")
def corpus():
    return corpus_graphons()
