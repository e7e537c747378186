"""Shared fixtures: canonical process specs and contrast fixtures."""

import math
from fractions import Fraction

import numpy as np
import pytest

from obsequiv.partitions import UNIT_INTERVAL
from obsequiv.processes import HoldingTime, MarkovChainSpec, SemiMarkovSpec


@pytest.fixture
def fair_semi_markov():
    """p=(1/2,1/2) embedded chain with holding times (1, sqrt(2))."""
    chain = MarkovChainSpec(("s1", "s2"), np.full((2, 2), 0.5))
    return SemiMarkovSpec(
        chain,
        {"s1": HoldingTime(Fraction(1)), "s2": HoldingTime(Fraction(1), 2)},
    )


class DeterministicStartSource:
    """Semi-Markov sampler forced to begin a fresh s1 sojourn at time 0.

    Violates stationarity on purpose: the time-0 marginal is a point mass
    instead of the time-weighted marginal.
    """

    def __init__(self, spec):
        self.spec = spec

    @property
    def alphabet(self):
        return self.spec.states

    def sample_path(self, grid, rng):
        chain = self.spec.chain
        horizon = max(grid)
        breaks = [0.0]
        symbols = ["s1"]
        ctx = ("s1",) * chain.order
        t = self.spec.u("s1")
        breaks.append(t)
        while t <= horizon:
            row = chain.table[chain.context_index(ctx)]
            s = chain.states[rng.choice(chain.n_states, p=row)]
            ctx = ctx[1:] + (s,) if chain.order > 1 else (s,)
            t += self.spec.u(s)
            breaks.append(t)
            symbols.append(s)
        idx = np.searchsorted(np.asarray(breaks), np.asarray(grid), side="right") - 1
        return tuple(symbols[i] for i in idx)


@pytest.fixture
def deterministic_start_source(fair_semi_markov):
    return DeterministicStartSource(fair_semi_markov)


class ContractionMap:
    """x -> x/2 per unit time on [0,1); not measure-preserving."""

    space = UNIT_INTERVAL

    def sample_initial(self, rng):
        return float(rng.random())

    def evolve(self, state, t):
        return state * (0.5 ** float(t))

    def coords(self, state):
        return (state,)

    def metric(self, a, b):
        return abs(a - b)


@pytest.fixture
def contraction_map():
    return ContractionMap()
