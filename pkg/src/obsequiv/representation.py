"""Deterministic representations of stochastic processes.

The shift construction (phase space = realizations, evolution = time shift,
observation = value at time zero) and the flow-under-a-function
representation of semi-Markov processes over the block shift of the
embedded chain.
"""

from __future__ import annotations

import numpy as np

from .processes import (
    MarkovChainSpec,
    ProcessError,
    RealizationPath,
    SemiMarkovSpec,
    block_embedding,
    sample_chain,
    sample_semi_markov,
)
from .systems import RoofFunction, SuspensionFlow

__all__ = [
    "ShiftRepresentation",
    "SemiMarkovFlowRep",
    "shift_representation",
    "semi_markov_flow_representation",
    "observe_at_zero",
]


def observe_at_zero(r: RealizationPath):
    """Value of the realization at time zero (right-continuous at jumps)."""
    return r.value(0.0)


class ShiftRepresentation:
    """Shift system on realizations of a process, observed at time zero.

    States are realization paths; shift(r, t) moves the path so that its
    time-t value sits at time zero; observing a shifted state with
    observe_at_zero reads off the original path at time t.
    """

    def __init__(self, spec):
        if isinstance(spec, SemiMarkovSpec):
            diag = spec.chain.validate()
        elif isinstance(spec, MarkovChainSpec):
            diag = spec.validate()
        else:
            raise ProcessError(f"unsupported process spec {type(spec).__name__}")
        if not diag.valid:
            raise ProcessError("invalid process spec")
        self.spec = spec

    @property
    def alphabet(self):
        return tuple(self.spec.states)

    def sample_realization(self, horizon, rng) -> RealizationPath:
        if isinstance(self.spec, SemiMarkovSpec):
            return sample_semi_markov(self.spec, horizon, rng)
        # discrete-time chain as a unit-sojourn step path
        length = int(np.ceil(horizon)) + 2
        symbols = sample_chain(self.spec, length, rng)
        return RealizationPath(tuple(range(length + 1)), symbols, 1.0)

    @staticmethod
    def shift(r: RealizationPath, t) -> RealizationPath:
        return r.shifted(t)

    @staticmethod
    def observe(r: RealizationPath):
        return observe_at_zero(r)

    def sample_path(self, grid, rng):
        """Symbols Phi_0(T_t(r)) for t in grid, for one sampled realization."""
        horizon = max(grid) + 1.0
        r = self.sample_realization(horizon, rng)
        return tuple(self.observe(self.shift(r, t)) for t in grid)


def shift_representation(spec) -> ShiftRepresentation:
    return ShiftRepresentation(spec)


class _LazyChainPath:
    """Forward sample path of an order-1 chain, extended on demand.

    Memoization makes base states immutable values: the symbol at a given
    index never changes once drawn, so the shift semigroup law holds exactly.
    """

    def __init__(self, states, table, stationary, rng):
        self._states = states
        self._table = table
        self._rng = rng
        self._blocks = [states[rng.choice(len(states), p=stationary)]]

    def block(self, i):
        while len(self._blocks) <= i:
            row = self._table[self._states.index(self._blocks[-1])]
            self._blocks.append(self._states[self._rng.choice(len(self._states), p=row)])
        return self._blocks[i]


class _ChainShiftBase:
    """Shift on chain paths; a base state is (lazy path, position)."""

    def __init__(self, block_chain: MarkovChainSpec):
        self.chain = block_chain
        diag = block_chain.validate()
        if not diag.valid:
            raise ProcessError("block chain invalid")
        self.stationary = diag.stationary

    def sample_initial(self, rng):
        path = _LazyChainPath(
            list(self.chain.states), self.chain.table, self.stationary, rng
        )
        return (path, 0)

    def step(self, state):
        path, i = state
        return (path, i + 1)

    def label(self, state):
        path, i = state
        return path.block(i)

    def coords(self, state):
        return (float(self.chain.states.index(self.label(state))),)

    def metric(self, a, b):
        return 0.0 if self.label(a) == self.label(b) else 1.0


class SemiMarkovFlowRep(SuspensionFlow):
    """Flow built under the holding-time roof over the block shift.

    The fiber observation (base block, height) -> block reproduces the
    semi-Markov process: sojourns equal the holding time of the current
    outcome exactly and jump targets follow the embedded chain.
    """

    def __init__(self, spec: SemiMarkovSpec):
        if not spec.irrationally_related():
            raise ProcessError("holding-time set is not irrationally related")
        self.spec = spec
        blocks = block_embedding(spec.chain)
        base = _ChainShiftBase(blocks)

        def block_holding(block):
            first = block[0] if isinstance(block, tuple) else block
            return spec.u(first)

        roof = RoofFunction({b: block_holding(b) for b in blocks.states})
        super().__init__(base, roof, label=base.label)

    @property
    def alphabet(self):
        return tuple(self.base.chain.states)

    def sample_path(self, grid, rng):
        """Delta-observed symbols along one flow trajectory."""
        state = self.sample_initial(rng)
        out = []
        t_now = 0.0
        for t in grid:
            state = self.evolve(state, t - t_now)
            t_now = t
            out.append(self.observe(state))
        return tuple(out)


def semi_markov_flow_representation(spec: SemiMarkovSpec) -> SemiMarkovFlowRep:
    return SemiMarkovFlowRep(spec)
