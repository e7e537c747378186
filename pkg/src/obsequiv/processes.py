"""Stationary Markov, n-step Markov, and (n-step) semi-Markov processes.

Holding times carry an exact symbolic form, rational coefficient times a
square-free radical, so irrational-relatedness of the holding-time set is
decidable instead of being guessed from floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import networkx as nx
import numpy as np

__all__ = [
    "HoldingTime",
    "MarkovChainSpec",
    "MarkovDiagnostics",
    "SemiMarkovSpec",
    "RealizationPath",
    "validate_markov_spec",
    "sample_chain",
    "sample_semi_markov",
    "block_embedding",
    "irrationally_related",
]

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10


class ProcessError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact holding times


def _squarefree_split(n):
    """n = s^2 * f with f square-free; returns (s, f)."""
    if n <= 0:
        raise ProcessError("radicand must be a positive integer")
    s, f, d = 1, n, 2
    while d * d <= f:
        while f % (d * d) == 0:
            f //= d * d
            s *= d
        d += 1
    return s, f


@dataclass(frozen=True)
class HoldingTime:
    """Exact positive holding time q * sqrt(d), q rational, d a positive int."""

    coeff: Fraction
    radicand: int = 1

    def __post_init__(self):
        q = Fraction(self.coeff)
        s, f = _squarefree_split(int(self.radicand))
        object.__setattr__(self, "coeff", q * s)
        object.__setattr__(self, "radicand", f)
        if self.coeff <= 0:
            raise ProcessError("holding time must be positive")

    @property
    def value(self):
        return float(self.coeff) * math.sqrt(self.radicand)

    def __repr__(self):
        if self.radicand == 1:
            return f"HoldingTime({self.coeff})"
        return f"HoldingTime({self.coeff}*sqrt({self.radicand}))"


def irrationally_related(holding_times) -> bool:
    """True iff every pairwise ratio of distinct values is irrational.

    Decided exactly from the symbolic form: after normalizing to square-free
    radicands, two values have a rational ratio iff their radicands agree.
    Exactly equal values count as one element of the holding-time set.
    """
    for u in holding_times:
        if not isinstance(u, HoldingTime):
            raise ProcessError(
                "holding time without a symbolic certificate (bare float rejected)"
            )
    distinct = {(u.coeff, u.radicand) for u in holding_times}
    radicands = [r for _, r in distinct]
    return len(radicands) == len(set(radicands))


# ---------------------------------------------------------------------------
# Markov chains, order n >= 1


@dataclass(frozen=True)
class MarkovChainSpec:
    """Order-n Markov chain over finitely many states.

    table has one row per length-n context (contexts enumerated
    lexicographically in state order) and one column per next state.
    """

    states: tuple
    table: np.ndarray
    order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        table = np.asarray(self.table, dtype=float)
        n, k = int(self.order), len(self.states)
        if n < 1:
            raise ProcessError("order must be >= 1")
        if table.shape != (k**n, k):
            raise ProcessError(f"table must have shape ({k**n}, {k})")
        if np.any(table < -ROW_SUM_TOL):
            raise ProcessError("negative transition probability")
        if np.any(np.abs(table.sum(axis=1) - 1.0) > 1e-9):
            raise ProcessError("rows must sum to 1")
        object.__setattr__(self, "table", table)

    @property
    def n_states(self):
        return len(self.states)

    def contexts(self):
        return list(product(self.states, repeat=self.order))

    def context_index(self, ctx):
        k = self.n_states
        idx = 0
        for s in ctx:
            idx = idx * k + self.states.index(s)
        return idx

    def validate(self) -> "MarkovDiagnostics":
        # cached: samplers validate once per spec, not once per trajectory
        diag = self.__dict__.get("_diag")
        if diag is None:
            diag = validate_markov_spec(self)
            object.__setattr__(self, "_diag", diag)
        return diag


@dataclass
class MarkovDiagnostics:
    irreducible: bool
    aperiodic: bool
    period: int
    stationary: np.ndarray  # over contexts
    marginal: dict  # state -> P(S_0 = state)
    valid: bool = field(init=False)

    def __post_init__(self):
        self.valid = (
            self.irreducible
            and self.aperiodic
            and all(p > 0 for p in self.marginal.values())
        )


def _block_matrix(spec: MarkovChainSpec):
    """Order-1 transition matrix of the context (n-block) chain."""
    ctxs = spec.contexts()
    k = spec.n_states
    m = len(ctxs)
    P = np.zeros((m, m))
    for i, ctx in enumerate(ctxs):
        row = spec.table[spec.context_index(ctx)]
        for j, s in enumerate(spec.states):
            nxt = ctx[1:] + (s,) if spec.order > 1 else (s,)
            P[i, ctxs.index(nxt)] += row[j]
    return ctxs, P


def _stationary_of(P):
    m = P.shape[0]
    A = np.vstack([P.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.max(np.abs(pi @ P - pi)) > STATIONARY_TOL:
        raise ProcessError("stationary distribution solve did not converge")
    return pi


def validate_markov_spec(spec_or_matrix, order=1, states=None) -> MarkovDiagnostics:
    """Irreducibility, aperiodicity, and stationary distribution of a chain.

    Accepts a MarkovChainSpec, or a raw row-stochastic matrix (order 1).
    """
    if not isinstance(spec_or_matrix, MarkovChainSpec):
        table = np.asarray(spec_or_matrix, dtype=float)
        if states is None:
            states = tuple(f"s{i+1}" for i in range(table.shape[1]))
        spec_or_matrix = MarkovChainSpec(states, table, order)
    spec = spec_or_matrix
    ctxs, P = _block_matrix(spec)
    g = nx.DiGraph()
    g.add_nodes_from(range(len(ctxs)))
    rows, cols = np.nonzero(P > 0)
    g.add_edges_from(zip(rows.tolist(), cols.tolist()))
    attracting = list(nx.attracting_components(g))
    irreducible = len(attracting) == 1
    if irreducible:
        recurrent = sorted(attracting[0])
        sub = g.subgraph(recurrent)
        aperiodic = nx.is_aperiodic(sub)
        period = 1 if aperiodic else _period(sub)
        pi_rec = _stationary_of(P[np.ix_(recurrent, recurrent)])
        pi = np.zeros(len(ctxs))
        pi[recurrent] = pi_rec
    else:
        aperiodic, period = False, 0
        pi = np.zeros(len(ctxs))
    marginal = {s: 0.0 for s in spec.states}
    for ctx, p in zip(ctxs, pi):
        marginal[ctx[-1]] += float(p)
    return MarkovDiagnostics(irreducible, aperiodic, period, pi, marginal)


def _period(g):
    cycles = nx.simple_cycles(g)
    d = 0
    for cyc in cycles:
        d = math.gcd(d, len(cyc))
        if d == 1:
            break
    return d


def block_embedding(spec: MarkovChainSpec) -> MarkovChainSpec:
    """Order-1 chain over reachable n-blocks, marginals matching n-joints.

    For order 1 this is the identity embedding up to relabeling states by
    singleton blocks.
    """
    diag = validate_markov_spec(spec)
    if not diag.valid:
        raise ProcessError("cannot embed an invalid chain")
    ctxs, P = _block_matrix(spec)
    keep = [i for i, p in enumerate(diag.stationary) if p > 0]
    if spec.order == 1:
        blocks = tuple(ctxs[i][0] for i in keep)
    else:
        blocks = tuple(ctxs[i] for i in keep)
    Q = P[np.ix_(keep, keep)]
    Q = Q / Q.sum(axis=1, keepdims=True)
    return MarkovChainSpec(blocks, Q, order=1)


def sample_chain(spec: MarkovChainSpec, length, seed_or_rng):
    """Stationary sample path of the chain as a tuple of symbols."""
    diag = spec.validate()
    if not diag.valid:
        raise ProcessError("invalid chain spec")
    rng = _as_rng(seed_or_rng)
    ctxs = spec.contexts()
    start = rng.choice(len(ctxs), p=diag.stationary)
    ctx = ctxs[start]
    out = list(ctx[: min(length, spec.order)])
    while len(out) < length:
        row = spec.table[spec.context_index(ctx)]
        s = spec.states[rng.choice(spec.n_states, p=row)]
        out.append(s)
        ctx = ctx[1:] + (s,) if spec.order > 1 else (s,)
    return tuple(out[:length])


def _as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


# ---------------------------------------------------------------------------
# semi-Markov processes


@dataclass(frozen=True)
class SemiMarkovSpec:
    """Embedded (possibly n-step) chain plus exact holding times per state."""

    chain: MarkovChainSpec
    holding: dict  # state -> HoldingTime

    def __post_init__(self):
        for s in self.chain.states:
            if s not in self.holding:
                raise ProcessError(f"no holding time for state {s!r}")
            if not isinstance(self.holding[s], HoldingTime):
                raise ProcessError("holding times must carry symbolic certificates")

    @property
    def states(self):
        return self.chain.states

    def u(self, state):
        return self.holding[state].value

    def holding_set(self):
        return list(self.holding.values())

    def irrationally_related(self):
        return irrationally_related(self.holding_set())

    def time_weighted_marginal(self):
        """P(Z_0 = s_i) = p_i u_i / sum_j p_j u_j (the sojourn-length bias)."""
        diag = self.chain.validate()
        if not diag.valid:
            raise ProcessError("invalid embedded chain")
        w = {s: diag.marginal[s] * self.u(s) for s in self.states}
        z = sum(w.values())
        return {s: v / z for s, v in w.items()}


@dataclass(frozen=True)
class RealizationPath:
    """Piecewise-constant path, right-continuous at jumps.

    breaks are strictly increasing epochs; symbols[i] holds on
    [breaks[i], breaks[i+1]).  first_jump is the offset T_0 of the first
    jump after time 0.
    """

    breaks: tuple
    symbols: tuple
    first_jump: float

    def __post_init__(self):
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.breaks) != len(self.symbols) + 1:
            raise ProcessError("need one more break than symbols")
        if any(b <= a for a, b in zip(self.breaks, self.breaks[1:])):
            raise ProcessError("jump epochs must be strictly increasing")

    @property
    def start(self):
        return self.breaks[0]

    @property
    def end(self):
        return self.breaks[-1]

    def value(self, t):
        if not (self.start <= t < self.end):
            raise ProcessError(f"path does not cover t={t}")
        i = int(np.searchsorted(np.asarray(self.breaks), t, side="right")) - 1
        return self.symbols[i]

    def shifted(self, h):
        return RealizationPath(
            tuple(b - h for b in self.breaks), self.symbols, self.first_jump - h
        )

    def sojourns(self):
        """(symbol, duration) for every complete sojourn (interior segments)."""
        out = []
        for i in range(1, len(self.symbols) - 1):
            out.append((self.symbols[i], self.breaks[i + 1] - self.breaks[i]))
        return out

    def to_csv(self):
        lines = ["epoch,symbol"]
        for b, s in zip(self.breaks[:-1], self.symbols):
            lines.append(f"{b},{s}")
        return "\n".join(lines) + "\n"


def sample_semi_markov(spec: SemiMarkovSpec, horizon, seed_or_rng) -> RealizationPath:
    """Stationary realization covering [0, horizon].

    The state at time 0 follows the time-weighted marginal (length-biased by
    the holding time); the first-jump offset is uniform on (0, u(S_0)]; every
    later sojourn lasts exactly the holding time of its state.
    """
    if horizon <= 0:
        raise ProcessError("horizon must be positive")
    diag = spec.chain.validate()
    if not diag.valid:
        raise ProcessError("invalid embedded chain")
    rng = _as_rng(seed_or_rng)
    ctxs = spec.chain.contexts()
    # context ending in s_i, weighted by u(s_i): length-biases only the
    # sojourn straddling time 0
    weights = diag.stationary * np.array([spec.u(c[-1]) for c in ctxs])
    weights /= weights.sum()
    ctx = ctxs[rng.choice(len(ctxs), p=weights)]
    s0 = ctx[-1]
    u0 = spec.u(s0)
    t0 = u0 * (1.0 - rng.random())  # uniform on (0, u0]
    breaks = [t0 - u0, t0]
    symbols = [s0]
    t = t0
    while t <= horizon:
        row = spec.chain.table[spec.chain.context_index(ctx)]
        s = spec.chain.states[rng.choice(spec.chain.n_states, p=row)]
        ctx = ctx[1:] + (s,) if spec.chain.order > 1 else (s,)
        t += spec.u(s)
        breaks.append(t)
        symbols.append(s)
    return RealizationPath(tuple(breaks), tuple(symbols), t0)
