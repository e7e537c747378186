"""Measure-preserving deterministic systems.

Rotation flow on the circle, event-driven billiard with convex circular
obstacles, the baker's map, and flows built under a function over a
discrete base.  Every system exposes:

  sample_initial(rng) -> state        draw from the invariant measure
  evolve(state, t)    -> state        deterministic time evolution
  coords(state)       -> tuple        coordinates for partitions/observations
  metric(a, b)        -> float        phase-space distance
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fdd import SymbolPath
from .partitions import Box, PhaseSpace, UNIT_INTERVAL, UNIT_SQUARE

__all__ = [
    "rotation_system",
    "billiard_system",
    "baker_system",
    "build_flow_under_function",
    "trajectory_symbols",
    "spawn_rngs",
    "RotationFlow",
    "BilliardFlow",
    "BilliardState",
    "BakerMap",
    "SuspensionFlow",
    "RoofFunction",
]

MAX_EVENTS = 10_000_000
GRAZE_GUARD = 1e-12


class SystemError(ValueError):
    pass


def spawn_rngs(seed, n):
    """Independent per-trajectory generators derived from one master seed.

    Accepts an integer seed or an already-built SeedSequence.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(n)]


# ---------------------------------------------------------------------------
# rotation flow


@dataclass(frozen=True)
class RotationFlow:
    """T_t(m) = (m + alpha*t) mod 1 on the circle [0,1), Lebesgue-invariant."""

    alpha: float
    space: PhaseSpace = UNIT_INTERVAL

    def sample_initial(self, rng):
        return float(rng.random())

    def evolve(self, state, t):
        return (state + self.alpha * t) % 1.0

    def coords(self, state):
        return (state,)

    def metric(self, a, b):
        d = abs(a - b) % 1.0
        return min(d, 1.0 - d)


def rotation_system(alpha) -> RotationFlow:
    if alpha == 0:
        raise SystemError("alpha=0 gives a degenerate (frozen) flow")
    return RotationFlow(float(alpha))


# ---------------------------------------------------------------------------
# billiard with convex circular obstacles


@dataclass(frozen=True)
class BilliardState:
    x: float
    y: float
    theta: float  # direction in [0, 2*pi)


class BilliardFlow:
    """Free flight at constant speed with specular reflection.

    Walls of a width x height table and circular obstacles reflect the
    velocity about the inward normal.  Grazing circle hits (near-zero
    discriminant or tangential incidence) are treated as no-hit.
    """

    def __init__(self, width, height, obstacles, speed):
        if speed <= 0:
            raise SystemError("speed must be positive")
        self.width, self.height, self.speed = float(width), float(height), float(speed)
        self.obstacles = [((float(cx), float(cy)), float(r)) for (cx, cy), r in obstacles]
        for (cx, cy), r in self.obstacles:
            if r <= 0:
                raise SystemError("obstacle radius must be positive")
            if not (r < cx < self.width - r and r < cy < self.height - r):
                raise SystemError("obstacle not strictly inside the table")
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                (c1, r1), (c2, r2) = self.obstacles[i], self.obstacles[j]
                if math.hypot(c1[0] - c2[0], c1[1] - c2[1]) <= r1 + r2:
                    raise SystemError("obstacles overlap")
        self.space = PhaseSpace(
            "billiard",
            Box((0.0, 0.0, 0.0), (self.width, self.height, 2 * math.pi)),
            periodic=(2,),
        )
        self._diag = math.hypot(self.width, self.height)

    def _inside(self, x, y):
        if not (0.0 <= x <= self.width and 0.0 <= y <= self.height):
            return False
        return all(math.hypot(x - cx, y - cy) > r for (cx, cy), r in self.obstacles)

    def sample_initial(self, rng):
        while True:
            x = rng.random() * self.width
            y = rng.random() * self.height
            if self._inside(x, y):
                break
        theta = rng.random() * 2 * math.pi
        return BilliardState(x, y, theta)

    def _next_event(self, x, y, vx, vy):
        """Time to the next wall or obstacle hit and the reflected velocity."""
        best_t, kind, data = math.inf, None, None
        if vx > 0:
            t = (self.width - x) / vx
            if GRAZE_GUARD < t < best_t:
                best_t, kind = t, "vx"
        elif vx < 0:
            t = -x / vx
            if GRAZE_GUARD < t < best_t:
                best_t, kind = t, "vx"
        if vy > 0:
            t = (self.height - y) / vy
            if GRAZE_GUARD < t < best_t:
                best_t, kind = t, "vy"
        elif vy < 0:
            t = -y / vy
            if GRAZE_GUARD < t < best_t:
                best_t, kind = t, "vy"
        v2 = vx * vx + vy * vy
        for (cx, cy), r in self.obstacles:
            dx, dy = x - cx, y - cy
            b = dx * vx + dy * vy
            c = dx * dx + dy * dy - r * r
            disc = b * b - v2 * c
            if disc < GRAZE_GUARD:
                continue
            t = (-b - math.sqrt(disc)) / v2
            if GRAZE_GUARD < t < best_t:
                best_t, kind, data = t, "circle", ((cx, cy), r)
        return best_t, kind, data

    def evolve(self, state, t):
        x, y = state.x, state.y
        vx = self.speed * math.cos(state.theta)
        vy = self.speed * math.sin(state.theta)
        remaining = float(t)
        events = 0
        while remaining > 0.0:
            t_hit, kind, data = self._next_event(x, y, vx, vy)
            if t_hit >= remaining:
                x += vx * remaining
                y += vy * remaining
                break
            x += vx * t_hit
            y += vy * t_hit
            remaining -= t_hit
            if kind == "vx":
                vx = -vx
            elif kind == "vy":
                vy = -vy
            else:
                (cx, cy), r = data
                nx, ny = (x - cx) / r, (y - cy) / r
                dot = vx * nx + vy * ny
                vx -= 2 * dot * nx
                vy -= 2 * dot * ny
            events += 1
            if events > MAX_EVENTS:
                raise SystemError("event cap exceeded in one evolve call")
        return BilliardState(x, y, math.atan2(vy, vx) % (2 * math.pi))

    def speed_drift(self, state, n_events):
        """Max deviation of |v| from the nominal speed over consecutive events.

        Tracks the velocity through n_events reflections without
        renormalizing, so accumulated floating-point drift is visible.
        """
        x, y = state.x, state.y
        vx = self.speed * math.cos(state.theta)
        vy = self.speed * math.sin(state.theta)
        drift = 0.0
        for _ in range(int(n_events)):
            t_hit, kind, data = self._next_event(x, y, vx, vy)
            if not math.isfinite(t_hit):
                raise SystemError("no further events from this state")
            x += vx * t_hit
            y += vy * t_hit
            if kind == "vx":
                vx = -vx
            elif kind == "vy":
                vy = -vy
            else:
                (cx, cy), r = data
                nx, ny = (x - cx) / r, (y - cy) / r
                dot = vx * nx + vy * ny
                vx -= 2 * dot * nx
                vy -= 2 * dot * ny
            drift = max(drift, abs(math.hypot(vx, vy) - self.speed))
        return drift

    def coords(self, state):
        return (state.x, state.y, state.theta)

    def metric(self, a, b):
        dth = abs(a.theta - b.theta) % (2 * math.pi)
        dth = min(dth, 2 * math.pi - dth)
        return math.hypot(a.x - b.x, a.y - b.y) + self._diag * dth


def billiard_system(width, height, obstacles, speed) -> BilliardFlow:
    return BilliardFlow(width, height, obstacles, speed)


# ---------------------------------------------------------------------------
# baker's map


class BakerMap:
    """B(x,y) = (2x mod 1, (y + floor(2x))/2) on the unit square."""

    space = UNIT_SQUARE

    def sample_initial(self, rng):
        return (float(rng.random()), float(rng.random()))

    def step(self, state):
        x, y = state
        k = math.floor(2.0 * x)
        return ((2.0 * x) % 1.0, (y + k) / 2.0)

    def inverse(self, state):
        x, y = state
        k = math.floor(2.0 * y)
        return ((x + k) / 2.0, (2.0 * y) % 1.0)

    def evolve(self, state, n):
        n = int(n)
        f = self.step if n >= 0 else self.inverse
        for _ in range(abs(n)):
            state = f(state)
        return state

    def coords(self, state):
        return state

    def metric(self, a, b):
        return math.hypot(a[0] - b[0], a[1] - b[1])


def baker_system() -> BakerMap:
    return BakerMap()


# ---------------------------------------------------------------------------
# flow built under a function


@dataclass(frozen=True)
class RoofFunction:
    """Holding time over each base symbol; all values strictly positive."""

    heights: dict

    def __post_init__(self):
        object.__setattr__(self, "heights", {k: float(v) for k, v in self.heights.items()})
        if any(v <= 0 for v in self.heights.values()):
            raise SystemError("roof values must be positive")

    def __call__(self, symbol):
        return self.heights[symbol]

    @property
    def max_height(self):
        return max(self.heights.values())


class SuspensionFlow:
    """Unit-rate vertical motion under a roof, jumping by the base map.

    State is (base_point, height) with 0 <= height < roof(label(base_point)).
    The invariant measure is the normalized product of the base measure and
    height-Lebesgue, total mass 1; sampling length-biases the base point by
    its roof value.
    """

    def __init__(self, base, roof: RoofFunction, label=None):
        self.base = base
        self.roof = roof
        self.label = label if label is not None else base.label

    def sample_initial(self, rng):
        umax = self.roof.max_height
        while True:
            k = self.base.sample_initial(rng)
            u = self.roof(self.label(k))
            if rng.random() * umax < u:
                break
        return (k, float(rng.random() * u))

    def evolve(self, state, t):
        k, v = state
        total = v + float(t)
        u = self.roof(self.label(k))
        while total >= u:
            total -= u
            k = self.base.step(k)
            u = self.roof(self.label(k))
        return (k, total)

    def coords(self, state):
        k, v = state
        return tuple(self.base.coords(k)) + (v,)

    def metric(self, a, b):
        return self.base.metric(a[0], b[0]) + abs(a[1] - b[1])

    def observe(self, state):
        """Base symbol of the current fiber (the Delta-style observation)."""
        return self.label(state[0])


def build_flow_under_function(base, roof: RoofFunction, label=None) -> SuspensionFlow:
    return SuspensionFlow(base, roof, label)


# ---------------------------------------------------------------------------
# observed trajectories


def trajectory_symbols(system, obs, grid, seed_or_rng) -> SymbolPath:
    """Symbols of one trajectory, sampled at the grid times.

    Deterministic given the seed: the initial state is drawn once and
    evolved incrementally along the sorted grid.
    """
    grid = [float(t) for t in grid]
    if not grid:
        raise SystemError("empty time grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise SystemError("grid must be sorted ascending")
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    state = system.sample_initial(rng)
    symbols = []
    t_now = 0.0
    for t in grid:
        state = system.evolve(state, t - t_now)
        t_now = t
        symbols.append(obs(system.coords(state)))
    return SymbolPath(tuple(grid), tuple(symbols))
