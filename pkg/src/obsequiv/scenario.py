"""Declarative scenario files: named systems, observations, processes, and
a task list.  The runner executes tasks in order, writing one JSON report
(and optional CSV) per task; identical input and seed give byte-identical
JSON.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import checks, entropy as entropy_mod
from .checks import CheckReport, ObservedSystemSource, ProcessSource
from .fdd import estimate_fdd
from .partitions import (
    Box,
    ObservationFunction,
    Partition,
    grid_partition,
    interval_partition,
    observation_from_partition,
)
from .processes import HoldingTime, MarkovChainSpec, SemiMarkovSpec
from .representation import SemiMarkovFlowRep, ShiftRepresentation
from .systems import baker_system, billiard_system, rotation_system, spawn_rngs

__all__ = ["ScenarioError", "Scenario", "run_scenario"]


class ScenarioError(ValueError):
    """Configuration problem; maps to exit code 2."""


def _require(cfg, key, where):
    if key not in cfg:
        raise ScenarioError(f"{where}: missing field {key!r}")
    return cfg[key]


# ---------------------------------------------------------------------------
# definition builders


def _build_system(name, cfg):
    kind = _require(cfg, "kind", f"systems.{name}")
    if kind == "rotation":
        return rotation_system(_require(cfg, "alpha", f"systems.{name}"))
    if kind == "billiard":
        obstacles = [
            (tuple(o["center"]), o["radius"]) for o in cfg.get("obstacles", [])
        ]
        return billiard_system(
            _require(cfg, "width", f"systems.{name}"),
            _require(cfg, "height", f"systems.{name}"),
            obstacles,
            _require(cfg, "speed", f"systems.{name}"),
        )
    if kind == "baker":
        return baker_system()
    raise ScenarioError(f"systems.{name}: unsupported system kind {kind!r}")


def _build_observation(name, cfg, systems):
    kind = _require(cfg, "kind", f"observations.{name}")
    system = systems[_require(cfg, "system", f"observations.{name}")]
    space = system.space
    if kind == "intervals":
        part = interval_partition(
            _require(cfg, "breaks", f"observations.{name}"),
            _require(cfg, "labels", f"observations.{name}"),
            space=space,
        )
    elif kind == "grid":
        part = grid_partition(cfg.get("nx", 2), cfg.get("ny", 2), space=space)
    elif kind == "boxes":
        cells = tuple(
            tuple(Box(tuple(b["lo"]), tuple(b["hi"])) for b in cell)
            for cell in _require(cfg, "cells", f"observations.{name}")
        )
        part = Partition(space, cells, tuple(_require(cfg, "labels", f"observations.{name}")))
    else:
        raise ScenarioError(f"observations.{name}: unsupported kind {kind!r}")
    labels = cfg.get("symbols")
    return observation_from_partition(part, labels)


def _build_process(name, cfg):
    kind = _require(cfg, "kind", f"processes.{name}")
    states = tuple(_require(cfg, "states", f"processes.{name}"))
    matrix = np.asarray(_require(cfg, "matrix", f"processes.{name}"), dtype=float)
    order = int(cfg.get("order", 1))
    chain = MarkovChainSpec(states, matrix, order)
    if kind == "markov":
        return chain
    if kind == "semi_markov":
        holding = {}
        for s, h in _require(cfg, "holding", f"processes.{name}").items():
            holding[s] = HoldingTime(Fraction(str(h["coeff"])), int(h.get("radicand", 1)))
        return SemiMarkovSpec(chain, holding)
    raise ScenarioError(f"processes.{name}: unsupported kind {kind!r}")


class Scenario:
    def __init__(self, doc, path="<scenario>"):
        if not isinstance(doc, dict):
            raise ScenarioError(f"{path}: top level must be an object")
        if "seed" not in doc:
            raise ScenarioError(f"{path}: master seed is mandatory")
        self.seed = int(doc["seed"])
        try:
            self.systems = {
                k: _build_system(k, v) for k, v in doc.get("systems", {}).items()
            }
            self.observations = {
                k: _build_observation(k, v, self.systems)
                for k, v in doc.get("observations", {}).items()
            }
            self.processes = {
                k: _build_process(k, v) for k, v in doc.get("processes", {}).items()
            }
        except (ScenarioError, ValueError) as exc:
            raise ScenarioError(str(exc)) from exc
        self.tasks = doc.get("tasks", [])
        if not isinstance(self.tasks, list):
            raise ScenarioError("tasks must be a list")

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ScenarioError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}:{exc.lineno}: {exc.msg}") from exc
        return cls(doc, str(path))

    # -- name resolution ----------------------------------------------------

    def source(self, cfg, where):
        """A symbol source from a side description."""
        if "process" in cfg:
            spec = self._process(cfg["process"], where)
            rep = cfg.get("representation")
            if rep == "flow":
                return SemiMarkovFlowRep(spec)
            if rep == "shift":
                return ShiftRepresentation(spec)
            if rep is None:
                return ProcessSource(spec)
            raise ScenarioError(f"{where}: unknown representation {rep!r}")
        if "system" in cfg:
            return ObservedSystemSource(
                self._system(cfg["system"], where),
                self._observation(cfg["observation"], where)
                if "observation" in cfg
                else _raise(ScenarioError(f"{where}: observation required")),
            )
        raise ScenarioError(f"{where}: side needs 'system'+'observation' or 'process'")

    def _system(self, name, where):
        if name not in self.systems:
            raise ScenarioError(f"{where}: undefined system {name!r}")
        return self.systems[name]

    def _observation(self, name, where):
        if name not in self.observations:
            raise ScenarioError(f"{where}: undefined observation {name!r}")
        return self.observations[name]

    def _process(self, name, where):
        if name not in self.processes:
            raise ScenarioError(f"{where}: undefined process {name!r}")
        return self.processes[name]


def _raise(exc):
    raise exc


# ---------------------------------------------------------------------------
# task execution


def _run_task(scn: Scenario, idx, task):
    kind = _require(task, "kind", f"tasks[{idx}]")
    where = f"tasks[{idx}] ({kind})"
    seed = int(task.get("seed", scn.seed + idx))
    n = int(task.get("n", 1000))

    if kind == "simulate":
        src = scn.source(task, where)
        grid = _require(task, "grid", where)
        paths = [
            tuple(src.sample_path(grid, rng)) for rng in spawn_rngs(seed, n)
        ]
        fdd = estimate_fdd(paths, grid)
        return {"kind": kind, "fdd": fdd.to_json_obj()}, fdd.to_csv(), True

    if kind == "entropy":
        src = scn.source(_require(task, "source", where), where)
        step = float(task.get("step", 1.0))
        length = int(task.get("length", 10_000))
        n_seq = int(task.get("sequences", 1))
        grid = [i * step for i in range(length)]
        seqs = [src.sample_path(grid, rng) for rng in spawn_rngs(seed, n_seq)]
        trend = entropy_mod.entropy_rate(seqs, int(_require(task, "L_max", where)))
        obj = {
            "kind": kind,
            "step": step,
            "block_entropies": [e.bits for e in trend.estimates],
            "increments": trend.increments,
            "rate_estimate": trend.rate_estimate,
            "positive_rate": trend.positive_rate,
        }
        return obj, trend.to_csv(), True

    if kind.startswith("check:"):
        report = _run_check(scn, kind.removeprefix("check:"), task, where, seed, n)
        obj = report.to_json_obj()
        return obj, None, report.passed

    raise ScenarioError(f"{where}: unknown task kind {kind!r}")


def _run_check(scn, what, task, where, seed, n) -> CheckReport:
    if what == "observational_equivalence":
        return checks.check_observational_equivalence(
            scn.source(_require(task, "a", where), where),
            scn.source(_require(task, "b", where), where),
            _require(task, "grids", where),
            n,
            seed,
        )
    if what == "nontriviality":
        return checks.check_nontriviality(
            scn._system(_require(task, "system", where), where),
            scn._observation(_require(task, "observation", where), where),
            _require(task, "lags", where),
            n,
            seed,
        )
    if what == "stationarity":
        return checks.check_stationarity(
            scn.source(_require(task, "source", where), where),
            _require(task, "grid", where),
            _require(task, "shifts", where),
            n,
            seed,
        )
    if what == "measure_preservation":
        system = scn._system(_require(task, "system", where), where)
        sets = []
        for s in _require(task, "sets", where):
            box = Box(tuple(s["box"]["lo"]), tuple(s["box"]["hi"]))
            sets.append((s["label"], box.contains, float(s["measure"])))
        return checks.check_measure_preservation(
            system, sets, _require(task, "times", where), n, seed
        )
    if what == "invariant_union":
        obs = scn._observation(_require(task, "partition", where), where)
        return checks.check_invariant_union(
            scn._system(_require(task, "system", where), where),
            obs.partition,
            float(_require(task, "horizon", where)),
            n,
            seed,
            tol=float(task.get("tol", 0.01)),
        )
    if what == "simulation":
        mode = _require(task, "mode", where)
        gamma_map = task.get("gamma")
        gamma = (lambda s: gamma_map[str(s)]) if gamma_map is not None else None
        return checks.check_simulation(
            mode,
            scn._system(_require(task, "system", where), where),
            scn._observation(_require(task, "phi", where), where),
            scn._observation(_require(task, "psi", where), where),
            float(_require(task, "epsilon", where)),
            task.get("grids", []),
            n,
            seed,
            gamma=gamma,
        )
    if what == "epsilon_congruence":
        system = scn._system(_require(task, "system", where), where)
        obs = scn._observation(_require(task, "coding", where), where)
        part = obs.partition
        centers = {
            sym: tuple(
                (lo + hi) / 2.0 for lo, hi in zip(cell[0].lo, cell[0].hi)
            )
            for sym, cell in zip(obs.symbols, part.cells)
        }
        return checks.check_epsilon_congruence(
            system,
            lambda m: obs(system.coords(m)),
            lambda sym: centers[sym],
            float(_require(task, "epsilon", where)),
            n,
            seed,
        )
    raise ScenarioError(f"{where}: unknown check kind {what!r}")


def run_scenario(path, out_dir="out", seed=None, jobs=1, fmt="json") -> int:
    """Execute a scenario file; returns the process exit code.

    0: all checks passed; 1: at least one check failed; 2: configuration
    error.  Reports land in <out>/<scenario-stem>/<index>-<kind>.json.
    """
    try:
        scn = Scenario.load(path)
        if seed is not None:
            scn.seed = int(seed)
        stem = Path(path).stem
        target = Path(out_dir) / stem
        target.mkdir(parents=True, exist_ok=True)
        all_ok = True
        for idx, task in enumerate(scn.tasks):
            obj, csv_text, ok = _run_task(scn, idx, task)
            all_ok = all_ok and ok
            kind = task.get("kind", "task").replace(":", "_")
            base = target / f"{idx}-{kind}"
            if fmt in ("json", "both"):
                base.with_suffix(".json").write_text(
                    json.dumps(obj, sort_keys=True, indent=2) + "\n"
                )
            if fmt in ("csv", "both") and csv_text is not None:
                base.with_suffix(".csv").write_text(csv_text)
        return 0 if all_ok else 1
    except ScenarioError as exc:
        print(f"configuration error: {exc}")
        return 2
