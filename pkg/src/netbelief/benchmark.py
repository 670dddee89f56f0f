"""Dense-versus-factored runtime comparison over a grid of net parameters.

Each cell runs a fixed number of policy-driven observations on one
generated net with one backend and records the mean per-operation wall
time.  Cells share seeds across backends so the probed traces match; a
cell that exceeds its time budget is recorded as a timeout, never aborting
the rest of the grid.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .generate import GenParams, gen_net
from .session import Session
from .update import UpdateStrategy

DEFAULT_TIMEOUT_S = 60.0
OPS_PER_CELL = 100


@dataclass(frozen=True)
class BenchCell:
    params: GenParams
    backend: str
    mean_ms: Optional[float]
    ops: int
    timeout: bool

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "backend": self.backend,
            "mean_ms": self.mean_ms,
            "ops": self.ops,
            "timeout": self.timeout,
        }


@dataclass(frozen=True)
class BenchReport:
    cells: tuple[BenchCell, ...]

    def to_json(self) -> dict:
        return {"cells": [c.to_json() for c in self.cells]}

    def cell(self, params: GenParams, backend: str) -> BenchCell:
        for c in self.cells:
            if c.params == params and c.backend == backend:
                return c
        raise KeyError(f"no cell for {params} / {backend}")


def run_cell(
    params: GenParams,
    backend: str,
    ops: int = OPS_PER_CELL,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    strategy: UpdateStrategy = UpdateStrategy.eager(),
) -> tuple[BenchCell, Optional[Session]]:
    """Time one (params, backend) cell; the setup (net generation, prior
    expansion) is excluded from the measured span."""
    net, prior = gen_net(params)
    try:
        session = Session(net, prior, strategy, seed=params.seed, backend=backend)
    except MemoryError:
        return BenchCell(params, backend, None, 0, True), None
    done = 0
    start = time.perf_counter()
    for _ in range(ops):
        session.step()
        done += 1
        if time.perf_counter() - start > timeout_s:
            break
    elapsed = time.perf_counter() - start
    if done < ops:
        return BenchCell(params, backend, None, done, True), session
    return BenchCell(params, backend, 1000.0 * elapsed / ops, done, False), session


def _run_cell_job(args) -> BenchCell:
    params, backend, ops, timeout_s = args
    cell, _session = run_cell(params, backend, ops, timeout_s)
    return cell


def bench(
    grid: Sequence[GenParams],
    backends: Sequence[str] = ("dense", "mbn"),
    ops: int = OPS_PER_CELL,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    workers: int = 1,
) -> BenchReport:
    """Run every (params, backend) cell; ``workers`` > 1 runs cells in
    independent worker processes (timings then include scheduler noise,
    so keep 1 for publication-grade numbers)."""
    jobs = [(p, b, ops, timeout_s) for p in grid for b in backends]
    if workers <= 1:
        cells = [_run_cell_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell_job, jobs))
    return BenchReport(tuple(cells))


def success_rate(sessions: Sequence[Session]) -> float:
    """Fraction of successful firings across the sessions' traces."""
    total = sum(len(s.trace) for s in sessions)
    if total == 0:
        return 0.0
    wins = sum(
        1 for s in sessions for step in s.trace if step.outcome.value == "Success"
    )
    return wins / total
