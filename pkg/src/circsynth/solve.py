"""Deciding exists-forall formulas by universal expansion over a SAT back end.

A :class:`Qbf2Session` expands the universal block exactly once and then
supports repeated solve/block rounds over the same clause set, which is how
witness enumeration avoids paying the expansion cost per witness.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .formula import expand_universal
from .sat import SatProblem
from .sat.external import solve_with_external


@dataclass
class QbfResult:
    status: str  # "sat", "unsat", or "unknown"
    assignment: dict = None  # existential variable id -> bool, on "sat"
    stats: dict = field(default_factory=dict)
    reason: str = None
    wall: float = 0.0


def _parse_backend(solver):
    if solver == "internal":
        return "internal", None
    if solver.startswith("external:"):
        cmd = solver[len("external:"):]
        if not cmd.strip():
            raise ValueError("external solver spec has no command")
        return "external", cmd
    raise ValueError(f"unknown solver spec {solver!r}; use 'internal' or 'external:<command>'")


class Qbf2Session:
    """One expanded 2-QBF instance, ready for witness enumeration."""

    def __init__(self, qbf, solver="internal"):
        self.qbf = qbf
        self.backend, self.command = _parse_backend(solver)
        self.cnf, self.expansion = expand_universal(qbf)
        self._extra = []
        self._problem = SatProblem(self.cnf) if self.backend == "internal" else None

    @property
    def num_s(self):
        return self.expansion["num_s"]

    def solve_once(self, conflict_budget=None, time_budget=None):
        """One solve over the current clause set (base CNF plus blocks)."""
        start = time.monotonic()
        if self.backend == "internal":
            res = self._problem.solve(conflict_budget=conflict_budget, time_budget=time_budget)
        else:
            # The external protocol has no conflict budget; wall time is the
            # only lever, which the adapter enforces via process timeout.
            cnf = self.cnf.extended(self._extra) if self._extra else self.cnf
            res = solve_with_external(cnf, self.command, time_budget=time_budget)
        stats = dict(self.expansion)
        stats.update(res.stats)
        if res.status != "sat":
            return QbfResult(res.status, stats=stats, reason=res.reason,
                             wall=time.monotonic() - start)
        assignment = {s: bool(res.model[s]) for s in range(1, self.num_s + 1)}
        return QbfResult("sat", assignment=assignment, stats=stats,
                         wall=time.monotonic() - start)

    def block(self, assignment):
        """Exclude one existential assignment from all later solves."""
        clause = tuple(-s if assignment[s] else s for s in range(1, self.num_s + 1))
        if not clause:
            clause = ()
        self._extra.append(clause)
        if self._problem is not None:
            self._problem.add_clause(clause)

    def enumerate_witnesses(self, limit=None, conflict_budget=None, time_budget=None):
        """Yield satisfying existential assignments, blocking each as it appears.

        Stops on unsat (exhausted) or unknown; the caller can inspect
        ``last_result`` to distinguish the two.
        """
        count = 0
        deadline = None if time_budget is None else time.monotonic() + time_budget
        while limit is None or count < limit:
            left = None if deadline is None else max(0.0, deadline - time.monotonic())
            res = self.solve_once(conflict_budget=conflict_budget, time_budget=left)
            self.last_result = res
            if res.status != "sat":
                return
            yield res.assignment
            self.block(res.assignment)
            count += 1
        return


def solve_2qbf(qbf, solver="internal", conflict_budget=None, time_budget=None):
    """Decide one exists-forall formula; returns a QbfResult."""
    session = Qbf2Session(qbf, solver=solver)
    return session.solve_once(conflict_budget=conflict_budget, time_budget=time_budget)
