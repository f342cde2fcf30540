"""SAT solving front end: clause preparation, budgets, model checking.

The kernel itself lives in :mod:`circsynth.sat.kernel`; this layer turns a
:class:`~circsynth.formula.CNF` into the kernel's encoded arrays, enforces
conflict and wall-clock budgets, and re-verifies every model the kernel
reports before anyone else gets to see it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..formula import CNF
from . import kernel as _kernel

DEFAULT_LUBY_BASE = 64
DEFAULT_DECAY = 0.95
_FIRST_SLICE = 4096


@dataclass
class SatResult:
    status: str  # "sat", "unsat", or "unknown"
    model: np.ndarray = None  # bool array indexed by DIMACS variable (slot 0 unused)
    stats: dict = field(default_factory=dict)
    reason: str = None  # for "unknown": "conflicts" or "time"
    wall: float = 0.0


def check_model(cnf, model, extra_clauses=()):
    """True if the model (bool array indexed by variable) satisfies every clause."""
    if cnf.num_clauses:
        lengths = np.diff(cnf.offsets)
        if np.any(lengths == 0):
            return False
        vals = model[np.abs(cnf.lits)]
        sat = np.where(cnf.lits > 0, vals, ~vals)
        clause_idx = np.repeat(np.arange(cnf.num_clauses), lengths)
        hits = np.bincount(clause_idx[sat], minlength=cnf.num_clauses)
        if not np.all(hits > 0):
            return False
    for cl in extra_clauses:
        if len(cl) == 0:
            return False
        if not any(model[abs(l)] if l > 0 else not model[abs(l)] for l in cl):
            return False
    return True


def _encode_clause(cl):
    """DIMACS literals to kernel encoding, deduplicated; None if tautological."""
    seen = set()
    out = []
    for l in cl:
        v = abs(l) - 1
        enc = 2 * v + (1 if l < 0 else 0)
        if enc ^ 1 in seen:
            return None
        if enc in seen:
            continue
        seen.add(enc)
        out.append(enc)
    return out


class SatProblem:
    """A CNF prepared for the kernel, supporting incremental clause addition.

    Adding a clause (for example a blocking clause) does not disturb the
    already-normalized arrays; the next solve call simply sees more clauses.
    """

    def __init__(self, cnf):
        self.cnf = cnf
        self.num_vars = cnf.num_vars
        self.extra = []
        self._lits = []
        self._offsets = [0]
        self._units = []
        self.trivially_unsat = False
        for cl in cnf.iter_clauses():
            self._ingest(cl)

    def _ingest(self, cl):
        enc = _encode_clause(cl)
        if enc is None:
            return
        if len(enc) == 0:
            self.trivially_unsat = True
        elif len(enc) == 1:
            self._units.append(enc[0])
        else:
            self._lits.extend(enc)
            self._offsets.append(len(self._lits))

    def add_clause(self, cl):
        """Add a DIMACS clause; it participates in all later solve calls."""
        if any(abs(l) < 1 or abs(l) > self.num_vars for l in cl):
            raise ValueError(f"literal out of range in {cl}")
        self.extra.append(tuple(cl))
        self._ingest(tuple(cl))

    def _kernel_arrays(self):
        return (
            np.asarray(self._lits, dtype=np.int32),
            np.asarray(self._offsets, dtype=np.int32),
            np.asarray(self._units, dtype=np.int32),
        )

    def solve(self, conflict_budget=None, time_budget=None):
        """Solve under the given budgets; a verified SatResult in every case.

        A wall-clock budget runs the kernel in restarted slices with doubling
        conflict allowances, checking the clock in between; the kernel itself
        never looks at a clock, which keeps the compiled and interpreted
        paths behaviorally identical.
        """
        start = time.monotonic()
        if self.trivially_unsat:
            return SatResult("unsat", wall=time.monotonic() - start)
        cl_lits, cl_offsets, units = self._kernel_arrays()
        model_out = np.zeros(self.num_vars, dtype=np.uint8)
        stats_out = np.zeros(len(_kernel.STAT_NAMES), dtype=np.int64)
        totals = {name: 0 for name in _kernel.STAT_NAMES}
        slices = 0

        remaining = conflict_budget
        deadline = None if time_budget is None else start + time_budget
        slice_budget = None if deadline is None else _FIRST_SLICE

        while True:
            if slice_budget is None:
                eff = -1 if remaining is None else int(remaining)
            else:
                eff = slice_budget if remaining is None else min(slice_budget, int(remaining))
            status = _kernel.solve_kernel(
                self.num_vars, cl_lits, cl_offsets, units,
                np.int64(eff), np.int64(DEFAULT_LUBY_BASE), np.float64(DEFAULT_DECAY),
                model_out, stats_out,
            )
            slices += 1
            for i, name in enumerate(_kernel.STAT_NAMES):
                totals[name] += int(stats_out[i])
            totals["slices"] = slices
            if status == _kernel.S_SAT:
                model = np.zeros(self.num_vars + 1, dtype=bool)
                model[1:] = model_out.astype(bool)
                if not check_model(self.cnf, model, self.extra):
                    raise RuntimeError("solver reported SAT but the model fails verification")
                return SatResult("sat", model=model, stats=totals, wall=time.monotonic() - start)
            if status == _kernel.S_UNSAT:
                return SatResult("unsat", stats=totals, wall=time.monotonic() - start)
            # Budget ran out inside the kernel.
            if remaining is not None and eff >= remaining:
                return SatResult("unknown", stats=totals, reason="conflicts",
                                 wall=time.monotonic() - start)
            if deadline is not None and time.monotonic() >= deadline:
                return SatResult("unknown", stats=totals, reason="time",
                                 wall=time.monotonic() - start)
            if slice_budget is not None:
                slice_budget *= 2
            # With no deadline and no remaining limit the kernel runs with
            # eff == -1 and cannot come back unknown, so this loop terminates.


def solve_cnf(cnf, conflict_budget=None, time_budget=None):
    """One-shot convenience wrapper around SatProblem."""
    return SatProblem(cnf).solve(conflict_budget=conflict_budget, time_budget=time_budget)


def jit_enabled():
    """Whether the compiled kernel path is active in this process."""
    return _kernel.USE_JIT
