"""Driving an external DIMACS solver as a drop-in backend.

The adapter speaks the SAT-competition conventions: the solver gets a CNF
file path as its last argument and answers with an ``s SATISFIABLE`` or
``s UNSATISFIABLE`` line (exit codes 10/20 also accepted), plus ``v`` lines
carrying the model.  Models are re-verified here; an external solver that
misreports is an error, never a silent wrong answer.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time

import numpy as np

from . import SatResult, check_model


def solve_with_external(cnf, command, time_budget=None):
    """Solve a CNF with an external solver command (string or argv list)."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    start = time.monotonic()
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="circsynth_")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(cnf.to_dimacs())
        try:
            proc = subprocess.run(
                argv + [path],
                capture_output=True,
                text=True,
                timeout=time_budget,
            )
        except subprocess.TimeoutExpired:
            return SatResult("unknown", reason="time", wall=time.monotonic() - start,
                             stats={"backend": "external"})
        wall = time.monotonic() - start
        status, model_lits = _parse_solver_output(proc.stdout)
        if status is None:
            if proc.returncode == 10:
                status = "sat"
            elif proc.returncode == 20:
                status = "unsat"
            else:
                raise RuntimeError(
                    f"external solver gave no verdict (exit {proc.returncode}): "
                    f"{proc.stdout[-500:]!r} {proc.stderr[-500:]!r}"
                )
        stats = {"backend": "external", "exit_code": proc.returncode}
        if status == "unsat":
            return SatResult("unsat", stats=stats, wall=wall)
        if status == "unknown":
            return SatResult("unknown", stats=stats, reason="external", wall=wall)
        model = np.zeros(cnf.num_vars + 1, dtype=bool)
        for l in model_lits:
            v = abs(l)
            if 1 <= v <= cnf.num_vars:
                model[v] = l > 0
        if not check_model(cnf, model):
            raise RuntimeError("external solver claimed SAT but its model fails verification")
        return SatResult("sat", model=model, stats=stats, wall=wall)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def _parse_solver_output(text):
    status = None
    lits = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            verdict = line[2:].strip().upper()
            if verdict == "SATISFIABLE":
                status = "sat"
            elif verdict == "UNSATISFIABLE":
                status = "unsat"
            else:
                status = "unknown"
        elif line.startswith("v ") or line == "v":
            lits.extend(int(t) for t in line[1:].split() if t != "0")
    return status, lits
