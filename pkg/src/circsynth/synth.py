"""Search drivers: labeling, counting, the brute-force baseline, and synthesis.

Everything here funnels through the same discipline: a solver answer is never
trusted on its own.  Witnesses are decoded into circuits and re-verified
against the requirements by truth table or an independent miter before they
are reported.
"""

from __future__ import annotations

import csv
import itertools
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass

import numpy as np

from .boolfunc import Basis, BooleanFunction, commuting_input_pairs
from .circuit import Circuit, Gate, Output, Wire, topology_of
from .encode import MODES, circuit_to_graph, create_miter, encode_synthesis
from .formula import CNF, GateGraph, tseitin
from .sat import SatProblem
from .sat.external import solve_with_external
from .solve import Qbf2Session, _parse_backend

BRUTE_FORCE_INPUT_LIMIT = 16
EXHAUSTIVE_EDGE_LIMIT = 22


def _norm_status(status):
    return "timeout" if status == "unknown" else status


# --- independent equivalence checking ---

@dataclass
class VerifyResult:
    """Outcome of an equivalence check.

    ``equivalent`` is None when the check ran out of budget; the boolean
    value of the result treats that as not-equivalent, so callers must look
    at ``status`` before drawing negative conclusions.
    """

    equivalent: bool | None
    counterexample: dict | None
    status: str  # "proved", "refuted", "timeout"
    method: str  # "table" or "sat"

    def __bool__(self):
        return self.equivalent is True


def _check_interfaces(a, b):
    if set(a.inputs) != set(b.inputs):
        raise ValueError(f"input mismatch: {sorted(a.inputs)} vs {sorted(b.inputs)}")
    if {o.name for o in a.outputs} != {o.name for o in b.outputs}:
        raise ValueError("output name mismatch between the two circuits")
    for c in (a, b):
        problems = c.validate()
        if problems:
            raise ValueError(f"circuit {c.name} is malformed: {problems[0]}")


def _aligned_tables(a, b):
    """Truth tables of a and b over a's input order and a's output order."""
    m = len(a.inputs)
    ta = a.truth_table()
    tb = b.truth_table()
    rows = np.arange(1 << m)
    pos_b = {nm: j for j, nm in enumerate(b.inputs)}
    remap = np.zeros(1 << m, dtype=np.int64)
    for i, nm in enumerate(a.inputs):
        bit = (rows >> (m - 1 - i)) & 1
        remap |= bit << (m - 1 - pos_b[nm])
    col_b = {o.name: j for j, o in enumerate(b.outputs)}
    order = [col_b[o.name] for o in a.outputs]
    return ta, tb[remap][:, order]


def _row_vector(circuit, row):
    m = len(circuit.inputs)
    return {nm: bool((row >> (m - 1 - i)) & 1) for i, nm in enumerate(circuit.inputs)}


def verify(candidate, psi, method="auto", solver="internal",
           conflict_budget=None, time_budget=None):
    """Check candidate ≡ psi; by table below the input cap, by SAT above it.

    Refutations carry a counterexample input vector.  The SAT path re-checks
    any counterexample by direct evaluation, so a misbehaving backend cannot
    produce a false refutation silently.
    """
    _check_interfaces(candidate, psi)
    m = len(candidate.inputs)
    if method == "auto":
        method = "table" if m <= BRUTE_FORCE_INPUT_LIMIT else "sat"
    if method == "table":
        ta, tb = _aligned_tables(candidate, psi)
        diff = np.nonzero((ta != tb).any(axis=1))[0]
        if diff.size == 0:
            return VerifyResult(True, None, "proved", "table")
        return VerifyResult(False, _row_vector(candidate, int(diff[0])), "refuted", "table")
    if method != "sat":
        raise ValueError(f"unknown method {method!r}")

    graph = GateGraph()
    input_nodes = {nm: graph.var(i + 1) for i, nm in enumerate(candidate.inputs)}
    oa = circuit_to_graph(graph, candidate, input_nodes)
    ob = circuit_to_graph(graph, psi, input_nodes)
    root = graph.or_(*[graph.xor_(oa[o.name], ob[o.name]) for o in candidate.outputs])
    var_of = {i + 1: i + 1 for i in range(m)}
    clauses, root_lit, next_var, node_lit = tseitin(graph, root, var_of, m + 1)
    if not node_lit:
        if root_lit < 0:
            return VerifyResult(True, None, "proved", "sat")
        cex = {nm: False for nm in candidate.inputs}
        if candidate.evaluate(cex) == psi.evaluate(cex):
            raise RuntimeError("miter folded to true but circuits agree; encoder bug")
        return VerifyResult(False, cex, "refuted", "sat")
    clauses.append((root_lit,))
    cnf = CNF.from_clauses(clauses, next_var - 1)
    backend, command = _parse_backend(solver)
    if backend == "internal":
        res = SatProblem(cnf).solve(conflict_budget=conflict_budget, time_budget=time_budget)
    else:
        res = solve_with_external(cnf, command, time_budget=time_budget)
    if res.status == "unsat":
        return VerifyResult(True, None, "proved", "sat")
    if res.status == "sat":
        cex = {nm: bool(res.model[i + 1]) for i, nm in enumerate(candidate.inputs)}
        if candidate.evaluate(cex) == psi.evaluate(cex):
            raise RuntimeError("solver returned a counterexample the circuits agree on")
        return VerifyResult(False, cex, "refuted", "sat")
    return VerifyResult(None, None, "timeout", "sat")


# --- canonical forms for solution comparison ---

def _commuting_groups(fn):
    parent = list(range(fn.arity_in))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in commuting_input_pairs(fn):
        ra, rb = find(a - 1), find(b - 1)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(i) for i in range(fn.arity_in)]


def canonical_key(circuit):
    """A key invariant under gate renaming and commuting-input swaps.

    Exponential in the gate count, so only meant for comparing small
    solutions; primary inputs keep their identity.
    """
    gates = circuit.gates
    k = len(gates)
    if k > 8:
        raise ValueError("canonical form is only computed for up to 8 gates")
    best = None
    for perm in itertools.permutations(range(k)):
        rename = {gates[gi].name: f"#{pos}" for pos, gi in enumerate(perm)}

        def rw(w):
            return (rename.get(w.node, w.node), w.port)

        rows = []
        for pos, gi in enumerate(perm):
            g = gates[gi]
            fan = [rw(w) for w in g.fanin]
            groups = _commuting_groups(g.fn)
            arranged = list(fan)
            for root in set(groups):
                slots = [i for i in range(len(fan)) if groups[i] == root]
                vals = sorted(fan[i] for i in slots)
                for slot, val in zip(slots, vals):
                    arranged[slot] = val
            rows.append((g.fn.name, g.fn.arity_in, g.fn.table, tuple(arranged)))
        outs = tuple(sorted((o.name, rw(o.wire)) for o in circuit.outputs))
        key = (tuple(rows), outs)
        if best is None or key < best:
            best = key
    return best


def commutation_equivalent(a, b):
    """True when the circuits differ only by renaming and commuting swaps."""
    return canonical_key(a) == canonical_key(b)


# --- size bookkeeping ---

class SizeBounds:
    """Per-size verdicts with the derived lower and upper bound.

    ``lower`` is the smallest size not yet refuted (so: largest proven-unsat
    prefix plus one); ``upper`` the smallest size with a found circuit.  The
    two meet exactly when the optimum is proved.
    """

    def __init__(self, start=1):
        self.start = start
        self.lower = start
        self.upper = None
        self.status = {}

    def record(self, k, status):
        status = _norm_status(status)
        if status not in ("sat", "unsat", "timeout"):
            raise ValueError(f"unknown status {status!r}")
        if status == "unsat" and self.upper is not None and k > self.upper:
            raise RuntimeError(f"unsat at {k} above a sat at {self.upper}; sizes are monotone")
        old = self.status.get(k)
        if old == "sat" and status != "sat":
            return
        self.status[k] = status
        if status == "sat":
            self.upper = k if self.upper is None else min(self.upper, k)
        while self.status.get(self.lower) == "unsat":
            self.lower += 1
        if self.upper is not None and self.lower > self.upper:
            raise RuntimeError("lower bound passed the upper bound; inconsistent records")

    @property
    def proven_optimal(self):
        return self.upper is not None and self.lower == self.upper

    def __repr__(self):
        return f"SizeBounds(lower={self.lower}, upper={self.upper}, status={self.status})"


LEDGER_FIELDS = ("family", "n", "k", "status", "gates", "wall-time", "conflicts")


def _ledger_row(family, n, k, status, gates, wall, conflicts):
    return {
        "family": family,
        "n": "" if n is None else n,
        "k": k,
        "status": _norm_status(status),
        "gates": "" if gates is None else gates,
        "wall-time": f"{wall:.3f}",
        "conflicts": "" if conflicts is None else int(conflicts),
    }


def write_ledger(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LEDGER_FIELDS)
        writer.writeheader()
        writer.writerows(rows)


# --- zero-cell solutions and default bounds ---

def wire_solution(psi, mode="circuit"):
    """A gate-free realization wiring outputs to inputs, or None.

    Distinct outputs must take distinct inputs; network mode additionally
    requires every input to be consumed, so only permutations qualify.
    Boolean-function mode never admits one (outputs leave gates there).
    """
    if mode == "boolean-function":
        return None
    m = len(psi.inputs)
    if m == 0:
        return None
    if mode == "network" and len(psi.outputs) != m:
        return None
    tt = psi.truth_table()
    rows = np.arange(1 << m)
    in_cols = [((rows >> (m - 1 - i)) & 1).astype(bool) for i in range(m)]
    cand = [[i for i in range(m) if np.array_equal(tt[:, j], in_cols[i])]
            for j in range(len(psi.outputs))]
    if any(not c for c in cand):
        return None
    order = sorted(range(len(cand)), key=lambda j: len(cand[j]))
    pick = {}
    used = set()

    def assign(idx):
        if idx == len(order):
            return True
        j = order[idx]
        for i in cand[j]:
            if i in used:
                continue
            used.add(i)
            pick[j] = i
            if assign(idx + 1):
                return True
            used.discard(i)
        return False

    if not assign(0):
        return None
    outputs = tuple(Output(o.name, Wire(psi.inputs[pick[j]]))
                    for j, o in enumerate(psi.outputs))
    return Circuit(f"{psi.name}-wires", psi.inputs, (), outputs)


def default_upper_bound(basis, psi):
    """Cells known to suffice: psi's own size if its gates live in the basis,
    else the size of a two-level sum-of-minterms realization."""
    tables = {(f.arity_in, f.table) for f in basis.functions}
    if psi.gates and all((g.fn.arity_in, g.fn.table) in tables for g in psi.gates):
        return psi.num_gates
    tt = psi.truth_table()
    m = len(psi.inputs)
    total = m  # one inverter per input
    for j in range(tt.shape[1]):
        t = int(tt[:, j].sum())
        if t == 0 or t == (1 << m):
            total += 3  # a literal pair and their conjunction or disjunction
        else:
            total += t * max(m - 1, 0) + (t - 1)
    return max(total, 1)


# --- label selection and counting ---

@dataclass
class LabelingResult:
    status: str  # "sat", "unsat", "timeout"
    labeling: dict | None
    circuit: Circuit | None
    stats: dict
    wall: float


def label_select(basis, psi, solver="internal", conflict_budget=None, time_budget=None):
    """Find one labeling of psi's own topology equivalent to psi.

    The returned circuit has been decoded from the witness and re-verified
    independently; a verification failure is an internal error, not a result.
    """
    topo = topology_of(psi)
    enc = create_miter(basis, topo, psi)
    sess = Qbf2Session(enc.qbf, solver=solver)
    res = sess.solve_once(conflict_budget=conflict_budget, time_budget=time_budget)
    if res.status != "sat":
        return LabelingResult(_norm_status(res.status), None, None, res.stats, res.wall)
    labeling = enc.decode_labeling(res.assignment)
    circuit = topo.relabel(labeling, name=f"{psi.name}-labeled")
    check = verify(circuit, psi)
    if check.equivalent is not True:
        raise RuntimeError("decoded labeling failed independent verification")
    return LabelingResult("sat", labeling, circuit, res.stats, res.wall)


@dataclass
class LabelCountResult:
    count: int
    complete: bool  # False: budget or limit hit, count is only a lower bound
    labelings: tuple
    circuits: tuple
    stats: dict


def label_count(basis, psi, limit=None, solver="internal",
                conflict_budget=None, time_budget=None):
    """Count labelings of psi's topology equivalent to psi, by solve and block.

    Every witness is verified before it is counted.
    """
    topo = topology_of(psi)
    enc = create_miter(basis, topo, psi)
    sess = Qbf2Session(enc.qbf, solver=solver)
    labelings = []
    circuits = []
    for assignment in sess.enumerate_witnesses(limit=limit, conflict_budget=conflict_budget,
                                               time_budget=time_budget):
        labeling = enc.decode_labeling(assignment)
        circuit = topo.relabel(labeling, name=f"{psi.name}-labeled{len(circuits) + 1}")
        check = verify(circuit, psi)
        if check.equivalent is not True:
            raise RuntimeError("enumerated labeling failed independent verification")
        labelings.append(labeling)
        circuits.append(circuit)
    last = getattr(sess, "last_result", None)
    complete = last is not None and last.status == "unsat"
    stats = last.stats if last is not None else {}
    return LabelCountResult(len(labelings), complete, tuple(labelings), tuple(circuits), stats)


# --- the exhaustive baseline ---

@dataclass
class ExhaustiveResult:
    bounds: SizeBounds
    circuits: tuple
    size: int | None
    subsets_total: int
    subsets_examined: int
    per_size: dict  # k -> (total subsets, past the screen, solutions)


def exhaustive_search(basis, psi, cap, mode="circuit"):
    """Enumerate wiring subsets size by size, trying every labeling of each.

    The screen drops malformed topologies only: cyclic cell graphs, outputs
    without exactly one driver, and two outputs tied to one driver.  Stops at
    the first size with solutions; solutions are deduplicated up to gate
    renaming and commuting-input swaps.  This path shares nothing with the
    solver pipeline, which is what makes it useful as a cross-check.
    """
    if mode != "circuit":
        raise ValueError("the exhaustive baseline only supports circuit mode")
    problems = psi.validate()
    if problems:
        raise ValueError(f"requirements circuit is malformed: {problems[0]}")
    m = len(psi.inputs)
    n = len(psi.outputs)
    bounds = SizeBounds(start=0)
    wire = wire_solution(psi, mode)
    if wire is not None:
        bounds.record(0, "sat")
        return ExhaustiveResult(bounds, (wire,), 0, 0, 0, {})
    bounds.record(0, "unsat")
    tt = psi.truth_table()
    total_all = 0
    examined_all = 0
    per_size = {}
    for k in range(1, cap + 1):
        num_edges = k * (m + n + k - 1)
        if num_edges > EXHAUSTIVE_EDGE_LIMIT:
            raise ValueError(f"subset space 2^{num_edges} at size {k} is past the baseline cap")
        edges = []
        for c in range(k):
            for i in range(m):
                edges.append((("in", i), c))
        for a in range(k):
            for b in range(k):
                if a != b:
                    edges.append((a, b))
        for c in range(k):
            for j in range(n):
                edges.append((c, ("out", j)))
        po_mask = [0] * n
        po_src = {}
        cc_edges = []
        in_edges = [[] for _ in range(k)]
        for idx, (src, dst) in enumerate(edges):
            if isinstance(dst, tuple) and dst[0] == "out":
                po_mask[dst[1]] |= 1 << idx
                po_src[idx] = src
            elif isinstance(src, tuple):
                in_edges[dst].append((idx, src))
            else:
                cc_edges.append((src, dst, idx))
                in_edges[dst].append((idx, src))

        found = {}
        screened = 0
        for mask in range(1 << num_edges):
            drivers = []
            ok = True
            for j in range(n):
                hit = mask & po_mask[j]
                if hit.bit_count() != 1:
                    ok = False
                    break
                drivers.append(po_src[hit.bit_length() - 1])
            if not ok or len(set(drivers)) != n:
                continue
            adj = [[] for _ in range(k)]
            indeg = [0] * k
            for a, b, idx in cc_edges:
                if mask & (1 << idx):
                    adj[a].append(b)
                    indeg[b] += 1
            queue = [c for c in range(k) if indeg[c] == 0]
            seen = 0
            while queue:
                c = queue.pop()
                seen += 1
                for b in adj[c]:
                    indeg[b] -= 1
                    if indeg[b] == 0:
                        queue.append(b)
            if seen != k:
                continue
            screened += 1
            _collect_labelings(basis, psi, tt, mask, k, in_edges, drivers, found)
        per_size[k] = (1 << num_edges, screened, len(found))
        total_all += 1 << num_edges
        examined_all += screened
        if found:
            bounds.record(k, "sat")
            return ExhaustiveResult(bounds, tuple(found.values()), k,
                                    total_all, examined_all, per_size)
        bounds.record(k, "unsat")
    return ExhaustiveResult(bounds, (), None, total_all, examined_all, per_size)


def _collect_labelings(basis, psi, tt, mask, k, in_edges, drivers, found):
    feeds = []
    for c in range(k):
        feeds.append([src for idx, src in in_edges[c] if mask & (1 << idx)])
    candidates = [[fn for fn in basis.functions if fn.arity_in == len(feeds[c])]
                  for c in range(k)]
    if any(not c for c in candidates):
        return
    for fns in itertools.product(*candidates):
        for c in range(k):
            uses = sum(1 for d in drivers if d == c)
            uses += sum(1 for cp in range(k) for src in feeds[cp] if src == c)
            if uses < fns[c].arity_out:
                break
        else:
            _try_orders(psi, tt, k, feeds, fns, drivers, found)


def _try_orders(psi, tt, k, feeds, fns, drivers, found):
    port_space = []
    for c in range(k):
        w = fns[c].arity_out
        # every edge out of a multi-output cell needs a port; single-output
        # cells have no choice to make
        consumers = [("po", j) for j, d in enumerate(drivers) if d == c]
        consumers += [("cell", cp, i) for cp in range(k)
                      for i, src in enumerate(feeds[cp]) if src == c]
        if w == 1:
            port_space.append([{con: 0 for con in consumers}])
        else:
            opts = []
            for combo in itertools.product(range(w), repeat=len(consumers)):
                if set(combo) == set(range(w)):
                    opts.append(dict(zip(consumers, combo)))
            port_space.append(opts)
    order_space = [list(itertools.permutations(range(len(feeds[c])))) for c in range(k)]
    for ports in itertools.product(*port_space):
        for orders in itertools.product(*order_space):
            gates = []
            for c in range(k):
                fan = []
                for slot in orders[c]:
                    src = feeds[c][slot]
                    if isinstance(src, tuple):
                        fan.append(Wire(psi.inputs[src[1]]))
                    else:
                        fan.append(Wire(f"g{src + 1}", ports[src][("cell", c, slot)]))
                gates.append(Gate(f"g{c + 1}", fns[c], tuple(fan)))
            outputs = []
            for j, o in enumerate(psi.outputs):
                d = drivers[j]
                outputs.append(Output(o.name, Wire(f"g{d + 1}", ports[d][("po", j)])))
            circuit = Circuit(f"{psi.name}-x{k}", psi.inputs, tuple(gates), tuple(outputs))
            if circuit.validate():
                continue
            if np.array_equal(circuit.truth_table(), tt):
                found.setdefault(canonical_key(circuit), circuit)


# --- synthesis proper ---

@dataclass
class SynthesisConfig:
    """Knobs for the size sweep.

    ``ancilla`` adds that many constant inputs (network mode only); their
    values are swept, all-false first, unless ``ancilla_values`` fixes them.
    Budgets apply to each size solve separately.
    """

    basis: Basis
    mode: str = "circuit"
    symmetry: bool = True
    max_size: int | None = None
    conflict_budget: int | None = None
    time_budget: float | None = None
    enumeration_limit: int | None = None
    enumerate_all: bool = False
    ancilla: int = 0
    ancilla_values: tuple | None = None
    solver: str = "internal"
    jobs: int = 1
    family: str | None = None
    index: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_size is not None and self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        for nm in ("conflict_budget", "time_budget", "enumeration_limit"):
            v = getattr(self, nm)
            if v is not None and v <= 0:
                raise ValueError(f"{nm} must be positive")
        if self.ancilla < 0:
            raise ValueError("ancilla count cannot be negative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.ancilla_values is not None:
            self.ancilla_values = tuple(bool(v) for v in self.ancilla_values)
            if self.ancilla and len(self.ancilla_values) != self.ancilla:
                raise ValueError("ancilla_values length disagrees with ancilla count")
        if (self.ancilla or self.ancilla_values) and self.mode != "network":
            raise ValueError("ancilla constants require network mode")


@dataclass
class SynthesisResult:
    status: str  # "sat", "unsat", "timeout"
    circuit: Circuit | None
    size: int | None
    optimal: bool
    circuits: tuple
    cell_functions: list | None
    ancilla_values: tuple | None
    bounds: SizeBounds
    ledger: list
    enumeration_complete: bool | None = None


def _size_probe(task):
    """Encode and solve one (size, ancilla combination) instance."""
    basis, psi, k, mode, combo, symmetry, solver, conflict_budget, time_budget = task
    enc = encode_synthesis(basis, psi, k, mode=mode, ancilla=combo, symmetry=symmetry)
    sess = Qbf2Session(enc.qbf, solver=solver)
    res = sess.solve_once(conflict_budget=conflict_budget, time_budget=time_budget)
    return k, res.status, res.assignment, res.wall, res.stats.get("conflicts")


def _sweep_sizes(cfg, psi, combo, hi):
    """Solve sizes 1..hi in order, stopping at the first sat.

    With jobs > 1 the sizes race in a process pool; results are still
    reported in size order and the sweep keeps probing below any sat it
    finds, so optimality evidence is identical to the serial path.
    """
    def task(k):
        return (cfg.basis, psi, k, cfg.mode, combo, cfg.symmetry, cfg.solver,
                cfg.conflict_budget, cfg.time_budget)

    results = {}
    if cfg.jobs <= 1 or hi <= 1:
        for k in range(1, hi + 1):
            out = _size_probe(task(k))
            results[k] = out
            if out[1] == "sat":
                break
        return results
    limit = hi
    next_k = 1
    inflight = {}
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        while inflight or next_k <= limit:
            while next_k <= limit and len(inflight) < cfg.jobs:
                inflight[pool.submit(_size_probe, task(next_k))] = next_k
                next_k += 1
            if not inflight:
                break
            done, _ = wait(inflight, return_when=FIRST_COMPLETED)
            for fut in done:
                k = inflight.pop(fut)
                out = fut.result()
                results[k] = out
                if out[1] == "sat":
                    limit = min(limit, k - 1)
    return results


def synthesize(cfg, psi):
    """Sweep candidate sizes from one cell upward until equivalence is sat.

    Records one ledger row per solve.  The first sat size is declared optimal
    only when every smaller size came back unsat (for every swept ancilla
    combination).  Timeouts are recorded and skipped over, never fatal.
    """
    problems = psi.validate()
    if problems:
        raise ValueError(f"requirements circuit is malformed: {problems[0]}")
    family = cfg.family if cfg.family is not None else psi.name
    rows = []

    sweep_ancilla = cfg.ancilla_values is None and cfg.ancilla > 0
    fixed_anc = cfg.ancilla_values if cfg.ancilla_values is not None else ()
    if sweep_ancilla:
        combos = [tuple(bool(b) for b in bits)
                  for bits in itertools.product((0, 1), repeat=cfg.ancilla)]
    else:
        combos = [fixed_anc]

    no_ancilla = len(combos) == 1 and combos[0] == ()
    if no_ancilla and cfg.mode != "boolean-function":
        # no ancillae at all: a gate-free wiring may already do the job
        start = time.monotonic()
        wire = wire_solution(psi, cfg.mode)
        if wire is not None:
            check = verify(wire, psi)
            if check.equivalent is not True:
                raise RuntimeError("wire precheck produced an inequivalent circuit")
            bounds = SizeBounds(start=0)
            bounds.record(0, "sat")
            rows.append(_ledger_row(family, cfg.index, 0, "sat", 0,
                                    time.monotonic() - start, 0))
            return SynthesisResult("sat", wire, 0, True, (wire,), [], (),
                                   bounds, rows)

    hi = cfg.max_size if cfg.max_size is not None else default_upper_bound(cfg.basis, psi)
    hi = max(1, hi)

    status_ck = {}
    best = None  # (k, combo, assignment)
    for combo in combos:
        combo_hi = hi if best is None else min(hi, best[0] - 1)
        if combo_hi < 1:
            break
        results = _sweep_sizes(cfg, psi, combo, combo_hi)
        for k in sorted(results):
            _, status, assignment, wall, conflicts = results[k]
            status_ck[(combo, k)] = _norm_status(status)
            gates = k if status == "sat" else None
            rows.append(_ledger_row(family, cfg.index, k, status, gates, wall, conflicts))
            if status == "sat" and (best is None or k < best[0]):
                best = (k, combo, assignment)

    bounds = SizeBounds(start=0 if (no_ancilla and cfg.mode != "boolean-function") else 1)
    if bounds.start == 0:
        bounds.record(0, "unsat")
    ran_ks = sorted({k for (_, k) in status_ck})
    for k in ran_ks:
        if best is not None and k > best[0]:
            continue
        statuses = [status_ck[(c, k)] for c in combos if (c, k) in status_ck]
        if "sat" in statuses:
            merged = "sat"
        elif len(statuses) == len(combos) and all(s == "unsat" for s in statuses):
            merged = "unsat"
        else:
            merged = "timeout"
        bounds.record(k, merged)

    if best is None:
        all_unsat = all(status_ck.get((c, k)) == "unsat"
                        for c in combos for k in range(1, hi + 1))
        return SynthesisResult("unsat" if all_unsat else "timeout", None, None, False,
                               (), None, None, bounds, rows)

    k_best, combo_best, assignment = best
    enc = encode_synthesis(cfg.basis, psi, k_best, mode=cfg.mode, ancilla=combo_best,
                           symmetry=cfg.symmetry)
    circuit = enc.decode_circuit(assignment)
    check = verify(circuit, psi)
    if check.equivalent is not True:
        raise RuntimeError("synthesized circuit failed independent verification")
    cell_fns = enc.cell_function_names(assignment)

    circuits = (circuit,)
    enumeration_complete = None
    if cfg.enumerate_all:
        winners = [c for c in combos if status_ck.get((c, k_best)) == "sat"]
        gathered = []
        enumeration_complete = True
        for combo in winners:
            enum = enumerate_solutions(psi, cfg.basis, k_best, mode=cfg.mode,
                                       ancilla=combo, symmetry=cfg.symmetry,
                                       solver=cfg.solver, limit=cfg.enumeration_limit,
                                       conflict_budget=cfg.conflict_budget,
                                       time_budget=cfg.time_budget)
            gathered.extend(enum.circuits)
            enumeration_complete = enumeration_complete and enum.complete
        if gathered:
            circuits = tuple(gathered)

    return SynthesisResult("sat", circuit, k_best, bounds.proven_optimal, circuits,
                           cell_fns, combo_best, bounds, rows, enumeration_complete)


@dataclass
class EnumerationResult:
    circuits: tuple
    count: int
    complete: bool


def enumerate_solutions(psi, basis, k, mode="circuit", ancilla=(), symmetry=True,
                        solver="internal", limit=None, conflict_budget=None,
                        time_budget=None):
    """All witnesses at one fixed size, decoded, verified, in discovery order."""
    enc = encode_synthesis(basis, psi, k, mode=mode, ancilla=ancilla, symmetry=symmetry)
    sess = Qbf2Session(enc.qbf, solver=solver)
    circuits = []
    for assignment in sess.enumerate_witnesses(limit=limit, conflict_budget=conflict_budget,
                                               time_budget=time_budget):
        circuit = enc.decode_circuit(assignment, name=f"{psi.name}-k{k}-{len(circuits) + 1}")
        check = verify(circuit, psi)
        if check.equivalent is not True:
            raise RuntimeError("enumerated solution failed independent verification")
        circuits.append(circuit)
    last = getattr(sess, "last_result", None)
    complete = last is not None and last.status == "unsat"
    return EnumerationResult(tuple(circuits), len(circuits), complete)


def reconstruct_circuit(witness, encoding, name=None):
    """Decode a witness into a circuit using the encoding's own metadata."""
    return encoding.decode_circuit(witness, name=name)


def derived_basis(circuit, name=None):
    """The set of distinct gate functions a circuit uses, as a basis.

    Functions sharing a name but not a table are renamed by arity so the
    basis stays unambiguous.
    """
    fns = []
    names = set()
    seen = {}
    for g in circuit.gates:
        key = (g.fn.arity_in, g.fn.arity_out, g.fn.table)
        if key in seen:
            continue
        fn = g.fn
        if fn.name in names:
            base = f"{fn.name}{fn.arity_in}"
            candidate = base
            while candidate in names:
                candidate += "_"
            fn = BooleanFunction(candidate, fn.arity_in, fn.arity_out, fn.table)
        seen[key] = fn
        names.add(fn.name)
        fns.append(fn)
    if not fns:
        raise ValueError("circuit has no gates to derive a basis from")
    return Basis(name or f"{circuit.name}-basis", tuple(fns))
