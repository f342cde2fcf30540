"""Independent reference implementations the tests compare the package against.

Everything here decides by brute force or direct arithmetic, never through
the solver stack under test.
"""

from __future__ import annotations

import itertools

import numpy as np

from circsynth import QBF2, Wire, equivalent_bruteforce, topology_of
from circsynth.formula import GateGraph


def cnf_by_enumeration(num_vars, clauses):
    """Decide a clause set by checking every assignment; returns (status, model).

    The model, when present, is a dict indexed 1..num_vars like the solver's.
    Vectorized over all 2^n assignments, so keep n small (<= 22 or so).
    """
    rows = np.arange(1 << num_vars, dtype=np.uint32)
    alive = np.ones(1 << num_vars, dtype=bool)
    for cl in clauses:
        if not cl:
            return "unsat", None
        mask = np.zeros(1 << num_vars, dtype=bool)
        for lit in cl:
            bit = (rows >> (abs(lit) - 1)) & 1
            mask |= (bit == 1) if lit > 0 else (bit == 0)
        alive &= mask
        if not alive.any():
            return "unsat", None
    row = int(rows[alive][0])
    model = {v: bool((row >> (v - 1)) & 1) for v in range(1, num_vars + 1)}
    return "sat", model


def count_models(num_vars, clauses):
    """How many assignments satisfy the clause set."""
    rows = np.arange(1 << num_vars, dtype=np.uint32)
    alive = np.ones(1 << num_vars, dtype=bool)
    for cl in clauses:
        if not cl:
            return 0
        mask = np.zeros(1 << num_vars, dtype=bool)
        for lit in cl:
            bit = (rows >> (abs(lit) - 1)) & 1
            mask |= (bit == 1) if lit > 0 else (bit == 0)
        alive &= mask
    return int(alive.sum())


def random_clauses(rng, num_vars, num_clauses, max_width=3):
    """A random clause list with literals over 1..num_vars."""
    clauses = []
    for _ in range(num_clauses):
        width = rng.randint(1, max_width)
        vs = rng.sample(range(1, num_vars + 1), min(width, num_vars))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return clauses


def random_qbf(rng, num_s, num_x, num_ops):
    """A random exists-forall instance over a fresh operator DAG."""
    g = GateGraph()
    pool = [g.var(v) for v in range(1, num_s + num_x + 1)]
    if rng.random() < 0.1:
        pool.append(g.const(rng.random() < 0.5))
    for _ in range(num_ops):
        op = rng.choice(("and", "or", "not", "xor", "mux"))
        if op == "not":
            pool.append(g.not_(rng.choice(pool)))
        elif op == "xor":
            pool.append(g.xor_(rng.choice(pool), rng.choice(pool)))
        elif op == "mux":
            sel = rng.choice(pool)
            pool.append(g.mux(sel, rng.choice(pool), rng.choice(pool)))
        else:
            k = rng.randint(2, 4)
            args = [rng.choice(pool) for _ in range(k)]
            pool.append(g.and_(*args) if op == "and" else g.or_(*args))
    return QBF2(g, pool[-1], list(range(1, num_s + 1)),
                list(range(num_s + 1, num_s + num_x + 1)))


def qbf_by_enumeration(qbf):
    """Decide exists-S forall-X by two nested exhaustive loops."""
    ns, nx = len(qbf.s_vars), len(qbf.x_vars)
    for s_bits in range(1 << ns):
        env = {qbf.s_vars[i]: bool((s_bits >> i) & 1) for i in range(ns)}
        if not all(_clause_true(cl, env) for cl in qbf.s_clauses):
            continue
        ok = True
        for x_bits in range(1 << nx):
            for i in range(nx):
                env[qbf.x_vars[i]] = bool((x_bits >> i) & 1)
            if not qbf.graph.evaluate(qbf.root, env):
                ok = False
                break
        if ok:
            return "sat"
    return "unsat"


def _clause_true(clause, env):
    return any(env.get(abs(l), False) == (l > 0) for l in clause)


def brute_labelings(basis, psi, topo=None):
    """Every function assignment to the topology that realizes psi.

    Tries all combinations of arity-compatible basis functions, mirroring
    how label selection restricts candidates per node, and keeps the ones
    whose relabeled circuit matches psi's truth table.
    """
    if topo is None:
        topo = topology_of(psi)
    used = topo.used_ports()
    candidates = []
    for node in topo.nodes:
        fits = [f for f in basis.functions
                if f.arity_in == len(node.fanin) and f.arity_out >= used[node.name]]
        candidates.append(fits)
    found = []
    for combo in itertools.product(*candidates):
        labeling = {node.name: fn for node, fn in zip(topo.nodes, combo)}
        if equivalent_bruteforce(topo.relabel(labeling), psi):
            found.append(labeling)
    return found


def selector_assignment(encoding, circuit):
    """The S assignment a hand-built circuit induces on a synthesis encoding.

    The circuit must live on the encoding's fabric grid: gates named g1..gk
    in cell order, inputs named like the requirement's, ancilla constants
    named anc1..ancN, and port q of cell c referenced as Wire("g{c+1}", q).
    Every fabric variable is set structurally; no solver runs.
    """
    fabric = encoding.fabric
    fns = list(fabric.basis.functions)
    gate_of = {g.name: g for g in circuit.gates}
    assignment = {}

    def set_bits(sel_vars, code):
        for j, v in enumerate(sel_vars):
            assignment[v] = bool((code >> (len(sel_vars) - 1 - j)) & 1)

    def source_key(wire):
        if wire.node in fabric.x_names:
            return ("in", wire.node)
        if wire.node.startswith("anc") and wire.node[3:].isdigit():
            return ("anc", int(wire.node[3:]) - 1)
        if wire.node.startswith("g") and wire.node[1:].isdigit():
            return ("cell", int(wire.node[1:]) - 1, wire.port)
        raise ValueError(f"wire {wire} is not on the fabric grid")

    chosen = {}
    for c in range(fabric.k):
        gate = gate_of[f"g{c + 1}"]
        code = next(i for i, f in enumerate(fns)
                    if f.table == gate.fn.table and f.arity_in == gate.fn.arity_in)
        set_bits(fabric.sel[c], code)
        for p, wire in enumerate(gate.fanin):
            chosen[("cellin", c, p)] = source_key(wire)
    for o in circuit.outputs:
        chosen[("out", o.name)] = source_key(o.wire)

    if fabric.garbage:
        used = set(chosen.values())
        leftovers = [("in", nm) for nm in fabric.x_names if ("in", nm) not in used]
        leftovers += [("anc", i) for i in range(len(fabric.ancilla))
                      if ("anc", i) not in used]
        for c in range(fabric.k):
            fn = gate_of[f"g{c + 1}"].fn
            leftovers += [("cell", c, q) for q in range(fn.arity_out)
                          if ("cell", c, q) not in used]
        if len(leftovers) != fabric.garbage:
            raise ValueError(f"{len(leftovers)} unused sources "
                             f"for {fabric.garbage} garbage rows")
        for gi, src in enumerate(leftovers):
            chosen[("garbage", gi)] = src

    for sink, entries in fabric.rows:
        want = chosen.get(sink)
        for src, var in entries:
            assignment[var] = src == want
    return assignment


def qbf_holds_under(qbf, assignment):
    """Whether the side clauses pass and the matrix is true for every X."""
    for cl in qbf.s_clauses:
        if not _clause_true(cl, assignment):
            return False
    nx = len(qbf.x_vars)
    env = dict(assignment)
    for bits in range(1 << nx):
        for i, x in enumerate(qbf.x_vars):
            env[x] = bool((bits >> (nx - 1 - i)) & 1)
        if not qbf.graph.evaluate(qbf.root, env):
            return False
    return True


def word_value(bits):
    """Little-endian bits to integer."""
    return sum(int(b) << i for i, b in enumerate(bits))


def family_reference(family, n):
    """The input-bits -> output-bits function each generated family must match.

    Bit tuples follow the generated interface order: position i is input
    x{i+1} or output y{i+1}, words least significant first.
    """
    if family == "mux":
        def mux(bits):
            return (bits[word_value(bits[n:])],)
        return mux
    if family == "demux":
        def demux(bits):
            sel = word_value(bits[1:])
            return tuple(bits[0] if i == sel else 0 for i in range(n))
        return demux
    if family == "add":
        def add(bits):
            total = word_value(bits[:n]) + word_value(bits[n:2 * n]) + bits[2 * n]
            return tuple((total >> i) & 1 for i in range(n + 1))
        return add
    if family == "sub":
        def sub(bits):
            total = word_value(bits[:n]) - word_value(bits[n:2 * n]) - bits[2 * n]
            total %= 1 << (n + 1)
            return tuple((total >> i) & 1 for i in range(n + 1))
        return sub
    if family == "cmp":
        def cmp_(bits):
            a, b = word_value(bits[:n]), word_value(bits[n:])
            return (int(a == b), int(a > b), int(a < b))
        return cmp_
    if family == "shift":
        w = 1 << n

        def shift(bits):
            value = word_value(bits[:w]) >> word_value(bits[w:])
            return tuple((value >> i) & 1 for i in range(w))
        return shift
    if family == "moa":
        k = (n + 1).bit_length() - 1

        def moa(bits):
            total = sum(bits)
            return tuple((total >> i) & 1 for i in range(k))
        return moa
    if family == "mul":
        def mul(bits):
            product = word_value(bits[:n]) * word_value(bits[n:])
            return tuple((product >> i) & 1 for i in range(2 * n))
        return mul
    raise ValueError(f"unknown family {family!r}")


def check_family(circuit, family, n):
    """Exhaustively compare a generated circuit against its reference."""
    ref = family_reference(family, n)
    m = len(circuit.inputs)
    for bits in itertools.product((0, 1), repeat=m):
        asn = {nm: bool(bits[i]) for i, nm in enumerate(circuit.inputs)}
        out = circuit.evaluate(asn)
        got = tuple(int(out[o.name]) for o in circuit.outputs)
        if got != ref(bits):
            return False
    return True
