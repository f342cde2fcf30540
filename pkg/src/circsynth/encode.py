"""Equivalence miters with configurable hardware: cells, fabrics, constraints.

Two encodings share the same skeleton.  Label selection keeps a fixed wiring
and asks which basis function each node carries; synthesis additionally makes
the wiring itself part of the existential search through a selector matrix
(the interconnection fabric).  Both produce an exists-forall formula whose
existential block fully determines a candidate circuit and whose universal
block ranges over the primary inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boolfunc import (
    and_fn,
    buf_fn,
    cmp_fn,
    commuting_input_pairs,
    const_fn,
    fredkin_fn,
    impl_fn,
    ite_fn,
    nand_fn,
    nor_fn,
    not_fn,
    or_fn,
    toffoli_fn,
    xnor_fn,
    xor_fn,
)
from .circuit import Circuit, Gate, Output, Wire
from .formula import GateGraph, QBF2

MODES = ("circuit", "boolean-function", "network")


# --- building function semantics into a gate graph ---

_FIXED_MAKERS = {"NOT": not_fn, "BUF": buf_fn, "IMPL": impl_fn, "ITE": ite_fn, "CMP": cmp_fn,
                 "FREDKIN": fredkin_fn, "TOFFOLI": toffoli_fn,
                 "TRUE": lambda: const_fn(True), "FALSE": lambda: const_fn(False)}
_VARIADIC_MAKERS = {"AND": and_fn, "OR": or_fn, "NAND": nand_fn, "NOR": nor_fn,
                    "XOR": xor_fn, "XNOR": xnor_fn}


def _builtin_key(fn):
    """The mnemonic to dispatch on, provided fn's table really matches it."""
    mk = _FIXED_MAKERS.get(fn.name)
    if mk is not None:
        ref = mk()
        if ref.arity_in == fn.arity_in and ref.table == fn.table:
            return fn.name
    mk = _VARIADIC_MAKERS.get(fn.name)
    if mk is not None and fn.arity_in >= 1:
        ref = mk(fn.arity_in)
        if ref.table == fn.table and ref.arity_out == fn.arity_out:
            return fn.name
    return None


def apply_function(graph, fn, args):
    """Graph nodes computing fn(args); one node per output.

    Known gate shapes map to native graph operators; anything else falls back
    to a sum-of-minterms build straight from the truth table.
    """
    if len(args) != fn.arity_in:
        raise ValueError(f"{fn.name} expects {fn.arity_in} args, got {len(args)}")
    key = _builtin_key(fn)
    if key == "AND":
        return (graph.and_(*args),)
    if key == "OR":
        return (graph.or_(*args),)
    if key == "NAND":
        return (graph.not_(graph.and_(*args)),)
    if key == "NOR":
        return (graph.not_(graph.or_(*args)),)
    if key in ("XOR", "XNOR"):
        acc = args[0]
        for a in args[1:]:
            acc = graph.xor_(acc, a)
        return (acc if key == "XOR" else graph.not_(acc),)
    if key == "NOT":
        return (graph.not_(args[0]),)
    if key == "BUF":
        return (args[0],)
    if key == "IMPL":
        return (graph.or_(graph.not_(args[0]), args[1]),)
    if key == "ITE":
        return (graph.mux(args[0], args[2], args[1]),)
    if key == "CMP":
        return (graph.and_(*args), graph.or_(*args))
    if key == "FREDKIN":
        c, x, y = args
        return (c, graph.mux(c, x, y), graph.mux(c, y, x))
    if key == "TOFFOLI":
        a, b, c = args
        return (a, b, graph.xor_(c, graph.and_(a, b)))
    if key == "TRUE":
        return (graph.const(True),)
    if key == "FALSE":
        return (graph.const(False),)
    m = fn.arity_in
    outs = []
    for q in range(fn.arity_out):
        rows = [r for r in range(1 << m) if (fn.table[r] >> q) & 1]
        if len(rows) == 1 << m:
            outs.append(graph.const(True))
            continue
        terms = []
        for r in rows:
            lits = [args[i] if (r >> (m - 1 - i)) & 1 else graph.not_(args[i]) for i in range(m)]
            terms.append(graph.and_(*lits))
        outs.append(graph.or_(*terms))
    return tuple(outs)


def circuit_to_graph(graph, circuit, input_nodes):
    """Unfold a circuit over given input nodes; returns output name -> node."""
    problems = circuit.validate()
    if problems:
        raise ValueError(f"circuit {circuit.name} is malformed: {problems[0]}")
    wires = {Wire(nm): input_nodes[nm] for nm in circuit.inputs}
    for gate in circuit._topo_order():
        args = [wires[w] for w in gate.fanin]
        for q, node in enumerate(apply_function(graph, gate.fn, args)):
            wires[Wire(gate.name, q)] = node
    return {o.name: wires[o.wire] for o in circuit.outputs}


# --- multiplexer and selector-code helpers ---

def selector_count(n):
    """Selector lines needed to address n data wires."""
    if n < 1:
        raise ValueError("a multiplexer needs at least one data wire")
    return 0 if n == 1 else math.ceil(math.log2(n))


def build_multiplexer(graph, data, selectors):
    """Output wire selecting data[code]; n AND terms, shared inverters, one OR.

    Selector wires are most-significant first.  A single data wire passes
    through untouched and takes no selectors.  Codes beyond len(data) yield
    false; callers block them at the selector level.
    """
    if len(selectors) != selector_count(len(data)):
        raise ValueError(f"{len(data)} data wires need {selector_count(len(data))} selectors, "
                         f"got {len(selectors)}")
    if len(data) == 1:
        return data[0]
    w = len(selectors)
    inverted = [graph.not_(s) for s in selectors]
    terms = []
    for i, d in enumerate(data):
        lits = [selectors[b] if (i >> (w - 1 - b)) & 1 else inverted[b] for b in range(w)]
        terms.append(graph.and_(d, *lits))
    return graph.or_(*terms)


def _code_differs(sel_vars, code):
    """Clause literals asserting the selector code is not `code` (MSB first)."""
    w = len(sel_vars)
    return tuple(-sel_vars[b] if (code >> (w - 1 - b)) & 1 else sel_vars[b] for b in range(w))


def _code_value(sel_vars, assignment):
    value = 0
    for v in sel_vars:
        value = (value << 1) | (1 if assignment[v] else 0)
    return value


def _amo_pairs(vars_):
    return [(-vars_[i], -vars_[j]) for i in range(len(vars_)) for j in range(i + 1, len(vars_))]


# --- the interconnection fabric ---

def _fmt_source(src):
    if src[0] == "in":
        return f"in:{src[1]}"
    if src[0] == "anc":
        return f"anc{src[1] + 1}"
    return f"g{src[1] + 1}.out{src[2]}"


def _fmt_sink(sink):
    if sink[0] == "cellin":
        return f"g{sink[1] + 1}.in{sink[2] + 1}"
    if sink[0] == "out":
        return f"out:{sink[1]}"
    return f"garbage{sink[1] + 1}"


@dataclass
class Fabric:
    """Selector matrix wiring candidate sources to sinks, CB applied by omission.

    Sinks are cell input ports, primary outputs, and (network mode) garbage
    absorbers; sources are primary inputs, ancilla constants, and cell output
    ports.  Cell c's input rows list only primary sources and outputs of
    cells before c, so any selection is acyclic by construction.
    """

    mode: str
    k: int
    basis: object
    x_names: tuple
    y_names: tuple
    ancilla: tuple
    w_sel: int
    w_in: int
    w_out: int
    garbage: int
    sel: list  # per cell, selector var ids MSB first
    rows: list  # (sink, tuple of (source, var))
    cols: dict  # source -> list of (sink, var)
    num_s: int

    def row_vars(self, sink):
        for s, entries in self.rows:
            if s == sink:
                return [v for _, v in entries]
        raise KeyError(sink)


def build_fabric(k, x_names, y_names, basis, mode="circuit", ancilla=()):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    if k < 1:
        raise ValueError("at least one cell is required")
    if ancilla and mode != "network":
        raise ValueError("ancilla constants are only meaningful in network mode")
    x_names = tuple(x_names)
    y_names = tuple(y_names)
    ancilla = tuple(bool(a) for a in ancilla)
    w_sel = basis.selector_width
    w_in = basis.max_arity_in
    w_out = basis.max_arity_out

    garbage = 0
    if mode == "network":
        garbage = len(x_names) + len(ancilla) + k * w_out - (k * w_in + len(y_names))
        if garbage < 0:
            raise ValueError(
                f"network balance impossible: {len(y_names)} outputs exceed "
                f"{len(x_names)} inputs + {len(ancilla)} ancillae + cell surplus"
            )

    primary_sources = [("in", nm) for nm in x_names] + [("anc", i) for i in range(len(ancilla))]

    next_var = 1
    sel = []
    for _ in range(k):
        sel.append(list(range(next_var, next_var + w_sel)))
        next_var += w_sel

    rows = []
    cols = {}

    def add_row(sink, candidates):
        nonlocal next_var
        entries = []
        for src in candidates:
            entries.append((src, next_var))
            cols.setdefault(src, []).append((sink, next_var))
            next_var += 1
        rows.append((sink, tuple(entries)))

    for c in range(k):
        candidates = primary_sources + [("cell", cp, q) for cp in range(c) for q in range(w_out)]
        for p in range(w_in):
            add_row(("cellin", c, p), candidates)
    all_cell_outs = [("cell", c, q) for c in range(k) for q in range(w_out)]
    po_candidates = all_cell_outs if mode == "boolean-function" else primary_sources + all_cell_outs
    for nm in y_names:
        add_row(("out", nm), po_candidates)
    for gi in range(garbage):
        add_row(("garbage", gi), primary_sources + all_cell_outs)

    return Fabric(mode, k, basis, x_names, y_names, ancilla, w_sel, w_in, w_out,
                  garbage, sel, rows, cols, next_var - 1)


def invalid_code_clauses(fabric):
    """Block selector codes that name no basis function."""
    clauses = []
    nb = len(fabric.basis)
    for c in range(fabric.k):
        for code in range(nb, 1 << fabric.w_sel):
            clauses.append(_code_differs(fabric.sel[c], code))
    return clauses


def add_cardinality(fabric):
    """Row and column cardinality: the mode-independent and homogeneous parts.

    Every sink row gets at-most-one unconditionally.  At-least-one goes on
    rows and columns that exist under every selector code; rows and columns
    whose existence depends on the selected function's arity are handled by
    add_uucp with code-guarded clauses instead.
    """
    clauses = []
    fns = fabric.basis.functions
    for sink, entries in fabric.rows:
        vars_ = [v for _, v in entries]
        clauses.extend(_amo_pairs(vars_))
        if sink[0] == "cellin":
            p = sink[2]
            if all(f.arity_in > p for f in fns):
                clauses.append(tuple(vars_))
        else:
            clauses.append(tuple(vars_))
    for src, uses in sorted(fabric.cols.items(), key=lambda kv: kv[1][0][1]):
        vars_ = [v for _, v in uses]
        if src[0] in ("in", "anc"):
            clauses.append(tuple(vars_))
            if fabric.mode == "network":
                clauses.extend(_amo_pairs(vars_))
        else:
            q = src[2]
            if fabric.mode in ("boolean-function", "network"):
                clauses.extend(_amo_pairs(vars_))
            if all(f.arity_out > q for f in fns):
                clauses.append(tuple(vars_))
    if fabric.mode == "circuit":
        # Two primary outputs tied to one source would be permanently equal.
        for src, uses in sorted(fabric.cols.items(), key=lambda kv: kv[1][0][1]):
            po_vars = [v for sink, v in uses if sink[0] == "out"]
            clauses.extend(_amo_pairs(po_vars))
    return clauses


def add_uucp(fabric):
    """Neutralize ports that the selected function does not possess.

    A cell input row beyond the selected arity must stay empty; a cell output
    port beyond the selected out-arity disappears from the candidate sources;
    rows and columns that do exist under the code keep their at-least-one.
    All clauses are guarded by the cell's selector code, so a homogeneous
    basis produces nothing here.
    """
    clauses = []
    fns = fabric.basis.functions
    for sink, entries in fabric.rows:
        if sink[0] != "cellin":
            continue
        c, p = sink[1], sink[2]
        users = [i for i, f in enumerate(fns) if f.arity_in > p]
        idle = [i for i, f in enumerate(fns) if f.arity_in <= p]
        if not idle:
            continue
        vars_ = [v for _, v in entries]
        for i in users:
            clauses.append(_code_differs(fabric.sel[c], i) + tuple(vars_))
        for i in idle:
            guard = _code_differs(fabric.sel[c], i)
            for v in vars_:
                clauses.append(guard + (-v,))
    for src, uses in sorted(fabric.cols.items(), key=lambda kv: kv[1][0][1]):
        if src[0] != "cell":
            continue
        c, q = src[1], src[2]
        producers = [i for i, f in enumerate(fns) if f.arity_out > q]
        missing = [i for i, f in enumerate(fns) if f.arity_out <= q]
        if not missing:
            continue
        vars_ = [v for _, v in uses]
        for i in producers:
            clauses.append(_code_differs(fabric.sel[c], i) + tuple(vars_))
        for i in missing:
            guard = _code_differs(fabric.sel[c], i)
            for v in vars_:
                clauses.append(guard + (-v,))
    return clauses


def add_symmetry_breaking(fabric):
    """Order the feeds of commuting input pairs so mirror wirings collapse.

    For a function commuting in input pair (a, b), a < b, row b may take its
    source no earlier in the candidate list than row a: s_{b,j} implies
    s_{a,1} or ... or s_{a,j}, guarded by the selector code.  The chain is
    non-strict, so feeding both rows from the same source stays allowed.
    """
    clauses = []
    fns = fabric.basis.functions
    for c in range(fabric.k):
        row_vars = {}
        for sink, entries in fabric.rows:
            if sink[0] == "cellin" and sink[1] == c:
                row_vars[sink[2]] = [v for _, v in entries]
        for i, fn in enumerate(fns):
            for a, b in commuting_input_pairs(fn):
                va = row_vars[a - 1]
                vb = row_vars[b - 1]
                guard = _code_differs(fabric.sel[c], i)
                for j in range(len(vb)):
                    clauses.append(guard + (-vb[j],) + tuple(va[: j + 1]))
    return clauses


# --- miter assembly ---

@dataclass
class MiterEncoding:
    """An exists-forall equivalence formula plus everything needed to decode it.

    ``cells`` holds, per cell, the selector variable ids (MSB first) and the
    map from valid selector codes to basis functions.  Synthesis encodings
    also carry the fabric so matrix variables can be read back into wiring.
    """

    qbf: QBF2
    kind: str  # "label" or "synthesis"
    basis: object
    psi: Circuit
    x_names: tuple
    cells: list
    topology: object = None
    fabric: Fabric = None
    mode: str = None
    ancilla: tuple = ()

    @property
    def num_s(self):
        return len(self.qbf.s_vars)

    def decode_labeling(self, assignment):
        """Map a witness to node name -> basis function (label encodings)."""
        if self.kind != "label":
            raise ValueError("not a label-selection encoding")
        labeling = {}
        for cell in self.cells:
            code = _code_value(cell["sel"], assignment)
            fn = cell["valid"].get(code)
            if fn is None:
                raise RuntimeError(f"witness selects blocked code {code} at node {cell['name']}")
            labeling[cell["name"]] = fn
        return labeling

    def decode_circuit(self, assignment, name=None):
        """Reconstruct the designed circuit from a witness."""
        if self.kind == "label":
            return self.topology.relabel(self.decode_labeling(assignment), name=name)
        fabric = self.fabric
        chosen_fn = []
        for cell in self.cells:
            code = _code_value(cell["sel"], assignment)
            fn = cell["valid"].get(code)
            if fn is None:
                raise RuntimeError(f"witness selects blocked code {code} at cell {cell['name']}")
            chosen_fn.append(fn)

        def wire_of(src):
            if src[0] == "in":
                return Wire(src[1])
            if src[0] == "anc":
                return Wire(f"anc{src[1] + 1}")
            return Wire(f"g{src[1] + 1}", src[2])

        row_pick = {}
        for sink, entries in fabric.rows:
            picked = [src for src, v in entries if assignment[v]]
            if sink[0] == "cellin":
                c, p = sink[1], sink[2]
                needed = p < chosen_fn[c].arity_in
                if needed and len(picked) != 1:
                    raise RuntimeError(f"sink {_fmt_sink(sink)} has {len(picked)} sources, wants 1")
                if not needed and picked:
                    raise RuntimeError(f"unused sink {_fmt_sink(sink)} is driven")
            elif sink[0] == "out" and len(picked) != 1:
                raise RuntimeError(f"output {sink[1]} has {len(picked)} sources, wants 1")
            row_pick[sink] = picked[0] if picked else None

        gates = []
        for i, val in enumerate(fabric.ancilla):
            gates.append(Gate(f"anc{i + 1}", const_fn(val), ()))
        for c, fn in enumerate(chosen_fn):
            fanin = tuple(wire_of(row_pick[("cellin", c, p)]) for p in range(fn.arity_in))
            gates.append(Gate(f"g{c + 1}", fn, fanin))
        outputs = tuple(Output(nm, wire_of(row_pick[("out", nm)])) for nm in fabric.y_names)
        circuit = Circuit(name or f"{self.psi.name}-k{fabric.k}", self.psi.inputs,
                          tuple(gates), outputs)
        problems = circuit.validate()
        if problems:
            raise RuntimeError(f"reconstructed circuit is malformed: {problems[0]}")
        return circuit

    def cell_function_names(self, assignment):
        """The multiset of selected cell functions, as a sorted name list."""
        names = []
        for cell in self.cells:
            code = _code_value(cell["sel"], assignment)
            names.append(cell["valid"][code].name)
        return sorted(names)

    def describe(self):
        """Human-readable meaning of every existential variable."""
        lines = [f"{self.kind} encoding of {self.psi.name}: "
                 f"|S|={self.num_s} |X|={len(self.x_names)}"]
        for cell in self.cells:
            codes = " ".join(f"{code}={fn.name}" for code, fn in sorted(cell["valid"].items()))
            sel = ",".join(str(v) for v in cell["sel"]) or "-"
            lines.append(f"cell {cell['name']}: selectors [{sel}] codes {codes}")
        if self.fabric is not None:
            for sink, entries in self.fabric.rows:
                for src, v in entries:
                    lines.append(f"s{v}: {_fmt_sink(sink)} <- {_fmt_source(src)}")
        return "\n".join(lines)


def create_miter(basis, topo, psi):
    """Label-selection miter: which functions on this wiring match psi?

    The existential block is exactly the cells' selector bits; a witness is a
    labeling of the topology.
    """
    if set(topo.inputs) != set(psi.inputs):
        raise ValueError("topology and requirements disagree on input names")
    if {o.name for o in topo.outputs} != {o.name for o in psi.outputs}:
        raise ValueError("topology and requirements disagree on output names")
    problems = psi.validate()
    if problems:
        raise ValueError(f"requirements circuit is malformed: {problems[0]}")

    used = topo.used_ports()
    w_sel = basis.selector_width
    fns = basis.functions
    cells = []
    next_var = 1
    for node in topo.nodes:
        valid = {i: fn for i, fn in enumerate(fns)
                 if fn.arity_in == len(node.fanin) and fn.arity_out >= used[node.name]}
        if not valid:
            raise ValueError(
                f"no function in basis {basis.name} fits node {node.name!r} "
                f"({len(node.fanin)} inputs, {used[node.name]} used outputs)"
            )
        cells.append({"name": node.name, "sel": list(range(next_var, next_var + w_sel)),
                      "valid": valid})
        next_var += w_sel
    num_s = next_var - 1
    x_vars = list(range(num_s + 1, num_s + 1 + len(psi.inputs)))
    x_of = dict(zip(psi.inputs, x_vars))

    s_clauses = []
    for cell in cells:
        for code in range(1 << w_sel):
            if code not in cell["valid"]:
                s_clauses.append(_code_differs(cell["sel"], code))

    graph = GateGraph()
    wires = {Wire(nm): graph.var(x_of[nm]) for nm in topo.inputs}

    pending = {n.name: n for n in topo.nodes}
    cell_of = {c["name"]: c for c in cells}
    ordered = []
    state = {}

    def visit(name):
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise ValueError(f"topology has a cycle through {name!r}")
        state[name] = 1
        for w in pending[name].fanin:
            if w.node in pending:
                visit(w.node)
        state[name] = 2
        ordered.append(pending[name])

    for n in topo.nodes:
        visit(n.name)

    for node in ordered:
        cell = cell_of[node.name]
        sel_nodes = [graph.var(v) for v in cell["sel"]]
        args = [wires[w] for w in node.fanin]
        outs_by_fn = {i: apply_function(graph, fn, args) for i, fn in cell["valid"].items()}
        for q in range(used[node.name]):
            data = [outs_by_fn[i][q] if i in outs_by_fn else graph.const(False)
                    for i in range(len(fns))]
            wires[Wire(node.name, q)] = build_multiplexer(graph, data, sel_nodes)

    x_nodes = {nm: wires[Wire(nm)] for nm in topo.inputs}
    psi_out = circuit_to_graph(graph, psi, x_nodes)
    ties = []
    for o in topo.outputs:
        ties.append(graph.xnor_(wires[o.wire], psi_out[o.name]))
    root = graph.and_(*ties)

    qbf = QBF2(graph, root, list(range(1, num_s + 1)), x_vars, s_clauses)
    return MiterEncoding(qbf, "label", basis, psi, tuple(psi.inputs), cells, topology=topo)


def encode_synthesis(basis, psi, k, mode="circuit", ancilla=(), symmetry=True):
    """Synthesis miter: k universal cells plus a fabric, equivalence to psi.

    The existential block is the cells' selector bits followed by the fabric
    matrix, in fabric allocation order; the universal block is psi's inputs.
    """
    problems = psi.validate()
    if problems:
        raise ValueError(f"requirements circuit is malformed: {problems[0]}")
    y_names = [o.name for o in psi.outputs]
    fabric = build_fabric(k, psi.inputs, y_names, basis, mode=mode, ancilla=ancilla)
    fns = basis.functions

    s_clauses = []
    s_clauses.extend(invalid_code_clauses(fabric))
    s_clauses.extend(add_cardinality(fabric))
    s_clauses.extend(add_uucp(fabric))
    if symmetry:
        s_clauses.extend(add_symmetry_breaking(fabric))

    num_s = fabric.num_s
    x_vars = list(range(num_s + 1, num_s + 1 + len(psi.inputs)))
    x_of = dict(zip(psi.inputs, x_vars))

    graph = GateGraph()
    source_node = {}
    for nm in psi.inputs:
        source_node[("in", nm)] = graph.var(x_of[nm])
    for i, val in enumerate(fabric.ancilla):
        source_node[("anc", i)] = graph.const(val)

    row_entries = dict(fabric.rows)
    cells_meta = []
    for c in range(k):
        in_wires = []
        for p in range(fabric.w_in):
            terms = [graph.and_(graph.var(v), source_node[src])
                     for src, v in row_entries[("cellin", c, p)]]
            in_wires.append(graph.or_(*terms))
        sel_nodes = [graph.var(v) for v in fabric.sel[c]]
        outs_by_fn = [apply_function(graph, fn, in_wires[: fn.arity_in]) for fn in fns]
        for q in range(fabric.w_out):
            data = [outs_by_fn[i][q] if fns[i].arity_out > q else graph.const(False)
                    for i in range(len(fns))]
            source_node[("cell", c, q)] = build_multiplexer(graph, data, sel_nodes)
        cells_meta.append({"name": f"g{c + 1}", "sel": fabric.sel[c],
                           "valid": dict(enumerate(fns))})

    po_node = {}
    for nm in y_names:
        terms = [graph.and_(graph.var(v), source_node[src]) for src, v in row_entries[("out", nm)]]
        po_node[nm] = graph.or_(*terms)

    psi_out = circuit_to_graph(graph, psi, {nm: source_node[("in", nm)] for nm in psi.inputs})
    ties = [graph.xnor_(po_node[nm], psi_out[nm]) for nm in y_names]
    root = graph.and_(*ties)

    qbf = QBF2(graph, root, list(range(1, num_s + 1)), x_vars, s_clauses)
    return MiterEncoding(qbf, "synthesis", basis, psi, tuple(psi.inputs), cells_meta,
                         fabric=fabric, mode=mode, ancilla=fabric.ancilla)
