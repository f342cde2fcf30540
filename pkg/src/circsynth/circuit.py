"""Gate-level circuits: a named DAG of library-function instances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

MAX_TABLE_INPUTS = 20


class Wire(NamedTuple):
    """A value produced inside a circuit: an input, or output ``port`` of a gate."""

    node: str
    port: int = 0

    def __str__(self):
        return self.node if self.port == 0 else f"{self.node}.{self.port}"


def _as_wire(w):
    if isinstance(w, Wire):
        return w
    if isinstance(w, str):
        return Wire(w)
    return Wire(*w)


@dataclass(frozen=True)
class Gate:
    name: str
    fn: "BooleanFunction"
    fanin: tuple

    def __post_init__(self):
        object.__setattr__(self, "fanin", tuple(_as_wire(w) for w in self.fanin))


@dataclass(frozen=True)
class Output:
    name: str
    wire: Wire

    def __post_init__(self):
        object.__setattr__(self, "wire", _as_wire(self.wire))


@dataclass(frozen=True)
class Circuit:
    """A combinational circuit over named inputs, gates, and named outputs."""

    name: str
    inputs: tuple
    gates: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @property
    def num_gates(self):
        return len(self.gates)

    @property
    def input_names(self):
        return list(self.inputs)

    @property
    def output_names(self):
        return [o.name for o in self.outputs]

    def gate_named(self, name):
        for g in self.gates:
            if g.name == name:
                return g
        raise KeyError(f"no gate {name!r} in circuit {self.name}")

    def validate(self):
        """Return a list of human-readable violations; empty means well formed."""
        problems = []
        seen = set()
        for n in self.inputs:
            if n in seen:
                problems.append(f"duplicate input name {n!r}")
            seen.add(n)
        producers = {n: 1 for n in self.inputs}
        for g in self.gates:
            if g.name in producers:
                problems.append(f"node name {g.name!r} defined twice")
            producers[g.name] = g.fn.arity_out
        for g in self.gates:
            if len(g.fanin) != g.fn.arity_in:
                problems.append(
                    f"gate {g.name!r} ({g.fn.name}) has {len(g.fanin)} fanins, needs {g.fn.arity_in}"
                )
            for w in g.fanin:
                if w.node not in producers:
                    problems.append(f"gate {g.name!r} reads undefined node {w.node!r}")
                elif w.port >= producers[w.node]:
                    problems.append(f"gate {g.name!r} reads missing port {w}")
        onames = set()
        for o in self.outputs:
            if o.name in onames:
                problems.append(f"duplicate output name {o.name!r}")
            onames.add(o.name)
            if o.wire.node not in producers:
                problems.append(f"output {o.name!r} reads undefined node {o.wire.node!r}")
            elif o.wire.port >= producers[o.wire.node]:
                problems.append(f"output {o.name!r} reads missing port {o.wire}")
        if not problems and self._topo_order() is None:
            problems.append("combinational cycle among gates")
        return problems

    def _topo_order(self):
        """Gates in dependency order, or None if there is a cycle."""
        gate_of = {g.name: g for g in self.gates}
        order, state = [], {}

        def visit(name):
            if state.get(name) == 2:
                return True
            if state.get(name) == 1:
                return False
            state[name] = 1
            for w in gate_of[name].fanin:
                if w.node in gate_of and not visit(w.node):
                    return False
            state[name] = 2
            order.append(gate_of[name])
            return True

        for g in self.gates:
            if not visit(g.name):
                return None
        return order

    def evaluate(self, assignment):
        """Evaluate one input assignment (dict name -> bool); returns dict output name -> bool."""
        values = {Wire(n): bool(assignment[n]) for n in self.inputs}
        order = self._topo_order()
        if order is None:
            raise ValueError(f"circuit {self.name} has a cycle")
        for g in order:
            args = [values[w] for w in g.fanin]
            for j, v in enumerate(g.fn.eval(args)):
                values[Wire(g.name, j)] = v
        return {o.name: values[o.wire] for o in self.outputs}

    def truth_table(self):
        """Full truth table as a (2**m, n) bool array.

        Row r assigns input i (1-based) the bit (r >> (m - i)) & 1, so input 1
        is the most significant bit of the row index.  Column j is output j.
        """
        m = len(self.inputs)
        if m > MAX_TABLE_INPUTS:
            raise ValueError(f"refusing to tabulate {m} inputs (limit {MAX_TABLE_INPUTS})")
        problems = self.validate()
        if problems:
            raise ValueError(f"circuit {self.name} is malformed: {problems[0]}")
        rows = np.arange(1 << m, dtype=np.int64)
        values = {}
        for i, n in enumerate(self.inputs):
            values[Wire(n)] = ((rows >> (m - 1 - i)) & 1).astype(bool)
        for g in self._topo_order():
            idx = np.zeros(1 << m, dtype=np.int64)
            for pos, w in enumerate(g.fanin):
                idx = (idx << 1) | values[w].astype(np.int64)
            tbl = np.asarray(g.fn.table, dtype=np.int64)
            looked = tbl[idx] if g.fn.arity_in > 0 else np.full(1 << m, g.fn.table[0], dtype=np.int64)
            for j in range(g.fn.arity_out):
                values[Wire(g.name, j)] = ((looked >> j) & 1).astype(bool)
        out = np.empty((1 << m, len(self.outputs)), dtype=bool)
        for j, o in enumerate(self.outputs):
            out[:, j] = values[o.wire]
        return out


@dataclass(frozen=True)
class TopoNode:
    """A circuit node stripped of its function label: name and ordered fanin."""

    name: str
    fanin: tuple

    def __post_init__(self):
        object.__setattr__(self, "fanin", tuple(Wire(*w) if not isinstance(w, Wire) else w for w in self.fanin))


@dataclass(frozen=True)
class Topology:
    """The shape of a circuit: wiring with the gate labels erased."""

    name: str
    inputs: tuple
    nodes: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    def used_ports(self):
        """How many output ports of each node are actually referenced (min 1)."""
        used = {n.name: 1 for n in self.nodes}
        for n in self.nodes:
            for w in n.fanin:
                if w.node in used:
                    used[w.node] = max(used[w.node], w.port + 1)
        for o in self.outputs:
            if o.wire.node in used:
                used[o.wire.node] = max(used[o.wire.node], o.wire.port + 1)
        return used

    def relabel(self, labeling, name=None):
        """Attach a function to every node; labeling maps node name -> function."""
        gates = tuple(Gate(n.name, labeling[n.name], n.fanin) for n in self.nodes)
        return Circuit(name or f"{self.name}-labeled", self.inputs, gates, self.outputs)


def topology_of(circuit):
    """Erase the function labels of a circuit, keeping names, slots, and wiring."""
    nodes = tuple(TopoNode(g.name, g.fanin) for g in circuit.gates)
    return Topology(circuit.name, circuit.inputs, nodes, circuit.outputs)


def equivalent_bruteforce(a, b):
    """True if two circuits compute the same function, matching inputs and outputs by name.

    Requires identical input name sets and output name sets; raises ValueError
    otherwise so an interface mismatch never reads as plain inequivalence.
    """
    if set(a.inputs) != set(b.inputs):
        raise ValueError(f"input names differ: {sorted(a.inputs)} vs {sorted(b.inputs)}")
    if set(a.output_names) != set(b.output_names):
        raise ValueError(f"output names differ: {sorted(a.output_names)} vs {sorted(b.output_names)}")
    ta = a.truth_table()
    # Re-tabulate b with a's input order so the row meaning matches.
    b_perm = Circuit(b.name, a.inputs, b.gates, b.outputs)
    tb = b_perm.truth_table()
    col_b = {n: j for j, n in enumerate(b_perm.output_names)}
    for j, n in enumerate(a.output_names):
        if not np.array_equal(ta[:, j], tb[:, col_b[n]]):
            return False
    return True
