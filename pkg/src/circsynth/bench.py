"""Reading and writing circuits in a BENCH netlist dialect.

Beyond classic BENCH (INPUT/OUTPUT declarations and ``sig = GATE(a, b)``
lines) this dialect adds multi-output gates, written ``g[0..2] = FREDKIN(a,
b, c)``, whose individual wires are referenced as ``g.0``, ``g.1``, ... with
the bare name meaning port 0, and named output mappings ``OUTPUT(y = g.2)``.
"""

from __future__ import annotations

import os

from .boolfunc import (
    and_fn,
    buf_fn,
    cmp_fn,
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


def _fn_for(mnemonic, argc, where):
    m = mnemonic.upper()
    fixed = {"NOT": (1, not_fn), "BUF": (1, buf_fn), "IMPL": (2, impl_fn), "ITE": (3, ite_fn),
             "CMP": (2, cmp_fn), "FREDKIN": (3, fredkin_fn), "CSWAP": (3, fredkin_fn),
             "TOFFOLI": (3, toffoli_fn), "CCNOT": (3, toffoli_fn),
             "TRUE": (0, lambda: const_fn(True)), "FALSE": (0, lambda: const_fn(False))}
    if m in fixed:
        want, maker = fixed[m]
        if argc != want:
            raise ValueError(f"{where}: {m} takes {want} arguments, got {argc}")
        return maker()
    variadic = {"AND": (1, and_fn), "OR": (1, or_fn), "NAND": (1, nand_fn), "NOR": (1, nor_fn),
                "XOR": (2, xor_fn), "XNOR": (2, xnor_fn)}
    if m in variadic:
        least, maker = variadic[m]
        if argc < least:
            raise ValueError(f"{where}: {m} needs at least {least} arguments, got {argc}")
        return maker(argc)
    raise ValueError(f"{where}: unknown gate type {mnemonic!r}")


def _parse_wire(text, where):
    text = text.strip()
    if not text:
        raise ValueError(f"{where}: empty wire reference")
    if "." in text:
        node, _, port = text.rpartition(".")
        if node and port.isdigit():
            return Wire(node, int(port))
    return Wire(text, 0)


def _parse_lhs(text, where):
    """Left-hand side of a gate line: ``name`` or ``name[0..k]``; returns (name, declared_ports)."""
    text = text.strip()
    if text.endswith("]") and "[" in text:
        name, _, rng = text[:-1].partition("[")
        lo, sep, hi = rng.partition("..")
        if sep != ".." or not (lo.strip().isdigit() and hi.strip().isdigit()):
            raise ValueError(f"{where}: bad port range {text!r}")
        lo_i, hi_i = int(lo), int(hi)
        if lo_i != 0 or hi_i < lo_i:
            raise ValueError(f"{where}: port range must start at 0, got {text!r}")
        return name.strip(), hi_i + 1
    return text, None


def parse_bench(text, name="bench"):
    inputs = []
    gates = []
    output_decls = []  # (out_name, wire or None, where); None = same-named wire
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{name}:{lineno}"
        upper = line.upper()
        if upper.startswith("INPUT"):
            inner = _inside_parens(line, where)
            inputs.append(inner.strip())
            continue
        if upper.startswith("OUTPUT"):
            inner = _inside_parens(line, where)
            if "=" in inner:
                out_name, _, ref = inner.partition("=")
                output_decls.append((out_name.strip(), _parse_wire(ref, where), where))
            else:
                output_decls.append((inner.strip(), None, where))
            continue
        if "=" not in line:
            raise ValueError(f"{where}: cannot parse line {raw!r}")
        lhs, _, rhs = line.partition("=")
        gate_name, declared_ports = _parse_lhs(lhs, where)
        rhs = rhs.strip()
        if "(" not in rhs or not rhs.endswith(")"):
            raise ValueError(f"{where}: expected 'GATE(args)' on right-hand side, got {rhs!r}")
        mnemonic, _, arg_text = rhs[:-1].partition("(")
        arg_text = arg_text.strip()
        args = [a for a in (p.strip() for p in arg_text.split(","))] if arg_text else []
        fn = _fn_for(mnemonic.strip(), len(args), where)
        if declared_ports is not None and declared_ports != fn.arity_out:
            raise ValueError(
                f"{where}: {gate_name}[0..{declared_ports - 1}] declares {declared_ports} ports "
                f"but {fn.name} has {fn.arity_out}"
            )
        gates.append(Gate(gate_name, fn, tuple(_parse_wire(a, where) for a in args)))
    outputs = []
    for out_name, wire, where in output_decls:
        outputs.append(Output(out_name, wire if wire is not None else Wire(out_name, 0)))
    circuit = Circuit(name, tuple(inputs), tuple(gates), tuple(outputs))
    problems = circuit.validate()
    if problems:
        raise ValueError(f"{name}: netlist is malformed: {problems[0]}")
    return circuit


def _inside_parens(line, where):
    start = line.find("(")
    end = line.rfind(")")
    if start < 0 or end < start:
        raise ValueError(f"{where}: expected parentheses in {line!r}")
    return line[start + 1 : end]


def load_bench(path):
    with open(path) as fh:
        text = fh.read()
    return parse_bench(text, name=os.path.splitext(os.path.basename(path))[0])


_WRITE_CHECK = {
    "NOT": not_fn, "BUF": buf_fn, "IMPL": impl_fn, "ITE": ite_fn, "CMP": cmp_fn,
    "FREDKIN": fredkin_fn, "TOFFOLI": toffoli_fn,
    "TRUE": lambda: const_fn(True), "FALSE": lambda: const_fn(False),
}
_WRITE_VARIADIC = {"AND": and_fn, "OR": or_fn, "NAND": nand_fn, "NOR": nor_fn,
                   "XOR": xor_fn, "XNOR": xnor_fn}


def _mnemonic_for(fn):
    if fn.name in _WRITE_CHECK and _WRITE_CHECK[fn.name]().table == fn.table:
        return fn.name
    if fn.name in _WRITE_VARIADIC:
        ref = _WRITE_VARIADIC[fn.name](fn.arity_in)
        if ref.table == fn.table:
            return ref.name  # 1-ary AND/OR come back as BUF, NAND/NOR as NOT
    # Fall back on recognizing the table regardless of the stored name.
    for mk in _WRITE_CHECK.values():
        ref = mk()
        if ref.arity_in == fn.arity_in and ref.arity_out == fn.arity_out and ref.table == fn.table:
            return ref.name
    for mk in _WRITE_VARIADIC.values():
        ref = mk(fn.arity_in) if fn.arity_in >= 1 else None
        if ref is not None and ref.arity_out == fn.arity_out and ref.table == fn.table:
            return ref.name
    raise ValueError(f"function {fn.name!r} ({fn.arity_in}->{fn.arity_out}) has no BENCH mnemonic")


def write_bench(circuit):
    problems = circuit.validate()
    if problems:
        raise ValueError(f"refusing to write malformed circuit: {problems[0]}")
    lines = [f"# {circuit.name}"]
    for n in circuit.inputs:
        lines.append(f"INPUT({n})")
    for o in circuit.outputs:
        if o.wire == Wire(o.name, 0):
            lines.append(f"OUTPUT({o.name})")
        else:
            lines.append(f"OUTPUT({o.name} = {o.wire})")
    order = circuit._topo_order()
    for g in order:
        mnemonic = _mnemonic_for(g.fn)
        lhs = g.name if g.fn.arity_out == 1 else f"{g.name}[0..{g.fn.arity_out - 1}]"
        args = ", ".join(str(w) for w in g.fanin)
        lines.append(f"{lhs} = {mnemonic}({args})")
    return "\n".join(lines) + "\n"


def save_bench(circuit, path):
    with open(path, "w") as fh:
        fh.write(write_bench(circuit))
