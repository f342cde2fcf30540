"""Generators for the ALU circuit families plus table and netlist requirements.

All generated circuits use the canonical interface names x1..xm and y1..yn,
least significant first, so circuits from different families with the same
behavior can be compared by name without adapters.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .bench import load_bench, parse_bench
from .boolfunc import and_fn, const_fn, not_fn, or_fn, xnor_fn, xor_fn
from .circuit import Circuit, Gate, Output, Wire

FAMILIES = ("mux", "demux", "add", "sub", "cmp", "shift", "moa", "mul")

# The parameter sets forming the ALU-4 benchmark suite: every valid n up to 4.
ALU4_RANGE = {
    "mux": (2, 4),
    "demux": (2, 4),
    "add": (1, 2, 3, 4),
    "sub": (1, 2, 3, 4),
    "cmp": (1, 2, 3, 4),
    "shift": (1, 2, 3, 4),
    "moa": (3,),
    "mul": (2, 3, 4),
}

BUNDLED_74XXX = ("74182", "74283", "74L85", "74181")


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def validate_family(family, n):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if family in ("mux", "demux"):
        if not (_is_pow2(n) and n >= 2):
            raise ValueError(f"{family} requires n = 2^k with k >= 1, got {n}")
    elif family == "moa":
        if not (_is_pow2(n + 1) and n >= 3):
            raise ValueError(f"moa requires n = 2^k - 1 with k >= 2, got {n}")
    elif family == "mul":
        if n < 2:
            raise ValueError(f"mul requires n >= 2, got {n}")
    else:
        if n < 1:
            raise ValueError(f"{family} requires n >= 1, got {n}")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int

    def __post_init__(self):
        validate_family(self.family, self.n)


def expected_counts(family, n):
    """The (inputs, outputs, gates) a generated circuit must have."""
    validate_family(family, n)
    if family == "mux":
        k = n.bit_length() - 1
        return (n + k, 1, n + k + 1)
    if family == "demux":
        k = n.bit_length() - 1
        return (k + 1, n, n + k)
    if family == "add":
        return (2 * n + 1, n + 1, 5 * n)
    if family == "sub":
        return (2 * n + 1, n + 1, 7 * n)
    if family == "cmp":
        return (2 * n, 3, 3 * n + 4)
    if family == "shift":
        w = 1 << n
        return (w + n, w, w * (3 * n - 2) + n + 2)
    if family == "moa":
        k = (n + 1).bit_length() - 1
        return (n, k, (1 << (k + 1)) * (k - 2) + (1 << k) - k + 3)
    k = 6 * n * n - 8 * n
    return (2 * n, 2 * n, k)


def _xnames(count):
    return tuple(f"x{i + 1}" for i in range(count))


def _gen_mux(n):
    k = n.bit_length() - 1
    inputs = _xnames(n + k)
    data = [Wire(inputs[i]) for i in range(n)]
    sel = [Wire(inputs[n + j]) for j in range(k)]
    gates = []
    inv = []
    for j in range(k):
        gates.append(Gate(f"ns{j + 1}", not_fn(), (sel[j],)))
        inv.append(Wire(f"ns{j + 1}"))
    terms = []
    for i in range(n):
        lits = [sel[j] if (i >> j) & 1 else inv[j] for j in range(k)]
        gates.append(Gate(f"a{i + 1}", and_fn(k + 1), tuple([data[i]] + lits)))
        terms.append(Wire(f"a{i + 1}"))
    gates.append(Gate("o", or_fn(n), tuple(terms)))
    return Circuit(f"mux-{n}", inputs, tuple(gates), (Output("y1", Wire("o")),))


def _gen_demux(n):
    k = n.bit_length() - 1
    inputs = _xnames(k + 1)
    data = Wire(inputs[0])
    sel = [Wire(inputs[1 + j]) for j in range(k)]
    gates = []
    inv = []
    for j in range(k):
        gates.append(Gate(f"ns{j + 1}", not_fn(), (sel[j],)))
        inv.append(Wire(f"ns{j + 1}"))
    outputs = []
    for i in range(n):
        lits = [sel[j] if (i >> j) & 1 else inv[j] for j in range(k)]
        gates.append(Gate(f"a{i + 1}", and_fn(k + 1), tuple([data] + lits)))
        outputs.append(Output(f"y{i + 1}", Wire(f"a{i + 1}")))
    return Circuit(f"demux-{n}", inputs, tuple(gates), tuple(outputs))


def _gen_add(n):
    inputs = _xnames(2 * n + 1)
    carry = Wire(inputs[2 * n])
    gates = []
    outputs = []
    for i in range(1, n + 1):
        a = Wire(inputs[i - 1])
        b = Wire(inputs[n + i - 1])
        gates.append(Gate(f"hx{i}", xor_fn(), (a, b)))
        gates.append(Gate(f"sx{i}", xor_fn(), (Wire(f"hx{i}"), carry)))
        gates.append(Gate(f"pa{i}", and_fn(), (a, b)))
        gates.append(Gate(f"ga{i}", and_fn(), (Wire(f"hx{i}"), carry)))
        gates.append(Gate(f"co{i}", or_fn(), (Wire(f"pa{i}"), Wire(f"ga{i}"))))
        outputs.append(Output(f"y{i}", Wire(f"sx{i}")))
        carry = Wire(f"co{i}")
    outputs.append(Output(f"y{n + 1}", carry))
    return Circuit(f"add-{n}", inputs, tuple(gates), tuple(outputs))


def _gen_sub(n):
    inputs = _xnames(2 * n + 1)
    borrow = Wire(inputs[2 * n])
    gates = []
    outputs = []
    for i in range(1, n + 1):
        a = Wire(inputs[i - 1])
        b = Wire(inputs[n + i - 1])
        gates.append(Gate(f"hx{i}", xor_fn(), (a, b)))
        gates.append(Gate(f"dx{i}", xor_fn(), (Wire(f"hx{i}"), borrow)))
        gates.append(Gate(f"na{i}", not_fn(), (a,)))
        gates.append(Gate(f"t{i}", and_fn(), (Wire(f"na{i}"), b)))
        gates.append(Gate(f"nh{i}", not_fn(), (Wire(f"hx{i}"),)))
        gates.append(Gate(f"u{i}", and_fn(), (Wire(f"nh{i}"), borrow)))
        gates.append(Gate(f"bo{i}", or_fn(), (Wire(f"t{i}"), Wire(f"u{i}"))))
        outputs.append(Output(f"y{i}", Wire(f"dx{i}")))
        borrow = Wire(f"bo{i}")
    outputs.append(Output(f"y{n + 1}", borrow))
    return Circuit(f"sub-{n}", inputs, tuple(gates), tuple(outputs))


def _gen_cmp(n):
    inputs = _xnames(2 * n)
    gates = []
    for i in range(1, n + 1):
        gates.append(Gate(f"e{i}", xnor_fn(),
                          (Wire(inputs[i - 1]), Wire(inputs[n + i - 1]))))
    gates.append(Gate("eq", and_fn(n), tuple(Wire(f"e{i}") for i in range(1, n + 1))))
    for i in range(1, n + 1):
        gates.append(Gate(f"nb{i}", not_fn(), (Wire(inputs[n + i - 1]),)))
    for i in range(1, n + 1):
        # a_i over b_i with all higher bits equal
        lits = [Wire(inputs[i - 1]), Wire(f"nb{i}")]
        lits += [Wire(f"e{j}") for j in range(i + 1, n + 1)]
        gates.append(Gate(f"g{i}", and_fn(len(lits)), tuple(lits)))
    gates.append(Gate("gt", or_fn(n), tuple(Wire(f"g{i}") for i in range(1, n + 1))))
    gates.append(Gate("egt", or_fn(), (Wire("eq"), Wire("gt"))))
    gates.append(Gate("lt", not_fn(), (Wire("egt"),)))
    outputs = (Output("y1", Wire("eq")), Output("y2", Wire("gt")),
               Output("y3", Wire("lt")))
    return Circuit(f"cmp-{n}", inputs, tuple(gates), outputs)


def _gen_shift(n):
    w = 1 << n
    inputs = _xnames(w + n)
    cur = [Wire(inputs[i]) for i in range(w)]
    gates = []
    for c in range(1, n + 1):
        s = Wire(inputs[w + c - 1])
        gates.append(Gate(f"ns{c}", not_fn(), (s,)))
        hold = Wire(f"ns{c}")
        d = 1 << (c - 1)
        nxt = []
        for i in range(w):
            if i + d < w:
                gates.append(Gate(f"h{c}_{i}", and_fn(), (hold, cur[i])))
                gates.append(Gate(f"t{c}_{i}", and_fn(), (s, cur[i + d])))
                gates.append(Gate(f"m{c}_{i}", or_fn(),
                                  (Wire(f"h{c}_{i}"), Wire(f"t{c}_{i}"))))
            else:
                # the shifted-in value is constant zero; the mux collapses
                gates.append(Gate(f"m{c}_{i}", and_fn(), (hold, cur[i])))
            nxt.append(Wire(f"m{c}_{i}"))
        cur = nxt
    outputs = tuple(Output(f"y{i + 1}", cur[i]) for i in range(w))
    return Circuit(f"shift-{n}", inputs, tuple(gates), tuple(outputs))


def _gen_moa(n):
    k = (n + 1).bit_length() - 1
    inputs = _xnames(n)
    gates = []
    bits = [Wire(inputs[0])]
    maxval = 1
    for step in range(2, n + 1):
        carry = Wire(inputs[step - 1])
        grows = maxval + 1 >= (1 << len(bits))
        new_bits = []
        for j, b in enumerate(bits):
            gates.append(Gate(f"s{step}_{j}", xor_fn(), (b, carry)))
            new_bits.append(Wire(f"s{step}_{j}"))
            last = j == len(bits) - 1
            if not last or grows:
                gates.append(Gate(f"c{step}_{j}", and_fn(), (b, carry)))
                carry = Wire(f"c{step}_{j}")
        if grows:
            new_bits.append(carry)
        bits = new_bits
        maxval += 1
    outputs = tuple(Output(f"y{j + 1}", bits[j]) for j in range(k))
    return Circuit(f"moa-{n}", inputs, tuple(gates), tuple(outputs))


def _gen_mul(n):
    inputs = _xnames(2 * n)
    a = [Wire(inputs[i]) for i in range(n)]
    b = [Wire(inputs[n + i]) for i in range(n)]
    gates = []
    pp = [[None] * n for _ in range(n)]
    for j in range(n):
        for i in range(n):
            gates.append(Gate(f"p{j}_{i}", and_fn(), (a[i], b[j])))
            pp[j][i] = Wire(f"p{j}_{i}")

    def half(tag, u, v):
        gates.append(Gate(f"s{tag}", xor_fn(), (u, v)))
        gates.append(Gate(f"c{tag}", and_fn(), (u, v)))
        return Wire(f"s{tag}"), Wire(f"c{tag}")

    def full(tag, u, v, w):
        gates.append(Gate(f"q{tag}", xor_fn(), (u, v)))
        gates.append(Gate(f"s{tag}", xor_fn(), (Wire(f"q{tag}"), w)))
        gates.append(Gate(f"d{tag}", and_fn(), (u, v)))
        gates.append(Gate(f"e{tag}", and_fn(), (Wire(f"q{tag}"), w)))
        gates.append(Gate(f"c{tag}", or_fn(), (Wire(f"d{tag}"), Wire(f"e{tag}"))))
        return Wire(f"s{tag}"), Wire(f"c{tag}")

    outputs = [Output("y1", pp[0][0])]
    sums = []
    carries = []
    for i in range(n - 1):
        s, c = half(f"1_{i}", pp[0][i + 1], pp[1][i])
        sums.append(s)
        carries.append(c)
    outputs.append(Output("y2", sums[0]))
    word = sums[1:] + [pp[1][n - 1]]
    for j in range(2, n):
        new_sums = []
        new_carries = []
        for i in range(n - 1):
            s, c = full(f"{j}_{i}", word[i], carries[i], pp[j][i])
            new_sums.append(s)
            new_carries.append(c)
        outputs.append(Output(f"y{j + 1}", new_sums[0]))
        word = new_sums[1:] + [pp[j][n - 1]]
        carries = new_carries
    ripple = None
    for i in range(n - 1):
        if i == 0:
            s, ripple = half(f"f_{i}", word[i], carries[i])
        else:
            s, ripple = full(f"f_{i}", word[i], carries[i], ripple)
        outputs.append(Output(f"y{n + i + 1}", s))
    outputs.append(Output(f"y{2 * n}", ripple))
    return Circuit(f"mul-{n}", inputs, tuple(gates), tuple(outputs))


_GENERATORS = {
    "mux": _gen_mux,
    "demux": _gen_demux,
    "add": _gen_add,
    "sub": _gen_sub,
    "cmp": _gen_cmp,
    "shift": _gen_shift,
    "moa": _gen_moa,
    "mul": _gen_mul,
}


def gen_alu(spec, n=None):
    """Generate one family member; accepts a FamilySpec or (family, n)."""
    if n is not None:
        spec = FamilySpec(spec, n)
    elif not isinstance(spec, FamilySpec):
        raise TypeError("pass a FamilySpec or a (family, n) pair")
    return _GENERATORS[spec.family](spec.n)


def truth_table_requirement(tables, m, name=None):
    """A requirement circuit realizing the given output truth tables.

    Tables are integers (or hex strings) whose bit r gives the output on
    input row r, first input most significant within the row index.  The
    realization is plain two-level logic; only the behavior matters.
    """
    if m < 1:
        raise ValueError("need at least one input")
    rows = 1 << m
    parsed = []
    for t in tables:
        value = int(t, 16) if isinstance(t, str) else int(t)
        if value < 0 or value >> rows:
            raise ValueError(f"table 0x{value:x} does not fit {m} inputs")
        parsed.append(value)
    if not parsed:
        raise ValueError("need at least one output table")
    inputs = _xnames(m)
    gates = []
    inverters = {}

    def inverted(i):
        if i not in inverters:
            gates.append(Gate(f"nx{i}", not_fn(), (Wire(inputs[i - 1]),)))
            inverters[i] = Wire(f"nx{i}")
        return inverters[i]

    outputs = []
    for j, value in enumerate(parsed, start=1):
        minterms = [r for r in range(rows) if (value >> r) & 1]
        if not minterms:
            gates.append(Gate(f"k{j}", const_fn(False), ()))
            outputs.append(Output(f"y{j}", Wire(f"k{j}")))
            continue
        if len(minterms) == rows:
            gates.append(Gate(f"k{j}", const_fn(True), ()))
            outputs.append(Output(f"y{j}", Wire(f"k{j}")))
            continue
        terms = []
        for r in minterms:
            lits = [Wire(inputs[i - 1]) if (r >> (m - i)) & 1 else inverted(i)
                    for i in range(1, m + 1)]
            if m == 1:
                terms.append(lits[0])
            else:
                gates.append(Gate(f"t{j}_{r}", and_fn(m), tuple(lits)))
                terms.append(Wire(f"t{j}_{r}"))
        if len(terms) == 1:
            outputs.append(Output(f"y{j}", terms[0]))
        else:
            gates.append(Gate(f"o{j}", or_fn(len(terms)), tuple(terms)))
            outputs.append(Output(f"y{j}", Wire(f"o{j}")))
    label = name or "tt-" + "-".join(f"{v:x}" for v in parsed)
    return Circuit(label, inputs, tuple(gates), tuple(outputs))


def load_74xxx(source):
    """Load a bundled 74-series netlist by name, or any BENCH file by path."""
    name = str(source)
    if name in BUNDLED_74XXX:
        text = resources.files("circsynth").joinpath(f"data/{name}.bench").read_text()
        return parse_bench(text, name=name)
    return load_bench(Path(source))
