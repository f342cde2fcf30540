"""Boolean functions with explicit truth tables, and ordered gate libraries (bases)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _row_of_inputs(args):
    """Row index for an input vector; input 1 is the most significant bit."""
    r = 0
    for a in args:
        r = (r << 1) | (1 if a else 0)
    return r


@dataclass(frozen=True)
class BooleanFunction:
    """An m-input, n-output boolean function given by its full truth table.

    ``table`` has one entry per input row (2**arity_in rows).  Row index r
    encodes the inputs with input 1 as the most significant bit.  Each entry
    is an integer whose bit j is the value of output j+1.
    """

    name: str
    arity_in: int
    arity_out: int
    table: tuple

    def __post_init__(self):
        if self.arity_in < 0 or self.arity_out < 1:
            raise ValueError(f"bad arities for {self.name}: {self.arity_in}->{self.arity_out}")
        if len(self.table) != 1 << self.arity_in:
            raise ValueError(f"{self.name}: table has {len(self.table)} rows, expected {1 << self.arity_in}")
        lim = 1 << self.arity_out
        if any(not (0 <= row < lim) for row in self.table):
            raise ValueError(f"{self.name}: table entry out of range for {self.arity_out} outputs")

    def eval(self, args):
        """Evaluate on a sequence of arity_in booleans; returns a tuple of arity_out bools."""
        if len(args) != self.arity_in:
            raise ValueError(f"{self.name} expects {self.arity_in} inputs, got {len(args)}")
        row = self.table[_row_of_inputs(args)]
        return tuple(bool((row >> j) & 1) for j in range(self.arity_out))

    def output_column(self, j):
        """All 2**arity_in values of output j (0-based) as a numpy bool array."""
        col = np.fromiter(((row >> j) & 1 for row in self.table), dtype=np.uint8, count=len(self.table))
        return col.astype(bool)

    def to_hex(self):
        """Pack the table into a hex string: output column j occupies bits [j*2**m, (j+1)*2**m)."""
        m = self.arity_in
        value = 0
        for j in range(self.arity_out):
            for r, row in enumerate(self.table):
                if (row >> j) & 1:
                    value |= 1 << (j * (1 << m) + r)
        digits = max(1, (self.arity_out * (1 << m) + 3) // 4)
        return f"{value:0{digits}x}"

    @staticmethod
    def from_hex(name, arity_in, arity_out, hex_str):
        value = int(hex_str, 16)
        rows = 1 << arity_in
        if value >= 1 << (arity_out * rows):
            raise ValueError(f"{name}: hex table too wide for {arity_in}->{arity_out}")
        table = []
        for r in range(rows):
            entry = 0
            for j in range(arity_out):
                entry |= ((value >> (j * rows + r)) & 1) << j
            table.append(entry)
        return BooleanFunction(name, arity_in, arity_out, tuple(table))

    def is_symmetric_in(self, i, j):
        """True if swapping inputs i and j (1-based) never changes the output tuple."""
        m = self.arity_in
        bi, bj = m - i, m - j  # bit positions inside the row index
        for r in range(1 << m):
            vi, vj = (r >> bi) & 1, (r >> bj) & 1
            if vi == vj:
                continue
            swapped = r ^ (1 << bi) ^ (1 << bj)
            if self.table[r] != self.table[swapped]:
                return False
        return True


def commuting_input_pairs(fn):
    """All 1-based pairs (i, j), i < j, in which fn's inputs commute."""
    pairs = []
    for i in range(1, fn.arity_in + 1):
        for j in range(i + 1, fn.arity_in + 1):
            if fn.is_symmetric_in(i, j):
                pairs.append((i, j))
    return pairs


def _tab(m, out_fn):
    """Build a single-output table from a predicate over input tuples."""
    rows = []
    for r in range(1 << m):
        bits = tuple((r >> (m - 1 - i)) & 1 for i in range(m))
        rows.append(1 if out_fn(bits) else 0)
    return tuple(rows)


def _tab_multi(m, out_fn):
    rows = []
    for r in range(1 << m):
        bits = tuple((r >> (m - 1 - i)) & 1 for i in range(m))
        outs = out_fn(bits)
        rows.append(sum(b << j for j, b in enumerate(outs)))
    return tuple(rows)


def not_fn():
    return BooleanFunction("NOT", 1, 1, _tab(1, lambda b: not b[0]))


def buf_fn():
    return BooleanFunction("BUF", 1, 1, _tab(1, lambda b: b[0]))


def and_fn(k=2):
    if k == 1:
        return buf_fn()
    return BooleanFunction("AND", k, 1, _tab(k, lambda b: all(b)))


def or_fn(k=2):
    if k == 1:
        return buf_fn()
    return BooleanFunction("OR", k, 1, _tab(k, lambda b: any(b)))


def nand_fn(k=2):
    if k == 1:
        return not_fn()
    return BooleanFunction("NAND", k, 1, _tab(k, lambda b: not all(b)))


def nor_fn(k=2):
    if k == 1:
        return not_fn()
    return BooleanFunction("NOR", k, 1, _tab(k, lambda b: not any(b)))


def xor_fn(k=2):
    return BooleanFunction("XOR", k, 1, _tab(k, lambda b: sum(b) % 2 == 1))


def xnor_fn(k=2):
    return BooleanFunction("XNOR", k, 1, _tab(k, lambda b: sum(b) % 2 == 0))


def impl_fn():
    return BooleanFunction("IMPL", 2, 1, _tab(2, lambda b: (not b[0]) or b[1]))


def ite_fn():
    return BooleanFunction("ITE", 3, 1, _tab(3, lambda b: b[1] if b[0] else b[2]))


def const_fn(value):
    return BooleanFunction("TRUE" if value else "FALSE", 0, 1, (1 if value else 0,))


def cmp_fn():
    """Two-input comparator: outputs (min, max)."""
    return BooleanFunction("CMP", 2, 2, _tab_multi(2, lambda b: (b[0] and b[1], b[0] or b[1])))


def fredkin_fn():
    """Controlled swap: (c, x, y) -> (c, x, y) if c is 0 else (c, y, x)."""

    def f(b):
        c, x, y = b
        return (c, y if c else x, x if c else y)

    return BooleanFunction("FREDKIN", 3, 3, _tab_multi(3, f))


def toffoli_fn():
    """Controlled-controlled not: (a, b, c) -> (a, b, c xor (a and b))."""

    def f(b):
        a, bb, c = b
        return (a, bb, c ^ (a & bb))

    return BooleanFunction("TOFFOLI", 3, 3, _tab_multi(3, f))


@dataclass(frozen=True)
class Basis:
    """An ordered library of component functions; order fixes selector codes."""

    name: str
    functions: tuple

    def __post_init__(self):
        if not self.functions:
            raise ValueError("a basis needs at least one function")
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate function names in basis {self.name}: {names}")

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    @property
    def selector_width(self):
        """Selector bits per universal cell: ceil(log2 |B|), 0 for a one-function basis."""
        if len(self.functions) <= 1:
            return 0
        return math.ceil(math.log2(len(self.functions)))

    @property
    def max_arity_in(self):
        return max(f.arity_in for f in self.functions)

    @property
    def max_arity_out(self):
        return max(f.arity_out for f in self.functions)

    def function_named(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(f"no function {name!r} in basis {self.name}")


_BUILTIN_BASES = {
    "standard": lambda: Basis("standard", (not_fn(), and_fn(), or_fn(), xor_fn(), impl_fn(), xnor_fn())),
    "reversible": lambda: Basis("reversible", (fredkin_fn(), toffoli_fn())),
    "comparator": lambda: Basis("comparator", (cmp_fn(),)),
    "ite": lambda: Basis("ite", (ite_fn(), const_fn(True), const_fn(False))),
    "nand": lambda: Basis("nand", (nand_fn(),)),
    "nor": lambda: Basis("nor", (nor_fn(),)),
}


def builtin_basis(name):
    try:
        return _BUILTIN_BASES[name]()
    except KeyError:
        raise KeyError(f"unknown builtin basis {name!r}; have {sorted(_BUILTIN_BASES)}") from None


def builtin_basis_names():
    return sorted(_BUILTIN_BASES)


def load_basis_file(path, name=None):
    """Read a basis from a text file of lines ``name arity_in arity_out hex-table``.

    Blank lines and ``#`` comments are skipped.  Function order in the file is
    the selector-code order.
    """
    functions = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'name m n hex', got {raw!r}")
            fname, m_s, n_s, hex_s = parts
            functions.append(BooleanFunction.from_hex(fname, int(m_s), int(n_s), hex_s))
    if not functions:
        raise ValueError(f"{path}: no functions defined")
    import os

    return Basis(name or os.path.splitext(os.path.basename(path))[0], tuple(functions))
