"""Hand-built reference circuits used by the tests and benchmarks."""

from .boolfunc import and_fn, cmp_fn, impl_fn, not_fn, or_fn, xnor_fn, xor_fn
from .circuit import Circuit, Gate, Output, Wire


def full_adder():
    """Textbook five-gate full adder: two XORs, two ANDs, one OR."""
    gates = (
        Gate("n1", xor_fn(), ("a", "b")),
        Gate("n2", xor_fn(), ("n1", "cin")),
        Gate("n3", and_fn(), ("a", "b")),
        Gate("n4", and_fn(), ("n1", "cin")),
        Gate("n5", or_fn(), ("n3", "n4")),
    )
    return Circuit("full-adder", ("a", "b", "cin"), gates,
                   (Output("s", "n2"), Output("cout", "n5")))


def full_adder_alternative():
    """The same five-node wiring relabeled XNOR/XNOR/OR/OR/AND.

    Computes the same function as full_adder; the pair demonstrates that a
    topology can carry more than one correct labeling.
    """
    gates = (
        Gate("n1", xnor_fn(), ("a", "b")),
        Gate("n2", xnor_fn(), ("n1", "cin")),
        Gate("n3", or_fn(), ("a", "b")),
        Gate("n4", or_fn(), ("n1", "cin")),
        Gate("n5", and_fn(), ("n3", "n4")),
    )
    return Circuit("full-adder-alt", ("a", "b", "cin"), gates,
                   (Output("s", "n2"), Output("cout", "n5")))


def full_subtractor():
    """Seven-gate full subtractor: difference and borrow-out."""
    gates = (
        Gate("n1", xor_fn(), ("a", "b")),
        Gate("n2", xor_fn(), ("n1", "bin")),
        Gate("n3", not_fn(), ("a",)),
        Gate("n4", and_fn(), ("n3", "b")),
        Gate("n5", not_fn(), ("n1",)),
        Gate("n6", and_fn(), ("n5", "bin")),
        Gate("n7", or_fn(), ("n4", "n6")),
    )
    return Circuit("full-subtractor", ("a", "b", "bin"), gates,
                   (Output("d", "n2"), Output("bout", "n7")))


def compact_subtractor():
    """Five-gate full subtractor using an implication for the borrow."""
    gates = (
        Gate("n1", xor_fn(), ("a", "b")),
        Gate("n2", xor_fn(), ("n1", "bin")),
        Gate("n3", impl_fn(), ("a", "b")),
        Gate("n4", or_fn(), ("n1", "bin")),
        Gate("n5", and_fn(), ("n3", "n4")),
    )
    return Circuit("compact-subtractor", ("a", "b", "bin"), gates,
                   (Output("d", "n2"), Output("bout", "n5")))


def sorting_network(n):
    """Bitonic comparator network sorting n wires ascending (zeros first).

    Output y1 carries the minimum.  Works for any n, not just powers of two;
    each comparator is one two-output min/max cell.
    """
    if n < 1:
        raise ValueError("cannot sort fewer than one wire")
    wires = [Wire(f"x{i + 1}") for i in range(n)]
    gates = []

    def compare(lo_pos, hi_pos):
        # afterwards lo_pos carries the smaller value
        name = f"c{len(gates) + 1}"
        gates.append(Gate(name, cmp_fn(), (wires[lo_pos], wires[hi_pos])))
        wires[lo_pos] = Wire(name, 0)
        wires[hi_pos] = Wire(name, 1)

    def merge(lo, cnt, up):
        if cnt <= 1:
            return
        m = 1
        while m < cnt:
            m <<= 1
        m >>= 1
        for i in range(lo, lo + cnt - m):
            if up:
                compare(i, i + m)
            else:
                compare(i + m, i)
        merge(lo, m, up)
        merge(lo + m, cnt - m, up)

    def sort(lo, cnt, up):
        if cnt <= 1:
            return
        m = cnt // 2
        sort(lo, m, not up)
        sort(lo + m, cnt - m, up)
        merge(lo, cnt, up)

    sort(0, n, True)
    outputs = tuple(Output(f"y{i + 1}", wires[i]) for i in range(n))
    return Circuit(f"sort{n}", tuple(f"x{i + 1}" for i in range(n)),
                   tuple(gates), outputs)
