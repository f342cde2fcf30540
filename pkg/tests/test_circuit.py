"""Circuit structure, evaluation, truth tables, topologies, equivalence."""

import numpy as np
import pytest

from circsynth import (
    Circuit,
    Gate,
    Output,
    Topology,
    Wire,
    and_fn,
    equivalent_bruteforce,
    full_adder,
    full_adder_alternative,
    full_subtractor,
    not_fn,
    or_fn,
    topology_of,
    xor_fn,
)


def _and_circuit():
    return Circuit("just-and", ("a", "b"),
                   (Gate("g1", and_fn(), (Wire("a"), Wire("b"))),),
                   (Output("y", Wire("g1")),))


def _or_circuit():
    return Circuit("just-or", ("a", "b"),
                   (Gate("g1", or_fn(), (Wire("a"), Wire("b"))),),
                   (Output("y", Wire("g1")),))


def test_full_adder_evaluates_binary_addition():
    fa = full_adder()
    out = fa.evaluate({"a": True, "b": True, "cin": False})
    assert out == {"s": False, "cout": True}
    out = fa.evaluate({"a": False, "b": False, "cin": False})
    assert out == {"s": False, "cout": False}


def test_full_subtractor_borrows():
    fs = full_subtractor()
    out = fs.evaluate({"a": False, "b": True, "bin": False})
    assert out == {"d": True, "bout": True}


def test_evaluate_all_rows_against_arithmetic():
    fa = full_adder()
    for row in range(8):
        a, b, cin = (row >> 2) & 1, (row >> 1) & 1, row & 1
        out = fa.evaluate({"a": a, "b": b, "cin": cin})
        total = a + b + cin
        assert out["s"] == bool(total & 1)
        assert out["cout"] == bool(total >> 1)


def test_string_fanin_shorthand():
    c = Circuit("shorthand", ("aa", "bb"),
                (Gate("g1", and_fn(), ("aa", "bb")),),
                (Output("y", "g1"),))
    assert c.gates[0].fanin == (Wire("aa"), Wire("bb"))
    assert c.evaluate({"aa": True, "bb": True}) == {"y": True}


def test_truth_table_and_gate():
    table = _and_circuit().truth_table()
    assert table.shape == (4, 1)
    assert list(table[:, 0]) == [False, False, False, True]


def test_truth_table_row_convention_first_input_msb():
    c = Circuit("pass1", ("p", "q"), (),
                (Output("y", Wire("p")),))
    table = c.truth_table()
    # Input p is the most significant row bit, so its column is 0,0,1,1.
    assert list(table[:, 0]) == [False, False, True, True]


def test_truth_table_multi_output_order():
    fa = full_adder()
    table = fa.truth_table()
    assert table.shape == (8, 2)
    for row in range(8):
        a, b, cin = (row >> 2) & 1, (row >> 1) & 1, row & 1
        total = a + b + cin
        assert table[row, 0] == bool(total & 1)
        assert table[row, 1] == bool(total >> 1)


def test_validate_reports_problems():
    assert full_adder().validate() == []
    dup = Circuit("dup", ("a", "a"), (), (Output("y", Wire("a")),))
    assert any("duplicate input" in p for p in dup.validate())
    missing = Circuit("missing", ("a",),
                      (Gate("g1", and_fn(), (Wire("a"), Wire("zz"))),),
                      (Output("y", Wire("g1")),))
    assert any("undefined" in p for p in missing.validate())
    cyc = Circuit("cyc", ("a",),
                  (Gate("g1", and_fn(), (Wire("a"), Wire("g2"))),
                   Gate("g2", and_fn(), (Wire("a"), Wire("g1"))),),
                  (Output("y", Wire("g2")),))
    assert any("cycle" in p for p in cyc.validate())
    redef = Circuit("redef", ("a",),
                    (Gate("a", not_fn(), (Wire("a"),)),),
                    (Output("y", Wire("a", 0)),))
    assert any("twice" in p for p in redef.validate())


def test_validate_checks_arity_and_ports():
    shortfan = Circuit("shortfan", ("a",),
                       (Gate("g1", and_fn(), (Wire("a"),)),),
                       (Output("y", Wire("g1")),))
    assert any("fanins" in p for p in shortfan.validate())
    badport = Circuit("badport", ("a",),
                      (Gate("g1", not_fn(), (Wire("a"),)),),
                      (Output("y", Wire("g1", 3)),))
    assert any("missing port" in p for p in badport.validate())


def test_evaluate_rejects_cyclic():
    cyc = Circuit("cyc", ("a",),
                  (Gate("g1", and_fn(), (Wire("a"), Wire("g2"))),
                   Gate("g2", and_fn(), (Wire("a"), Wire("g1"))),),
                  (Output("y", Wire("g2")),))
    with pytest.raises(ValueError):
        cyc.evaluate({"a": True})


def test_topology_erases_labels_and_keeps_wiring():
    fa = full_adder()
    topo = topology_of(fa)
    assert len(topo.nodes) == 5
    assert topo.inputs == fa.inputs
    assert [n.name for n in topo.nodes] == [g.name for g in fa.gates]
    assert [n.fanin for n in topo.nodes] == [g.fanin for g in fa.gates]


def test_topology_relabel_round_trip():
    fa = full_adder()
    topo = topology_of(fa)
    labeling = {g.name: g.fn for g in fa.gates}
    again = topo.relabel(labeling)
    assert equivalent_bruteforce(again, fa)
    # Idempotence: erasing the relabeled circuit gives the same topology.
    assert topology_of(again).nodes == topo.nodes


def test_used_ports_counts_references():
    fa = full_adder()
    used = topology_of(fa).used_ports()
    assert set(used.values()) == {1}


def test_equivalent_bruteforce_accepts_alternative_adder():
    assert equivalent_bruteforce(full_adder(), full_adder_alternative())


def test_equivalent_bruteforce_rejects_different_function():
    a = _and_circuit()
    o = _or_circuit()
    assert not equivalent_bruteforce(a, o)


def test_equivalent_bruteforce_interface_mismatch_raises():
    a = _and_circuit()
    other = Circuit("renamed", ("a", "c"),
                    (Gate("g1", and_fn(), (Wire("a"), Wire("c"))),),
                    (Output("y", Wire("g1")),))
    with pytest.raises(ValueError):
        equivalent_bruteforce(a, other)


def test_equivalence_is_name_based_not_order_based():
    left = Circuit("l", ("a", "b"),
                   (Gate("g1", xor_fn(), (Wire("a"), Wire("b"))),),
                   (Output("y", Wire("g1")),))
    right = Circuit("r", ("b", "a"),
                    (Gate("g1", xor_fn(), (Wire("a"), Wire("b"))),),
                    (Output("y", Wire("g1")),))
    assert equivalent_bruteforce(left, right)


def test_multi_output_wires_address_ports():
    from circsynth import cmp_fn

    c = Circuit("sorter2", ("a", "b"),
                (Gate("g1", cmp_fn(), (Wire("a"), Wire("b"))),),
                (Output("lo", Wire("g1", 0)), Output("hi", Wire("g1", 1))))
    assert c.evaluate({"a": True, "b": False}) == {"lo": False, "hi": True}
    table = c.truth_table()
    assert list(table[:, 0]) == [False, False, False, True]
    assert list(table[:, 1]) == [False, True, True, True]
