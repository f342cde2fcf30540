"""Universal cells, multiplexers, fabrics, constraint families, miters."""

import itertools

import pytest

from circsynth import (
    Basis,
    Circuit,
    Gate,
    GateGraph,
    Output,
    Qbf2Session,
    and_fn,
    create_miter,
    encode_synthesis,
    equivalent_bruteforce,
    full_adder,
    impl_fn,
    not_fn,
    or_fn,
    solve_2qbf,
    builtin_basis,
    topology_of,
    verify,
    xor_fn,
)
from circsynth.encode import (
    add_cardinality,
    add_symmetry_breaking,
    add_uucp,
    build_fabric,
    build_multiplexer,
    invalid_code_clauses,
    selector_count,
)

from oracles import qbf_holds_under, selector_assignment


def _labeling_assignment(enc, labeling):
    """Selector assignment for a label miter from a name -> function map."""
    assignment = {}
    for cell in enc.cells:
        fn = labeling[cell["name"]]
        codes = [c for c, f in cell["valid"].items()
                 if f.table == fn.table and f.arity_in == fn.arity_in]
        assert codes, f"{fn.name} is not in the basis for {cell['name']}"
        code = codes[0]
        width = len(cell["sel"])
        for b, var in enumerate(cell["sel"]):
            assignment[var] = bool((code >> (width - 1 - b)) & 1)
    return assignment


def test_selector_count():
    assert selector_count(1) == 0
    assert selector_count(2) == 1
    assert selector_count(3) == 2
    assert selector_count(4) == 2
    assert selector_count(5) == 3
    with pytest.raises(ValueError):
        selector_count(0)


def test_multiplexer_single_wire_passes_through():
    g = GateGraph()
    d = g.var(1)
    assert build_multiplexer(g, [d], []) == d


def test_multiplexer_selector_arity_checked():
    g = GateGraph()
    data = [g.var(i) for i in range(1, 5)]
    with pytest.raises(ValueError):
        build_multiplexer(g, data, [g.var(10)])


def test_multiplexer_selects_by_code_msb_first():
    g = GateGraph()
    data = [g.var(i) for i in range(1, 5)]
    sels = [g.var(10), g.var(11)]
    out = build_multiplexer(g, data, sels)
    for code in range(4):
        for word in range(16):
            env = {10: bool(code & 2), 11: bool(code & 1)}
            for i in range(4):
                env[i + 1] = bool((word >> i) & 1)
            assert g.evaluate(out, env) == env[code + 1]


def test_multiplexer_exhaustive_eight_wide():
    g = GateGraph()
    data = [g.var(i) for i in range(1, 9)]
    sels = [g.var(20), g.var(21), g.var(22)]
    out = build_multiplexer(g, data, sels)
    for code in range(8):
        for probe in range(8):
            env = {20: bool(code & 4), 21: bool(code & 2), 22: bool(code & 1)}
            for i in range(8):
                env[i + 1] = i == probe
            assert g.evaluate(out, env) == (code == probe)


def test_multiplexer_dead_codes_yield_false():
    # Three data wires under two selectors: code 3 selects nothing.
    g = GateGraph()
    data = [g.var(i) for i in range(1, 4)]
    sels = [g.var(10), g.var(11)]
    out = build_multiplexer(g, data, sels)
    env = {1: True, 2: True, 3: True, 10: True, 11: True}
    assert g.evaluate(out, env) is False


def test_fabric_first_cell_sees_only_primary_inputs():
    fabric = build_fabric(1, ("a", "b", "cin"), ("s", "cout"), builtin_basis("standard"))
    cell_rows = [entries for sink, entries in fabric.rows if sink[0] == "cellin"]
    assert len(cell_rows) == 2  # standard basis cells have two input ports
    for entries in cell_rows:
        assert [src for src, _ in entries] == [("in", "a"), ("in", "b"), ("in", "cin")]


def test_fabric_later_cells_see_earlier_outputs():
    fabric = build_fabric(3, ("a", "b"), ("y",), builtin_basis("standard"))
    rows = {sink: entries for sink, entries in fabric.rows}
    third = [src for src, _ in rows[("cellin", 2, 0)]]
    assert third == [("in", "a"), ("in", "b"), ("cell", 0, 0), ("cell", 1, 0)]
    # No row ever lists the cell's own output or a later cell's output.
    for sink, entries in fabric.rows:
        if sink[0] != "cellin":
            continue
        for src, _ in entries:
            if src[0] == "cell":
                assert src[1] < sink[1]


def test_fabric_selector_variables_come_first():
    fabric = build_fabric(2, ("a", "b"), ("y",), builtin_basis("standard"))
    assert fabric.sel == [[1, 2, 3], [4, 5, 6]]
    row_ids = [v for _, entries in fabric.rows for _, v in entries]
    assert min(row_ids) == 7
    assert sorted(row_ids) == list(range(7, fabric.num_s + 1))


def test_fabric_output_rows_by_mode():
    pis = [("in", "a"), ("in", "b")]
    circuit_fab = build_fabric(2, ("a", "b"), ("y",), builtin_basis("standard"), mode="circuit")
    bf_fab = build_fabric(2, ("a", "b"), ("y",), builtin_basis("standard"), mode="boolean-function")
    crows = {sink: [s for s, _ in entries] for sink, entries in circuit_fab.rows}
    brows = {sink: [s for s, _ in entries] for sink, entries in bf_fab.rows}
    assert crows[("out", "y")] == pis + [("cell", 0, 0), ("cell", 1, 0)]
    assert brows[("out", "y")] == [("cell", 0, 0), ("cell", 1, 0)]


def test_network_fabric_balances_with_garbage_rows():
    basis = builtin_basis("reversible")  # cells are 3-in/3-out
    fabric = build_fabric(2, ("a", "b", "c"), ("y",), basis, mode="network",
                          ancilla=(False, True))
    # inputs 3 + ancillae 2 + cell outs 6 = cell ins 6 + outputs 1 + garbage.
    assert fabric.garbage == 4
    garbage_rows = [sink for sink, _ in fabric.rows if sink[0] == "garbage"]
    assert len(garbage_rows) == 4
    anc_sources = {src for src in fabric.cols if src[0] == "anc"}
    assert anc_sources == {("anc", 0), ("anc", 1)}


def test_network_fabric_rejects_impossible_balance():
    with pytest.raises(ValueError, match="balance"):
        build_fabric(1, ("a",), ("y1", "y2", "y3", "y4", "y5"), builtin_basis("reversible"),
                     mode="network")


def test_ancilla_requires_network_mode():
    with pytest.raises(ValueError, match="network"):
        build_fabric(1, ("a", "b"), ("y",), builtin_basis("standard"), ancilla=(False,))


def test_invalid_code_clauses_block_exactly_the_gap():
    fabric = build_fabric(2, ("a", "b"), ("y",), builtin_basis("standard"))
    clauses = invalid_code_clauses(fabric)
    # Six functions under three selector bits leave codes 6 and 7 unused.
    assert len(clauses) == 4
    assert all(len(cl) == 3 for cl in clauses)
    hom = build_fabric(2, ("a", "b", "c"), ("p", "q", "r"), builtin_basis("reversible"),
                       mode="network")
    assert invalid_code_clauses(hom) == []


def test_cardinality_fanout_rules_differ_by_mode():
    def amo_on_input_column(fabric):
        col = [v for _, v in fabric.cols[("in", "a")]]
        clauses = set(add_cardinality(fabric))
        return any((-col[i], -col[j]) in clauses
                   for i in range(len(col)) for j in range(i + 1, len(col)))

    free = build_fabric(2, ("a", "b"), ("y",), builtin_basis("standard"), mode="circuit")
    assert not amo_on_input_column(free)
    linear = build_fabric(1, ("a", "b", "c"), ("p", "q", "r"), builtin_basis("reversible"),
                          mode="network")
    assert amo_on_input_column(linear)


def test_cardinality_every_row_gets_at_most_one():
    fabric = build_fabric(2, ("a", "b"), ("y",), builtin_basis("standard"))
    clauses = set(add_cardinality(fabric))
    for sink, entries in fabric.rows:
        vars_ = [v for _, v in entries]
        for i in range(len(vars_)):
            for j in range(i + 1, len(vars_)):
                assert (-vars_[i], -vars_[j]) in clauses


def test_uucp_silent_for_homogeneous_basis():
    hom = build_fabric(2, ("a", "b", "c"), ("p", "q", "r"), builtin_basis("reversible"),
                       mode="network")
    assert add_uucp(hom) == []
    single = build_fabric(2, ("a", "b"), ("y",), builtin_basis("nand"))
    assert add_uucp(single) == []


def test_uucp_active_for_mixed_arity_basis():
    fabric = build_fabric(1, ("a", "b"), ("y",), builtin_basis("standard"))
    assert len(add_uucp(fabric)) > 0


def test_uucp_lets_unary_function_win():
    # One cell, basis {NOT, AND}: only NOT can realize an inverter, and its
    # second input port must stay unwired.
    basis = Basis("notand", (not_fn(), and_fn()))
    psi = Circuit("inv", ("x",), (Gate("g1", not_fn(), ("x",)),),
                  (Output("y", "g1"),))
    enc = encode_synthesis(basis, psi, 1)
    res = solve_2qbf(enc.qbf)
    assert res.status == "sat"
    designed = enc.decode_circuit(res.assignment)
    assert [g.fn.name for g in designed.gates] == ["NOT"]
    assert len(designed.gates[0].fanin) == 1
    assert verify(designed, psi)


def test_symmetry_breaking_empty_without_commuting_pairs():
    lopsided = Basis("implonly", (impl_fn(),))
    fabric = build_fabric(2, ("a", "b"), ("y",), lopsided)
    assert add_symmetry_breaking(fabric) == []
    fabric2 = build_fabric(1, ("a", "b"), ("y",), builtin_basis("standard"))
    assert len(add_symmetry_breaking(fabric2)) > 0


def _adder_wired(orient_second):
    """The textbook adder on fabric cell names; orient_second flips XOR/AND feeds."""
    g2_in = ("cin", "g1") if orient_second else ("g1", "cin")
    g4_in = ("cin", "g1") if orient_second else ("g1", "cin")
    gates = (
        Gate("g1", xor_fn(), ("a", "b")),
        Gate("g2", xor_fn(), g2_in),
        Gate("g3", and_fn(), ("a", "b")),
        Gate("g4", and_fn(), g4_in),
        Gate("g5", or_fn(), ("g3", "g4")),
    )
    return Circuit("fa-wired", ("a", "b", "cin"), gates,
                   (Output("s", "g2"), Output("cout", "g5")))


def test_symmetry_breaking_keeps_one_orientation():
    psi = full_adder()
    broken = encode_synthesis(builtin_basis("standard"), psi, 5, symmetry=True)
    free = encode_synthesis(builtin_basis("standard"), psi, 5, symmetry=False)
    canonical = _adder_wired(True)
    flipped = _adder_wired(False)
    # The unrestricted encoding accepts both orientations.
    assert qbf_holds_under(free.qbf, selector_assignment(free, canonical))
    assert qbf_holds_under(free.qbf, selector_assignment(free, flipped))
    # Symmetry breaking keeps the one whose commuting feeds are ordered by
    # candidate position and rejects its mirror image.
    assert qbf_holds_under(broken.qbf, selector_assignment(broken, canonical))
    assert not qbf_holds_under(broken.qbf, selector_assignment(broken, flipped))


def test_create_miter_full_adder_shape():
    psi = full_adder()
    enc = create_miter(builtin_basis("standard"), topology_of(psi), psi)
    assert len(enc.cells) == 5
    assert enc.num_s == 15
    assert list(enc.qbf.x_vars) == [16, 17, 18]
    assert enc.x_names == ("a", "b", "cin")


def test_create_miter_identity_labeling_holds():
    psi = full_adder()
    enc = create_miter(builtin_basis("standard"), topology_of(psi), psi)
    identity = {g.name: g.fn for g in psi.gates}
    assert qbf_holds_under(enc.qbf, _labeling_assignment(enc, identity))
    wrong = dict(identity)
    wrong["n5"] = and_fn()
    assert not qbf_holds_under(enc.qbf, _labeling_assignment(enc, wrong))


def test_create_miter_filters_by_arity():
    # A one-input node can only carry one-input functions; with the standard
    # basis the inverter topology admits exactly NOT.
    psi = Circuit("inv", ("x",), (Gate("g1", not_fn(), ("x",)),),
                  (Output("y", "g1"),))
    enc = create_miter(builtin_basis("standard"), topology_of(psi), psi)
    assert [fn.name for fn in enc.cells[0]["valid"].values()] == ["NOT"]
    session = Qbf2Session(enc.qbf)
    found = [enc.decode_labeling(a) for a in session.enumerate_witnesses()]
    assert session.last_result.status == "unsat"
    assert len(found) == 1
    assert found[0]["g1"].name == "NOT"


def test_decode_circuit_reconstructs_hand_wiring():
    psi = full_adder()
    enc = encode_synthesis(builtin_basis("standard"), psi, 5)
    hand = _adder_wired(True)
    assignment = selector_assignment(enc, hand)
    designed = enc.decode_circuit(assignment)
    assert equivalent_bruteforce(designed, psi)
    assert enc.cell_function_names(assignment) == ["AND", "AND", "OR", "XOR", "XOR"]


def test_describe_names_every_selector():
    psi = full_adder()
    label = create_miter(builtin_basis("standard"), topology_of(psi), psi)
    text = label.describe()
    assert "|S|=15" in text and "|X|=3" in text
    assert "cell n1" in text
    synth = encode_synthesis(builtin_basis("standard"), psi, 2)
    text2 = synth.describe()
    assert "g1.in1 <- in:a" in text2
    assert "out:cout" in text2


def test_encode_synthesis_layout_and_side_clauses():
    psi = full_adder()
    enc = encode_synthesis(builtin_basis("standard"), psi, 2)
    q = enc.qbf
    q.check_ids()
    assert list(q.s_vars) == list(range(1, enc.num_s + 1))
    assert list(q.x_vars) == list(range(enc.num_s + 1, enc.num_s + 4))
    assert q.s_clauses, "well-formedness clauses belong on the S side"
    # Every side clause speaks only about selector-matrix variables.
    for cl in q.s_clauses:
        assert all(1 <= abs(l) <= enc.num_s for l in cl)


def test_encode_synthesis_rejects_bad_arguments():
    psi = full_adder()
    with pytest.raises(ValueError):
        encode_synthesis(builtin_basis("standard"), psi, 0)
    with pytest.raises(ValueError):
        encode_synthesis(builtin_basis("standard"), psi, 2, mode="fancy")
    with pytest.raises(ValueError):
        encode_synthesis(builtin_basis("standard"), psi, 2, ancilla=(True,))
