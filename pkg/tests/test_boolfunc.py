"""Boolean function tables, bases, and commuting-pair analysis."""

import itertools
import random

import pytest

from circsynth import (
    BooleanFunction,
    Basis,
    and_fn,
    builtin_basis,
    builtin_basis_names,
    cmp_fn,
    commuting_input_pairs,
    const_fn,
    fredkin_fn,
    impl_fn,
    ite_fn,
    load_basis_file,
    nand_fn,
    nor_fn,
    not_fn,
    or_fn,
    toffoli_fn,
    xnor_fn,
    xor_fn,
)


def test_eval_matches_python_semantics():
    cases = [
        (and_fn(), lambda b: all(b)),
        (or_fn(), lambda b: any(b)),
        (xor_fn(), lambda b: sum(b) % 2 == 1),
        (xnor_fn(), lambda b: sum(b) % 2 == 0),
        (nand_fn(), lambda b: not all(b)),
        (nor_fn(), lambda b: not any(b)),
        (impl_fn(), lambda b: (not b[0]) or b[1]),
    ]
    for fn, ref in cases:
        for bits in itertools.product((False, True), repeat=fn.arity_in):
            assert fn.eval(bits) == (ref(bits),), fn.name


def test_not_and_constants():
    assert not_fn().eval((False,)) == (True,)
    assert not_fn().eval((True,)) == (False,)
    assert const_fn(True).eval(()) == (True,)
    assert const_fn(False).eval(()) == (False,)


def test_ite_selects_by_first_input():
    ite = ite_fn()
    for s, a, b in itertools.product((False, True), repeat=3):
        assert ite.eval((s, a, b)) == ((a if s else b),)


def test_cmp_outputs_min_then_max():
    cmp_ = cmp_fn()
    assert cmp_.arity_in == 2 and cmp_.arity_out == 2
    for a, b in itertools.product((False, True), repeat=2):
        assert cmp_.eval((a, b)) == (a and b, a or b)


def test_fredkin_swaps_under_control():
    fk = fredkin_fn()
    for c, x, y in itertools.product((False, True), repeat=3):
        want = (c, y, x) if c else (c, x, y)
        assert fk.eval((c, x, y)) == want


def test_toffoli_flips_target_when_both_controls_high():
    tf = toffoli_fn()
    for a, b, c in itertools.product((False, True), repeat=3):
        assert tf.eval((a, b, c)) == (a, b, c ^ (a and b))


def test_table_row_order_first_input_is_most_significant():
    # AND's table must read 0,0,0,1 over rows 00,01,10,11.
    assert and_fn().table == (0, 0, 0, 1)
    assert or_fn().table == (0, 1, 1, 1)
    assert xor_fn().table == (0, 1, 1, 0)


def test_hex_round_trip_random_functions():
    rng = random.Random(1311)
    for _ in range(50):
        m = rng.randint(0, 3)
        n = rng.randint(1, 3)
        table = tuple(rng.randrange(1 << n) for _ in range(1 << m))
        fn = BooleanFunction("f", m, n, table)
        again = BooleanFunction.from_hex("f", m, n, fn.to_hex())
        assert again.table == fn.table


def test_bad_tables_rejected():
    with pytest.raises(ValueError):
        BooleanFunction("short", 2, 1, (0, 1))
    with pytest.raises(ValueError):
        BooleanFunction("wide", 1, 1, (0, 2))
    with pytest.raises(ValueError):
        BooleanFunction("noout", 1, 0, (0, 0))


def test_eval_arity_checked():
    with pytest.raises(ValueError):
        and_fn().eval((True,))


def test_commuting_pairs_standard_functions():
    assert commuting_input_pairs(and_fn()) == [(1, 2)]
    assert commuting_input_pairs(or_fn()) == [(1, 2)]
    assert commuting_input_pairs(xor_fn()) == [(1, 2)]
    assert commuting_input_pairs(xnor_fn()) == [(1, 2)]
    assert commuting_input_pairs(impl_fn()) == []


def test_commuting_pairs_multi_output_gates():
    # Swapping the swap targets of a controlled swap permutes the output
    # tuple, so no pair commutes as ordered tuples.
    assert commuting_input_pairs(fredkin_fn()) == []
    # The two controls of a controlled-controlled-not do commute only as a
    # function; as an ordered output tuple outputs 1 and 2 trade places.
    assert commuting_input_pairs(toffoli_fn()) == []
    assert commuting_input_pairs(cmp_fn()) == [(1, 2)]


def test_commuting_pairs_verified_exhaustively():
    rng = random.Random(77)
    for _ in range(30):
        m = rng.randint(1, 3)
        n = rng.randint(1, 2)
        table = tuple(rng.randrange(1 << n) for _ in range(1 << m))
        fn = BooleanFunction("r", m, n, table)
        pairs = set(commuting_input_pairs(fn))
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                same = True
                for bits in itertools.product((False, True), repeat=m):
                    swapped = list(bits)
                    swapped[i - 1], swapped[j - 1] = swapped[j - 1], swapped[i - 1]
                    if fn.eval(bits) != fn.eval(tuple(swapped)):
                        same = False
                        break
                assert ((i, j) in pairs) == same


def test_builtin_basis_membership():
    std = builtin_basis("standard")
    assert [f.name for f in std.functions] == ["NOT", "AND", "OR", "XOR", "IMPL", "XNOR"]
    rev = builtin_basis("reversible")
    assert len(rev) == 2
    assert all(f.arity_in == 3 and f.arity_out == 3 for f in rev)
    comp = builtin_basis("comparator")
    assert len(comp) == 1
    assert len(builtin_basis("nand")) == 1
    ite = builtin_basis("ite")
    assert {f.name for f in ite} == {"ITE", "TRUE", "FALSE"}
    assert sorted(builtin_basis_names()) == builtin_basis_names()
    with pytest.raises(KeyError):
        builtin_basis("nope")


def test_selector_width_values():
    assert builtin_basis("reversible").selector_width == 1
    assert builtin_basis("standard").selector_width == 3
    assert builtin_basis("nand").selector_width == 0
    assert builtin_basis("ite").selector_width == 2


def test_basis_lookup_and_duplicates():
    std = builtin_basis("standard")
    assert std.function_named("XOR").table == xor_fn().table
    with pytest.raises(KeyError):
        std.function_named("MAJ")
    with pytest.raises(ValueError):
        Basis("dup", (and_fn(), and_fn()))


def test_basis_file_round_trip(tmp_path):
    path = tmp_path / "lib.txt"
    lines = []
    for fn in (nand_fn(), cmp_fn(), const_fn(True)):
        lines.append(f"{fn.name} {fn.arity_in} {fn.arity_out} {fn.to_hex()}")
    path.write_text("# custom library\n" + "\n".join(lines) + "\n")
    basis = load_basis_file(path)
    assert [f.name for f in basis.functions] == ["NAND", "CMP", "TRUE"]
    assert basis.function_named("CMP").table == cmp_fn().table
    assert basis.function_named("TRUE").eval(()) == (True,)
