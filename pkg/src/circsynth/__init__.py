"""Circuit synthesis and design-space exploration over a SAT core.

The package reduces exact synthesis questions (is there a k-component
realization of a requirement over a component library, and what is the
smallest one) to exists-forall formulas decided by expanding the universal
inputs over an embedded CDCL solver.
"""

from .bench import load_bench, parse_bench, save_bench, write_bench
from .benchgen import (
    ALU4_RANGE,
    BUNDLED_74XXX,
    FAMILIES,
    FamilySpec,
    expected_counts,
    gen_alu,
    load_74xxx,
    truth_table_requirement,
    validate_family,
)
from .boolfunc import (
    Basis,
    BooleanFunction,
    and_fn,
    buf_fn,
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
from .circuit import (
    Circuit,
    Gate,
    Output,
    TopoNode,
    Topology,
    Wire,
    equivalent_bruteforce,
    topology_of,
)
from .encode import (
    MODES,
    Fabric,
    MiterEncoding,
    add_cardinality,
    add_symmetry_breaking,
    add_uucp,
    build_fabric,
    create_miter,
    encode_synthesis,
)
from .formula import (
    CNF,
    QBF2,
    GateGraph,
    eval_qbf_recursive,
    expand_universal,
    parse_dimacs,
    parse_qdimacs,
    qbf_to_qdimacs,
    tseitin,
)
from .refcircuits import (
    compact_subtractor,
    full_adder,
    full_adder_alternative,
    full_subtractor,
    sorting_network,
)
from .sat import SatProblem, SatResult, check_model, jit_enabled, solve_cnf
from .solve import Qbf2Session, QbfResult, solve_2qbf
from .synth import (
    EnumerationResult,
    ExhaustiveResult,
    LabelCountResult,
    LabelingResult,
    SizeBounds,
    SynthesisConfig,
    SynthesisResult,
    VerifyResult,
    canonical_key,
    commutation_equivalent,
    default_upper_bound,
    derived_basis,
    enumerate_solutions,
    exhaustive_search,
    label_count,
    label_select,
    reconstruct_circuit,
    synthesize,
    verify,
    wire_solution,
    write_ledger,
)

__version__ = "1.0.0"

__all__ = [
    "ALU4_RANGE",
    "BUNDLED_74XXX",
    "Basis",
    "BooleanFunction",
    "CNF",
    "Circuit",
    "EnumerationResult",
    "ExhaustiveResult",
    "FAMILIES",
    "Fabric",
    "FamilySpec",
    "Gate",
    "GateGraph",
    "LabelCountResult",
    "LabelingResult",
    "MiterEncoding",
    "MODES",
    "Output",
    "QBF2",
    "QbfResult",
    "Qbf2Session",
    "SatProblem",
    "SatResult",
    "SizeBounds",
    "SynthesisConfig",
    "SynthesisResult",
    "TopoNode",
    "Topology",
    "VerifyResult",
    "Wire",
    "add_cardinality",
    "add_symmetry_breaking",
    "add_uucp",
    "and_fn",
    "buf_fn",
    "build_fabric",
    "builtin_basis",
    "builtin_basis_names",
    "canonical_key",
    "check_model",
    "cmp_fn",
    "commutation_equivalent",
    "commuting_input_pairs",
    "compact_subtractor",
    "const_fn",
    "create_miter",
    "default_upper_bound",
    "derived_basis",
    "encode_synthesis",
    "enumerate_solutions",
    "equivalent_bruteforce",
    "eval_qbf_recursive",
    "exhaustive_search",
    "expand_universal",
    "expected_counts",
    "fredkin_fn",
    "full_adder",
    "full_adder_alternative",
    "full_subtractor",
    "gen_alu",
    "impl_fn",
    "ite_fn",
    "jit_enabled",
    "label_count",
    "label_select",
    "load_74xxx",
    "load_basis_file",
    "load_bench",
    "nand_fn",
    "nor_fn",
    "not_fn",
    "or_fn",
    "parse_bench",
    "parse_dimacs",
    "parse_qdimacs",
    "qbf_to_qdimacs",
    "reconstruct_circuit",
    "save_bench",
    "solve_2qbf",
    "solve_cnf",
    "sorting_network",
    "synthesize",
    "toffoli_fn",
    "topology_of",
    "truth_table_requirement",
    "tseitin",
    "validate_family",
    "verify",
    "wire_solution",
    "write_bench",
    "write_ledger",
    "xnor_fn",
    "xor_fn",
]
