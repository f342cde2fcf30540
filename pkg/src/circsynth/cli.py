"""Batch command-line front end.

Exit codes across all commands: 0 success (or equivalent), 1 definitive
negative (unsat, inequivalent), 2 usage error, 3 timeout or unknown.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys

from .bench import load_bench, save_bench, write_bench
from .benchgen import (
    ALU4_RANGE,
    BUNDLED_74XXX,
    FAMILIES,
    FamilySpec,
    gen_alu,
    load_74xxx,
    truth_table_requirement,
)
from .boolfunc import builtin_basis, builtin_basis_names, load_basis_file
from .encode import MODES, encode_synthesis
from .formula import expand_universal, parse_dimacs, qbf_to_qdimacs
from .sat import SatProblem
from .synth import (
    SynthesisConfig,
    label_count,
    synthesize,
    verify,
    write_ledger,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


class UsageError(Exception):
    pass


def _read_config_file(path):
    settings = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
                key, _, value = line.partition("=")
                settings[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    return settings


_CONFIG_KEYS = {
    "seed": int,
    "budget": float,
    "conflicts": int,
    "jobs": int,
    "solver": str,
    "deterministic": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def _apply_config(args):
    if not args.config:
        return
    settings = _read_config_file(args.config)
    for key, value in settings.items():
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}; valid keys: {sorted(_CONFIG_KEYS)}")
        if getattr(args, key) == PARSER_DEFAULTS[key]:
            try:
                setattr(args, key, _CONFIG_KEYS[key](value))
            except ValueError:
                raise UsageError(f"bad value for config key {key!r}: {value!r}")


PARSER_DEFAULTS = {
    "seed": 0,
    "budget": None,
    "conflicts": None,
    "jobs": 1,
    "solver": "internal",
    "deterministic": False,
}


def _common_options(sub):
    sub.add_argument("--seed", type=int, default=PARSER_DEFAULTS["seed"],
                     help="seed for any randomized component (echoed in manifests)")
    sub.add_argument("--budget", type=float, default=PARSER_DEFAULTS["budget"],
                     metavar="SECONDS", help="wall-clock budget per solver call")
    sub.add_argument("--conflicts", type=int, default=PARSER_DEFAULTS["conflicts"],
                     metavar="N", help="conflict budget per solver call")
    sub.add_argument("--jobs", type=int, default=PARSER_DEFAULTS["jobs"],
                     metavar="N", help="parallel workers across candidate sizes")
    sub.add_argument("--solver", default=PARSER_DEFAULTS["solver"],
                     help="'internal' or 'external:<command reading DIMACS on stdin>'")
    sub.add_argument("--deterministic", action="store_true",
                     default=PARSER_DEFAULTS["deterministic"],
                     help="suppress timing in manifests so reruns are byte-identical")
    sub.add_argument("--config", metavar="FILE",
                     help="key=value file supplying defaults for the options above")


def _load_requirement(spec):
    """A requirement argument: BENCH path, bundled 74xxx name, tt:, or gen:."""
    if spec.startswith("tt:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"truth-table spec must be tt:HEX[,HEX...]:INPUTS, got {spec!r}")
        tables = parts[1].split(",")
        try:
            return truth_table_requirement(tables, int(parts[2]))
        except ValueError as exc:
            raise UsageError(str(exc))
    if spec.startswith("gen:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"generator spec must be gen:FAMILY:N, got {spec!r}")
        try:
            return gen_alu(parts[1], int(parts[2]))
        except ValueError as exc:
            raise UsageError(str(exc))
    if spec in BUNDLED_74XXX:
        return load_74xxx(spec)
    if not os.path.exists(spec):
        raise UsageError(f"no such requirement file: {spec}")
    try:
        return load_bench(spec)
    except ValueError as exc:
        raise UsageError(str(exc))


def _load_basis(spec):
    if os.path.exists(spec):
        try:
            return load_basis_file(spec)
        except ValueError as exc:
            raise UsageError(str(exc))
    try:
        return builtin_basis(spec)
    except KeyError:
        raise UsageError(
            f"unknown basis {spec!r}: not a file, and builtins are {builtin_basis_names()}")


def _sha256_path(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _sha256_text(text):
    return hashlib.sha256(text.encode()).hexdigest()


def _config_echo(args):
    return {key: getattr(args, key) for key in PARSER_DEFAULTS}


def _requirement_digest(spec, psi):
    if os.path.exists(spec):
        return {spec: _sha256_path(spec)}
    return {spec: _sha256_text(write_bench(psi))}


def _scrub_rows(rows, deterministic):
    if not deterministic:
        return [dict(r) for r in rows]
    out = []
    for r in rows:
        r = dict(r)
        r["wall-time"] = "0.000"
        out.append(r)
    return out


def _write_manifest(path, manifest):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_range(text):
    lo, sep, hi = text.partition("..")
    try:
        if sep:
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(lo)]
    except ValueError:
        raise UsageError(f"bad n range {text!r}; use N or LO..HI")
    if not values:
        raise UsageError(f"empty n range {text!r}")
    return values


def cmd_bench_gen(args):
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {FAMILIES}")
    values = _parse_range(args.n_range)
    specs = []
    for n in values:
        try:
            specs.append(FamilySpec(args.family, n))
        except ValueError as exc:
            raise UsageError(str(exc))
    os.makedirs(os.path.join(args.out, args.family), exist_ok=True)
    artifacts = {}
    rows = []
    for spec in specs:
        circuit = gen_alu(spec)
        path = os.path.join(args.out, spec.family, f"{spec.n}.bench")
        save_bench(circuit, path)
        artifacts[path] = _sha256_path(path)
        rows.append({"family": spec.family, "n": spec.n,
                     "inputs": len(circuit.inputs), "outputs": len(circuit.outputs),
                     "gates": len(circuit.gates)})
        print(f"wrote {path}: {len(circuit.inputs)} inputs, "
              f"{len(circuit.outputs)} outputs, {len(circuit.gates)} gates")
    manifest = {
        "command": ["bench-gen", args.family, args.n_range],
        "config": _config_echo(args),
        "inputs": {},
        "rows": rows,
        "artifacts": artifacts,
    }
    _write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    return EXIT_OK


def cmd_label_count(args):
    psi = _load_requirement(args.requirement)
    basis = _load_basis(args.basis)
    try:
        result = label_count(basis, psi, limit=args.limit, solver=args.solver,
                             conflict_budget=args.conflicts, time_budget=args.budget)
    except ValueError as exc:
        raise UsageError(str(exc))
    flag = "complete" if result.complete else "partial"
    print(f"labelings: {result.count} ({flag})")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        manifest = {
            "command": ["label-count", args.requirement, args.basis],
            "config": _config_echo(args),
            "inputs": _requirement_digest(args.requirement, psi),
            "count": result.count,
            "complete": result.complete,
            "artifacts": {},
        }
        _write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    return EXIT_OK if result.complete else EXIT_TIMEOUT


def cmd_synthesize(args):
    psi = _load_requirement(args.requirement)
    basis = _load_basis(args.basis)
    ancilla_values = None
    if args.ancilla_values is not None:
        try:
            ancilla_values = tuple(bool(int(ch)) for ch in args.ancilla_values)
        except ValueError:
            raise UsageError(f"--ancilla-values wants a 0/1 string, got {args.ancilla_values!r}")
    try:
        cfg = SynthesisConfig(
            basis=basis, mode=args.mode, symmetry=args.symmetry,
            max_size=args.max_size, conflict_budget=args.conflicts,
            time_budget=args.budget, enumerate_all=args.enumerate,
            enumeration_limit=args.limit, ancilla=args.ancilla,
            ancilla_values=ancilla_values, solver=args.solver, jobs=args.jobs,
        )
        result = synthesize(cfg, psi)
    except ValueError as exc:
        raise UsageError(str(exc))
    artifacts = {}
    os.makedirs(args.out, exist_ok=True)
    if result.status == "sat":
        print(f"sat: {result.size} gates"
              + (", proven minimal" if result.optimal else ""))
        print("cells: " + ", ".join(result.cell_functions))
        if result.ancilla_values:
            print("ancillae: " + "".join("1" if v else "0" for v in result.ancilla_values))
        best_path = os.path.join(args.out, f"{psi.name}-k{result.size}.bench")
        save_bench(result.circuit, best_path)
        artifacts[best_path] = _sha256_path(best_path)
        print(f"wrote {best_path}")
        for i, extra in enumerate(result.circuits[1:], 2):
            path = os.path.join(args.out, f"{psi.name}-k{result.size}-sol{i}.bench")
            save_bench(extra, path)
            artifacts[path] = _sha256_path(path)
        if len(result.circuits) > 1:
            print(f"enumerated {len(result.circuits)} solutions"
                  + ("" if result.enumeration_complete else " (partial)"))
    else:
        print(f"{result.status}: {result.bounds}")
    ledger_path = os.path.join(args.out, "ledger.csv")
    rows = _scrub_rows(result.ledger, args.deterministic)
    write_ledger(rows, ledger_path)
    artifacts[ledger_path] = _sha256_path(ledger_path)
    manifest = {
        "command": ["synthesize", args.requirement, args.basis, args.mode],
        "config": _config_echo(args),
        "inputs": _requirement_digest(args.requirement, psi),
        "status": result.status,
        "size": result.size,
        "optimal": result.optimal,
        "rows": rows,
        "artifacts": artifacts,
    }
    _write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    if result.status == "sat":
        return EXIT_OK
    return EXIT_NEGATIVE if result.status == "unsat" else EXIT_TIMEOUT


def cmd_verify(args):
    a = _load_requirement(args.circuit_a)
    b = _load_requirement(args.circuit_b)
    try:
        result = verify(a, b, solver=args.solver,
                        conflict_budget=args.conflicts, time_budget=args.budget)
    except ValueError as exc:
        print(f"interface mismatch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if result.status == "timeout":
        print("timeout: equivalence undecided")
        return EXIT_TIMEOUT
    if result.equivalent:
        print("equivalent")
        return EXIT_OK
    vector = " ".join(f"{name}={int(value)}"
                      for name, value in sorted(result.counterexample.items()))
    print(f"not equivalent; differ at {vector}")
    return EXIT_NEGATIVE


def cmd_export(args):
    psi = _load_requirement(args.requirement)
    basis = _load_basis(args.basis)
    if not set(args.ancilla) <= {"0", "1"}:
        raise UsageError(f"--ancilla wants a 0/1 string, got {args.ancilla!r}")
    ancilla = tuple(ch == "1" for ch in args.ancilla)
    try:
        encoding = encode_synthesis(basis, psi, args.size, mode=args.mode,
                                    ancilla=ancilla)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.format == "qdimacs":
        text = qbf_to_qdimacs(encoding.qbf)
    else:
        cnf, _ = expand_universal(encoding.qbf)
        text = cnf.to_dimacs()
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    return EXIT_OK


def cmd_sat_solve(args):
    """Decide one DIMACS file; prints the s/v convention, exits 10/20/3.

    Exists so an 'external:<command>' solver spec can be pointed back at
    this tool when probing the adapter without a third-party solver.
    """
    try:
        with open(args.file) as fh:
            cnf = parse_dimacs(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc))
    res = SatProblem(cnf).solve(conflict_budget=args.conflicts, time_budget=args.budget)
    if res.status == "sat":
        print("s SATISFIABLE")
        lits = [str(v if res.model[v] else -v) for v in range(1, cnf.num_vars + 1)]
        print("v " + " ".join(lits + ["0"]))
        return 10
    if res.status == "unsat":
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return EXIT_TIMEOUT


def build_parser():
    parser = argparse.ArgumentParser(
        prog="circsynth",
        description="Circuit synthesis and design-space exploration over a SAT core.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench-gen", help="generate ALU-family BENCH files")
    p.add_argument("family", help=f"one of {', '.join(FAMILIES)}")
    p.add_argument("n_range", help="size parameter: N or LO..HI")
    p.add_argument("--out", default=".", help="output directory")
    _common_options(p)
    p.set_defaults(func=cmd_bench_gen)

    p = sub.add_parser("label-count", help="count distinct labelings of a topology")
    p.add_argument("requirement")
    p.add_argument("--basis", required=True)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--out", default=None, help="directory for a manifest")
    _common_options(p)
    p.set_defaults(func=cmd_label_count)

    p = sub.add_parser("synthesize", help="find a smallest realization of a requirement")
    p.add_argument("requirement")
    p.add_argument("--basis", required=True)
    p.add_argument("--mode", choices=list(MODES), default="circuit")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--symmetry", action="store_true", default=True)
    p.add_argument("--no-symmetry", dest="symmetry", action="store_false")
    p.add_argument("--enumerate", action="store_true",
                   help="emit every distinct solution at the optimum")
    p.add_argument("--limit", type=int, default=None,
                   help="cap on enumerated solutions")
    p.add_argument("--ancilla", type=int, default=0,
                   help="constant ancilla inputs (network mode)")
    p.add_argument("--ancilla-values", default=None,
                   help="fix ancilla constants, e.g. 01; default sweeps")
    p.add_argument("--out", default=".", help="output directory")
    _common_options(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="check two circuits for equivalence")
    p.add_argument("circuit_a")
    p.add_argument("circuit_b")
    _common_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write the synthesis formula as a file")
    p.add_argument("requirement")
    p.add_argument("--basis", required=True)
    p.add_argument("--mode", choices=list(MODES), default="circuit")
    p.add_argument("--size", type=int, required=True, help="cell count k")
    p.add_argument("--format", choices=("qdimacs", "dimacs-expanded"), required=True)
    p.add_argument("--ancilla", default="",
                   help="ancilla constants as a 0/1 string (network mode)")
    p.add_argument("--output", "-o", default="-", help="file path, or - for stdout")
    _common_options(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("sat-solve", help="run the embedded SAT solver on a DIMACS file")
    p.add_argument("file")
    _common_options(p)
    p.set_defaults(func=cmd_sat_solve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        random.seed(args.seed)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
