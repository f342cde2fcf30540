"""Propositional formula graphs, CNF conversion, and two-level quantified formulas.

The central object is a hash-consed gate graph whose smart constructors fold
constants on the fly.  Specializing a graph under a partial assignment of its
variables (cofactoring) therefore shrinks it before any clauses are produced,
which is what makes expansion of the universal quantifier affordable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

K_VAR, K_CONST, K_NOT, K_AND, K_OR, K_XOR, K_XNOR, K_MUX = range(8)

MAX_EXPANSION_VARS = 16
MAX_RECURSIVE_EVAL_VARS = 24


class GateGraph:
    """A structurally hashed DAG of boolean operators.

    Node ids are dense ints.  VAR nodes carry an arbitrary hashable tag;
    engine code uses positive ints so tags double as solver variable ids.
    ``mux(s, a, b)`` selects ``b`` when ``s`` is true and ``a`` otherwise.
    """

    def __init__(self):
        self.kinds = []
        self.children = []
        self.tags = []
        self._cache = {}
        self._true = None
        self._false = None

    def __len__(self):
        return len(self.kinds)

    def _mk(self, kind, children, tag=None):
        key = (kind, children, tag)
        node = self._cache.get(key)
        if node is None:
            node = len(self.kinds)
            self.kinds.append(kind)
            self.children.append(children)
            self.tags.append(tag)
            self._cache[key] = node
        return node

    def const(self, value):
        if value:
            if self._true is None:
                self._true = self._mk(K_CONST, (), True)
            return self._true
        if self._false is None:
            self._false = self._mk(K_CONST, (), False)
        return self._false

    def is_const(self, node, value=None):
        if self.kinds[node] != K_CONST:
            return False
        return True if value is None else self.tags[node] is value

    def var(self, tag):
        return self._mk(K_VAR, (), tag)

    def not_(self, a):
        if self.kinds[a] == K_CONST:
            return self.const(not self.tags[a])
        if self.kinds[a] == K_NOT:
            return self.children[a][0]
        return self._mk(K_NOT, (a,))

    def _nary(self, kind, xs, unit, absorber):
        flat = []
        for x in xs:
            if self.kinds[x] == kind:
                flat.extend(self.children[x])
            else:
                flat.append(x)
        seen, kept = set(), []
        for x in flat:
            if self.is_const(x, unit):
                continue
            if self.is_const(x, absorber):
                return self.const(absorber)
            if x in seen:
                continue
            seen.add(x)
            kept.append(x)
        for x in kept:
            comp = self.children[x][0] if self.kinds[x] == K_NOT else None
            if comp is not None and comp in seen:
                return self.const(absorber)
            if self.kinds[x] != K_NOT and self._cache.get((K_NOT, (x,), None)) in seen:
                return self.const(absorber)
        if not kept:
            return self.const(unit)
        if len(kept) == 1:
            return kept[0]
        return self._mk(kind, tuple(sorted(kept)))

    def and_(self, *xs):
        return self._nary(K_AND, xs, True, False)

    def or_(self, *xs):
        return self._nary(K_OR, xs, False, True)

    def xor_(self, a, b):
        if self.kinds[a] == K_CONST:
            return self.not_(b) if self.tags[a] else b
        if self.kinds[b] == K_CONST:
            return self.not_(a) if self.tags[b] else a
        if a == b:
            return self.const(False)
        if self.kinds[a] == K_NOT and self.children[a][0] == b:
            return self.const(True)
        if self.kinds[b] == K_NOT and self.children[b][0] == a:
            return self.const(True)
        if a > b:
            a, b = b, a
        return self._mk(K_XOR, (a, b))

    def xnor_(self, a, b):
        return self.not_(self.xor_(a, b))

    def mux(self, s, a, b):
        """b if s else a."""
        if self.kinds[s] == K_CONST:
            return b if self.tags[s] else a
        if a == b:
            return a
        if self.is_const(a, False):
            return self.and_(s, b)
        if self.is_const(a, True):
            return self.or_(self.not_(s), b)
        if self.is_const(b, False):
            return self.and_(self.not_(s), a)
        if self.is_const(b, True):
            return self.or_(s, a)
        if self.kinds[b] == K_NOT and self.children[b][0] == a:
            return self.xor_(s, a)
        if self.kinds[a] == K_NOT and self.children[a][0] == b:
            return self.xnor_(s, b)
        return self._mk(K_MUX, (s, a, b))

    def support(self, root):
        """Set of VAR tags reachable from root."""
        out, stack, seen = set(), [root], set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if self.kinds[n] == K_VAR:
                out.add(self.tags[n])
            stack.extend(self.children[n])
        return out

    def evaluate(self, root, env):
        """Evaluate under a total assignment of the support (dict tag -> bool)."""
        memo = {}
        stack = [(root, False)]
        while stack:
            n, ready = stack.pop()
            if n in memo:
                continue
            kind = self.kinds[n]
            if kind == K_CONST:
                memo[n] = self.tags[n]
                continue
            if kind == K_VAR:
                memo[n] = bool(env[self.tags[n]])
                continue
            if not ready:
                stack.append((n, True))
                stack.extend((c, False) for c in self.children[n])
                continue
            cs = [memo[c] for c in self.children[n]]
            if kind == K_NOT:
                memo[n] = not cs[0]
            elif kind == K_AND:
                memo[n] = all(cs)
            elif kind == K_OR:
                memo[n] = any(cs)
            elif kind == K_XOR:
                memo[n] = cs[0] != cs[1]
            elif kind == K_XNOR:
                memo[n] = cs[0] == cs[1]
            else:
                memo[n] = cs[2] if cs[0] else cs[1]
        return memo[root]

    def substitute(self, root, env, out=None):
        """Rebuild the cone of root with some VAR tags replaced by constants.

        Returns (graph, new_root).  The rebuild runs every node through the
        smart constructors, so implied constants propagate and vanish.
        """
        if out is None:
            out = GateGraph()
        memo = {}
        stack = [(root, False)]
        while stack:
            n, ready = stack.pop()
            if n in memo:
                continue
            kind = self.kinds[n]
            if kind == K_CONST:
                memo[n] = out.const(self.tags[n])
                continue
            if kind == K_VAR:
                tag = self.tags[n]
                memo[n] = out.const(env[tag]) if tag in env else out.var(tag)
                continue
            if not ready:
                stack.append((n, True))
                stack.extend((c, False) for c in self.children[n])
                continue
            cs = [memo[c] for c in self.children[n]]
            if kind == K_NOT:
                memo[n] = out.not_(cs[0])
            elif kind == K_AND:
                memo[n] = out.and_(*cs)
            elif kind == K_OR:
                memo[n] = out.or_(*cs)
            elif kind == K_XOR:
                memo[n] = out.xor_(cs[0], cs[1])
            elif kind == K_XNOR:
                memo[n] = out.xnor_(cs[0], cs[1])
            else:
                memo[n] = out.mux(cs[0], cs[1], cs[2])
        return out, memo[root]


@dataclass
class CNF:
    """Clauses in flat form: literal array plus clause offsets (DIMACS literals)."""

    num_vars: int
    lits: np.ndarray
    offsets: np.ndarray

    @property
    def num_clauses(self):
        return len(self.offsets) - 1

    @staticmethod
    def from_clauses(clauses, num_vars):
        offsets = np.zeros(len(clauses) + 1, dtype=np.int32)
        total = 0
        for i, c in enumerate(clauses):
            total += len(c)
            offsets[i + 1] = total
        lits = np.empty(total, dtype=np.int32)
        pos = 0
        for c in clauses:
            for l in c:
                lits[pos] = l
                pos += 1
        return CNF(num_vars, lits, offsets)

    def clause(self, i):
        return self.lits[self.offsets[i] : self.offsets[i + 1]]

    def iter_clauses(self):
        for i in range(self.num_clauses):
            yield tuple(int(l) for l in self.clause(i))

    def extended(self, extra_clauses):
        """A new CNF with extra clauses appended (the receiver is unchanged)."""
        extra = list(extra_clauses)
        top = max((abs(l) for c in extra for l in c), default=0)
        add = CNF.from_clauses(extra, self.num_vars)
        lits = np.concatenate([self.lits, add.lits])
        offsets = np.concatenate([self.offsets, add.offsets[1:] + self.offsets[-1]])
        return CNF(max(self.num_vars, top), lits, offsets)

    def to_dimacs(self):
        parts = [f"p cnf {self.num_vars} {self.num_clauses}"]
        for i in range(self.num_clauses):
            parts.append(" ".join(str(int(l)) for l in self.clause(i)) + " 0")
        return "\n".join(parts) + "\n"


def parse_dimacs(text):
    """Parse DIMACS CNF; returns a CNF.  Accepts 'c' comments and '%' trailers."""
    num_vars = None
    clauses, current = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {raw!r}")
            num_vars = int(parts[2])
            continue
        if line.startswith("%"):
            break
        for tok in line.split():
            l = int(tok)
            if l == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(l)
    if current:
        raise ValueError("last clause not terminated with 0")
    if num_vars is None:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    return CNF.from_clauses(clauses, num_vars)


def parse_qdimacs(text):
    """Parse QDIMACS; returns (prefix, cnf) with prefix as [(quant, [vars])]."""
    prefix = []
    body_lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("a") or line.startswith("e"):
            parts = line.split()
            if parts[-1] != "0":
                raise ValueError(f"quantifier line not terminated: {raw!r}")
            prefix.append((parts[0], [int(v) for v in parts[1:-1]]))
        else:
            body_lines.append(raw)
    return prefix, parse_dimacs("\n".join(body_lines))


def tseitin(graph, root, var_of=None, next_var=1):
    """Clausify the cone of root; every operator node gets a definition variable.

    ``var_of`` maps VAR tags to already-assigned solver ids; tags not present
    get fresh ids.  Returns (clauses, root_lit, next_var, node_lit) where
    node_lit maps graph nodes to their literals.  A constant root yields no
    clauses and root_lit of +1/-1 meaning trivially true or false, with
    node_lit empty; callers must special-case it.
    """
    if var_of is None:
        var_of = {}
    if graph.kinds[root] == K_CONST:
        return [], (1 if graph.tags[root] else -1), next_var, {}
    clauses = []
    node_lit = {}
    stack = [(root, False)]
    while stack:
        n, ready = stack.pop()
        if n in node_lit:
            continue
        kind = graph.kinds[n]
        if kind == K_CONST:
            raise AssertionError("constant below the root; folding should have removed it")
        if kind == K_VAR:
            tag = graph.tags[n]
            v = var_of.get(tag)
            if v is None:
                v = next_var
                var_of[tag] = v
                next_var += 1
            node_lit[n] = v
            continue
        if not ready:
            stack.append((n, True))
            stack.extend((c, False) for c in graph.children[n])
            continue
        z = next_var
        next_var += 1
        node_lit[n] = z
        cs = [node_lit[c] for c in graph.children[n]]
        if kind == K_NOT:
            a = cs[0]
            clauses.append((-z, -a))
            clauses.append((z, a))
        elif kind == K_AND:
            for a in cs:
                clauses.append((-z, a))
            clauses.append(tuple([z] + [-a for a in cs]))
        elif kind == K_OR:
            for a in cs:
                clauses.append((z, -a))
            clauses.append(tuple([-z] + cs))
        elif kind == K_XOR:
            a, b = cs
            clauses.append((-z, a, b))
            clauses.append((-z, -a, -b))
            clauses.append((z, -a, b))
            clauses.append((z, a, -b))
        elif kind == K_XNOR:
            a, b = cs
            clauses.append((-z, -a, b))
            clauses.append((-z, a, -b))
            clauses.append((z, a, b))
            clauses.append((z, -a, -b))
        elif kind == K_MUX:
            s, a, b = cs
            clauses.append((-z, -s, b))
            clauses.append((z, -s, -b))
            clauses.append((-z, s, a))
            clauses.append((z, s, -a))
            clauses.append((-z, a, b))
            clauses.append((z, -a, -b))
        else:
            raise AssertionError(f"unknown node kind {kind}")
    return clauses, node_lit[root], next_var, node_lit


@dataclass
class QBF2:
    """An exists-forall formula: exists S, forall X, (matrix over S and X).

    VAR tags in the graph are global solver ids: S occupies 1..len(s_vars),
    X the ids right after.  ``s_clauses`` are plain clauses over S ids that
    sit outside the scope of X (well-formedness and blocking constraints);
    they are emitted once rather than once per expansion copy.
    """

    graph: GateGraph
    root: int
    s_vars: list
    x_vars: list
    s_clauses: list = field(default_factory=list)

    def check_ids(self):
        expect_s = list(range(1, len(self.s_vars) + 1))
        expect_x = list(range(len(self.s_vars) + 1, len(self.s_vars) + len(self.x_vars) + 1))
        if list(self.s_vars) != expect_s or list(self.x_vars) != expect_x:
            raise ValueError("S must be numbered 1..|S| and X right after")
        sup = self.graph.support(self.root)
        allowed = set(expect_s) | set(expect_x)
        if not sup <= allowed:
            raise ValueError(f"matrix mentions unknown variables: {sorted(sup - allowed)}")

    def prefix(self):
        return [("e", list(self.s_vars)), ("a", list(self.x_vars))]

    def matrix_with_s_clauses(self, out=None):
        """The matrix conjoined with the pure-S side clauses, as a graph root."""
        g = self.graph if out is None else out
        root = self.root
        if out is not None:
            _, root = self.graph.substitute(self.root, {}, out=out)
        clause_nodes = []
        for cl in self.s_clauses:
            lits = [g.var(abs(l)) if l > 0 else g.not_(g.var(abs(l))) for l in cl]
            clause_nodes.append(g.or_(*lits))
        return g, g.and_(root, *clause_nodes)


def expand_universal(qbf):
    """Expand the universal block of a 2-QBF into one big CNF over S and fresh copies.

    Every assignment of X gets its own specialized copy of the matrix; S
    variables keep their ids 1..|S| and are shared across copies.  Fresh
    definition variables are handed out sequentially, copy by copy, so the
    result is dense and deterministic.  Returns (cnf, info dict).
    """
    qbf.check_ids()
    nx = len(qbf.x_vars)
    if nx > MAX_EXPANSION_VARS:
        raise ValueError(f"refusing to expand {nx} universal variables (limit {MAX_EXPANSION_VARS})")
    ns = len(qbf.s_vars)
    clauses = [tuple(cl) for cl in qbf.s_clauses]
    next_var = ns + 1
    copies = 1 << nx
    trivially_false = False
    for c in range(copies):
        env = {qbf.x_vars[i]: bool((c >> (nx - 1 - i)) & 1) for i in range(nx)}
        sub, sub_root = qbf.graph.substitute(qbf.root, env)
        if sub.is_const(sub_root, True):
            continue
        if sub.is_const(sub_root, False):
            trivially_false = True
            break
        var_of = {s: s for s in qbf.s_vars}
        copy_clauses, root_lit, next_var, _ = tseitin(sub, sub_root, var_of, next_var)
        clauses.extend(copy_clauses)
        clauses.append((root_lit,))
    if trivially_false:
        clauses = [()]
    cnf = CNF.from_clauses(clauses, next_var - 1)
    info = {"num_s": ns, "copies": copies, "num_vars": cnf.num_vars, "num_clauses": cnf.num_clauses}
    return cnf, info


def _literal_of(graph, node, var_of):
    """The node as a literal over known var ids, or None if it is not one."""
    kind = graph.kinds[node]
    if kind == K_VAR:
        return var_of.get(graph.tags[node])
    if kind == K_NOT:
        child = graph.children[node][0]
        if graph.kinds[child] == K_VAR:
            v = var_of.get(graph.tags[child])
            return -v if v is not None else None
    return None


def _clause_of(graph, node, var_of):
    """The node as a clause over known var ids, or None if not clause-shaped."""
    if graph.kinds[node] == K_OR:
        lits = [_literal_of(graph, c, var_of) for c in graph.children[node]]
        return tuple(lits) if all(l is not None for l in lits) else None
    lit = _literal_of(graph, node, var_of)
    return (lit,) if lit is not None else None


def qbf_to_qdimacs(qbf):
    """Serialize a 2-QBF in QDIMACS form without expanding: e S / a X / e Ts.

    Conjuncts of the matrix that already look like clauses are written as-is;
    only genuinely nested subformulas get Tseitin definition variables.
    """
    qbf.check_ids()
    ns, nx = len(qbf.s_vars), len(qbf.x_vars)
    var_of = {v: v for v in list(qbf.s_vars) + list(qbf.x_vars)}
    g, root = qbf.graph, qbf.root
    all_clauses = [tuple(cl) for cl in qbf.s_clauses]
    next_var = ns + nx + 1
    if g.is_const(root, False):
        all_clauses.append(())
    elif not g.is_const(root, True):
        conjuncts = g.children[root] if g.kinds[root] == K_AND else (root,)
        for c in conjuncts:
            cl = _clause_of(g, c, var_of)
            if cl is not None:
                all_clauses.append(cl)
                continue
            clauses, root_lit, next_var, _ = tseitin(g, c, var_of, next_var)
            all_clauses.extend(clauses)
            all_clauses.append((root_lit,))
    # A trivially true matrix contributes no clause of its own.
    tseitin_vars = list(range(ns + nx + 1, next_var))
    lines = [f"p cnf {next_var - 1} {len(all_clauses)}"]
    if qbf.s_vars:
        lines.append("e " + " ".join(str(v) for v in qbf.s_vars) + " 0")
    if qbf.x_vars:
        lines.append("a " + " ".join(str(v) for v in qbf.x_vars) + " 0")
    if tseitin_vars:
        lines.append("e " + " ".join(str(v) for v in tseitin_vars) + " 0")
    for cl in all_clauses:
        lines.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(lines) + "\n"


def eval_qbf_recursive(prefix, graph, root, limit=MAX_RECURSIVE_EVAL_VARS):
    """Decide a quantified formula by recursive quantifier unpeeling.

    ``prefix`` is a list of (quantifier, variables) blocks, outermost first,
    with quantifier 'e' or 'a'.  Branches short-circuit: an existential stops
    at the first true cofactor, a universal at the first false one.  Intended
    as a slow reference decision procedure for small formulas.
    """
    order = []
    for quant, tags in prefix:
        if quant not in ("e", "a"):
            raise ValueError(f"bad quantifier {quant!r}")
        order.extend((quant, t) for t in tags)
    sup = graph.support(root)
    bound = {t for _, t in order}
    if not sup <= bound:
        raise ValueError(f"free variables in matrix: {sorted(sup - bound)}")
    if len(order) > limit:
        raise ValueError(f"refusing recursive evaluation over {len(order)} variables (limit {limit})")

    def go(g, r, depth):
        if g.is_const(r, True):
            return True
        if g.is_const(r, False):
            return False
        if depth == len(order):
            return g.evaluate(r, {})
        quant, tag = order[depth]
        for value in (False, True):
            sub_g, sub_r = g.substitute(r, {tag: value})
            res = go(sub_g, sub_r, depth + 1)
            if quant == "e" and res:
                return True
            if quant == "a" and not res:
                return False
        return quant == "a"

    return go(graph, root, 0)
