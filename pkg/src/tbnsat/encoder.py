"""CNF encoding of saturated configurations and polymer-count bounds.

Variables:

* ``Pair(s, t)``  site instances ``s`` and ``t`` are paired
* ``Bind(p, q)``  monomers ``p`` and ``q`` are in the same polymer
* ``Rep(m)``      ``m`` is the first monomer (in encoder order) of its polymer
* ``Sum(i, j)``   at least ``j`` representatives among the first ``i`` monomers

The counter grid is only allocated inside the band that can still matter
for the requested bound; cells outside it are folded in as constants.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .model import Configuration, Tbn, TbnError, compatible_sites, is_saturated, is_valid_configuration, limiting_sites

TRUE = "T"
FALSE = "F"


class EncodingError(RuntimeError):
    """A decoded model violates the TBN semantics; indicates an encoder bug."""


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    flat: np.ndarray
    offsets: np.ndarray
    groups: tuple[tuple[str, int, int], ...] = ()

    @property
    def num_clauses(self) -> int:
        return len(self.offsets) - 1

    @property
    def clauses(self) -> list[list[int]]:
        f, o = self.flat.tolist(), self.offsets.tolist()
        return [f[o[i]:o[i + 1]] for i in range(len(o) - 1)]

    def group_clauses(self, tag: str) -> list[list[int]]:
        out = []
        cl = None
        for g, a, b in self.groups:
            if g == tag:
                cl = cl if cl is not None else self.clauses
                out.extend(cl[a:b])
        return out

    def group_size(self, tag: str) -> int:
        return sum(b - a for g, a, b in self.groups if g == tag)


@dataclass
class VarMap:
    pair: dict = field(default_factory=dict)   # (s, t), s < t  -> var
    bind: dict = field(default_factory=dict)   # (p, q), p < q  -> var
    rep: dict = field(default_factory=dict)    # m -> var
    sum: dict = field(default_factory=dict)    # (i, j) -> var
    names: list = field(default_factory=lambda: [None])

    @property
    def num_vars(self) -> int:
        return len(self.names) - 1

    def new_var(self, *name) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def pair_var(self, s: int, t: int) -> int:
        return self.pair[(s, t) if s < t else (t, s)]

    def bind_var(self, p: int, q: int) -> int:
        return self.bind[(p, q) if p < q else (q, p)]

    def describe(self, var: int) -> tuple:
        return self.names[var]


class Encoding:
    """Mutable accumulator for clauses plus the variable map."""

    def __init__(self, tbn: Tbn, order=None):
        self.tbn = tbn
        self.vm = VarMap()
        self.order = resolve_order(tbn, order)
        self.position = [0] * tbn.n
        for i, m in enumerate(self.order):
            self.position[m] = i
        self._chunks: list[np.ndarray] = []
        self._lens: list[np.ndarray] = []
        self._groups: list[tuple[str, int, int]] = []
        self._nclauses = 0
        self.trivially_unsat = False
        self.k = None
        self.kmax = None
        self.free_monomers: list[int] = []

    def emit(self, tag: str, clauses):
        """Append clauses (list of lists, or a 2-D int array of equal-width rows)."""
        if isinstance(clauses, np.ndarray):
            if clauses.size == 0:
                return
            if clauses.ndim != 2:
                raise ValueError("expected 2-D clause array")
            flat = clauses.astype(np.int64).ravel()
            lens = np.full(clauses.shape[0], clauses.shape[1], dtype=np.int64)
        else:
            clauses = [list(c) for c in clauses]
            if not clauses:
                return
            if any(len(c) == 0 for c in clauses):
                raise EncodingError("attempted to emit an empty clause")
            flat = np.fromiter(itertools.chain.from_iterable(clauses), dtype=np.int64)
            lens = np.fromiter((len(c) for c in clauses), dtype=np.int64)
        self._chunks.append(flat)
        self._lens.append(lens)
        n = len(lens)
        if self._groups and self._groups[-1][0] == tag and self._groups[-1][2] == self._nclauses:
            g = self._groups[-1]
            self._groups[-1] = (tag, g[1], g[2] + n)
        else:
            self._groups.append((tag, self._nclauses, self._nclauses + n))
        self._nclauses += n

    def cnf(self) -> CnfInstance:
        if self._chunks:
            flat = np.concatenate(self._chunks)
            lens = np.concatenate(self._lens)
        else:
            flat = np.zeros(0, dtype=np.int64)
            lens = np.zeros(0, dtype=np.int64)
        offsets = np.zeros(len(lens) + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        if flat.size and int(np.abs(flat).max()) > self.vm.num_vars:
            raise EncodingError("literal references an unallocated variable")
        return CnfInstance(self.vm.num_vars, flat, offsets, tuple(self._groups))

    # convenience views
    def free_literals(self, m: int) -> list[int]:
        """Negative Pair literals that make monomer ``m`` free."""
        tbn = self.tbn
        out = []
        for s in tbn.monomer_sites[m]:
            for t in compatible_sites(tbn, s):
                if tbn.site_monomer[t] != m:
                    out.append(-self.vm.pair_var(s, t))
        return sorted(set(out), key=abs)

    def count_literal(self, k: int) -> int:
        """Literal asserting at least ``k`` polymers (incremental counter only)."""
        if self.kmax is None:
            raise EncodingError("no incremental counter in this encoding")
        if not 1 <= k <= self.kmax:
            raise EncodingError(f"k={k} outside counter range 1..{self.kmax}")
        return self.vm.sum[(self.tbn.n, k)]


def resolve_order(tbn: Tbn, order) -> list[int]:
    if order is None or order == "input":
        return list(range(tbn.n))
    if order == "reverse":
        return list(range(tbn.n - 1, -1, -1))
    if order == "most-sites-first":
        return sorted(range(tbn.n), key=lambda m: (-len(tbn.monomers[m].sites), m))
    order = list(order)
    if sorted(order) != list(range(tbn.n)):
        raise TbnError("monomer order must be a permutation of 0..n-1")
    return order


# ------------------------------------------------------------------ saturation


def encode_saturation(t: Tbn, order=None, amo: str = "pairwise") -> Encoding:
    """Pair variables, at-most-one per site, at-least-one per limiting site."""
    enc = Encoding(t, order)
    vm = enc.vm
    for s in range(t.num_sites):
        for u in compatible_sites(t, s):
            if u > s:
                vm.pair[(s, u)] = vm.new_var("PAIR", s, u)

    amo_clauses = []
    for s in range(t.num_sites):
        vs = [vm.pair_var(s, u) for u in compatible_sites(t, s)]
        if len(vs) < 2:
            continue
        if amo == "pairwise":
            amo_clauses.extend([-a, -b] for a, b in itertools.combinations(vs, 2))
        elif amo == "sequential":
            amo_clauses.extend(_sequential_amo(vm, vs, s))
        else:
            raise ValueError(f"unknown at-most-one encoding {amo!r}")
    enc.emit("amo", amo_clauses)

    alo = []
    for s in limiting_sites(t):
        vs = [vm.pair_var(s, u) for u in compatible_sites(t, s)]
        assert vs, "limiting site without complementary partner"
        alo.append(vs)
    enc.emit("alo", alo)
    return enc


def _sequential_amo(vm: VarMap, xs, site):
    # Sinz-style sequential at-most-one: 3n-4 binary clauses, n-1 auxiliaries.
    n = len(xs)
    aux = [vm.new_var("AMO", site, i) for i in range(n - 1)]
    out = [[-xs[0], aux[0]]]
    for i in range(1, n - 1):
        out.append([-xs[i], aux[i]])
        out.append([-aux[i - 1], aux[i]])
        out.append([-xs[i], -aux[i - 1]])
    out.append([-xs[n - 1], -aux[n - 2]])
    return out


# ------------------------------------------------------------------ polymers


def _binding_clauses(enc: Encoding):
    t, vm = enc.tbn, enc.vm
    n = t.n
    for p in range(n):
        for q in range(p + 1, n):
            vm.bind[(p, q)] = vm.new_var("BIND", p, q)

    p2b = []
    for (s, u), v in vm.pair.items():
        ms, mu = t.site_monomer[s], t.site_monomer[u]
        if ms != mu:
            p2b.append([-v, vm.bind_var(ms, mu)])
    enc.emit("pair_bind", p2b)

    if n >= 3:
        bind = np.zeros((n, n), dtype=np.int64)
        for (p, q), v in vm.bind.items():
            bind[p, q] = bind[q, p] = v
        rows = []
        for p in range(n - 2):
            for q in range(p + 1, n - 1):
                r = np.arange(q + 1, n)
                bpq = np.full(len(r), bind[p, q])
                bpr = bind[p, r]
                bqr = bind[q, r]
                # one clause per choice of the shared monomer
                rows.append(np.stack([-bpq, -bpr, bqr], axis=1))
                rows.append(np.stack([-bpq, -bqr, bpr], axis=1))
                rows.append(np.stack([-bpr, -bqr, bpq], axis=1))
        enc.emit("transitivity", np.concatenate(rows))

    for i, m in enumerate(enc.order):
        vm.rep[m] = vm.new_var("REP", m)
    b2r = []
    for i, q in enumerate(enc.order):
        for p in enc.order[:i]:
            b2r.append([-vm.bind_var(p, q), -vm.rep[q]])
    enc.emit("rep", b2r)


def counter_clauses(vm: VarMap, rep_lits, k: int, banded: bool = True):
    """Clauses forcing at least ``k`` of ``rep_lits`` true.

    With ``banded=True`` the bound is fixed: ``Sum`` cells outside
    ``max(1, k-(n-i)) <= j <= min(i, k)`` become constants and the unit
    ``Sum(n, k)`` is emitted.  With ``banded=False`` the grid covers
    ``1 <= j <= min(i, k)`` and no unit is emitted, so any bound up to ``k``
    can be asserted later by assuming ``Sum(n, bound)``.

    Row 0 is virtual (``Sum(0,0)`` true, ``Sum(0,j>0)`` false), which yields
    the base clause ``Sum(1,1) -> Rep(m_1)``.
    """
    n = len(rep_lits)
    if not 1 <= k <= n:
        raise ValueError("counter requires 1 <= k <= n")

    def lower(i):
        return max(1, k - (n - i)) if banded else 1

    for i in range(1, n + 1):
        for j in range(lower(i), min(i, k) + 1):
            vm.sum[(i, j)] = vm.new_var("SUM", i, j)

    def cell(i, j):
        if j <= 0:
            return TRUE
        if i == 0 or j > i or j > k:
            return FALSE
        if j < lower(i):
            return TRUE
        return vm.sum[(i, j)]

    def lit(c, positive):
        if c == TRUE or c == FALSE:
            return c if positive else (FALSE if c == TRUE else TRUE)
        return c if positive else -c

    def finish(clause):
        out = []
        for x in clause:
            if x == TRUE:
                return None
            if x != FALSE:
                out.append(x)
        if not out:
            raise EncodingError("counter simplification produced an empty clause")
        return out

    clauses = []
    for i in range(0, n):
        for j in range(0, k + 1):
            if j + 1 <= k:
                c = finish([lit(cell(i, j), True), lit(cell(i + 1, j + 1), False)])
                if c:
                    clauses.append(c)
            if j >= 1:
                c = finish([lit(cell(i, j), True), lit(cell(i + 1, j), False), rep_lits[i]])
                if c:
                    clauses.append(c)
    if banded:
        clauses.append([vm.sum[(n, k)]])
    return clauses


def encode_polymer_count(t: Tbn, k: int, acc: Encoding | None = None, incremental: bool = False,
                         order=None) -> Encoding:
    """Add binding, representative and counter clauses for ``>= k`` polymers.

    With ``incremental=True`` the counter is built for every bound up to
    ``k`` and nothing is asserted; use :meth:`Encoding.count_literal`.
    """
    if acc is None:
        acc = encode_saturation(t, order=order)
    if k < 1:
        raise ValueError("k must be at least 1")
    acc.k = None if incremental else k
    if k > t.n:
        if incremental:
            raise ValueError("incremental counter range exceeds monomer count")
        x = acc.vm.new_var("UNSAT")
        acc.emit("unsat", [[x], [-x]])
        acc.trivially_unsat = True
        return acc
    _binding_clauses(acc)
    reps = [acc.vm.rep[m] for m in acc.order]
    acc.emit("counter", counter_clauses(acc.vm, reps, k, banded=not incremental))
    if incremental:
        acc.kmax = k
    return acc


def encode_monomer_free(t: Tbn, m: int, acc: Encoding) -> Encoding:
    if not 0 <= m < t.n:
        raise TbnError(f"monomer index {m} out of range")
    acc.emit("free", [[lit] for lit in acc.free_literals(m)])
    acc.free_monomers.append(m)
    return acc


def encode_query(t: Tbn, k: int, free: int | None = None, order=None, amo: str = "pairwise") -> Encoding:
    enc = encode_saturation(t, order=order, amo=amo)
    if free is not None:
        encode_monomer_free(t, free, enc)
    return encode_polymer_count(t, k, enc)


# ------------------------------------------------------------------ DIMACS


def legend_line(vm: VarMap, t: Tbn | None, var: int) -> str:
    name = vm.names[var]
    kind = name[0]
    if kind == "PAIR":
        s, u = name[1], name[2]
        if t is not None:
            return f"c var {var} PAIR {t.site_ref(s)} {t.site_ref(u)}"
        return f"c var {var} PAIR {s} {u}"
    return f"c var {var} {kind} " + " ".join(str(x) for x in name[1:])


def to_dimacs(c: CnfInstance, vm: VarMap | None = None, tbn: Tbn | None = None) -> str:
    lines = []
    if vm is not None:
        for v in range(1, vm.num_vars + 1):
            lines.append(legend_line(vm, tbn, v).rstrip())
    lines.append(f"p cnf {c.num_vars} {c.num_clauses}")
    f, o = c.flat.tolist(), c.offsets.tolist()
    for i in range(len(o) - 1):
        lines.append(" ".join(map(str, f[o[i]:o[i + 1]])) + " 0")
    return "\n".join(lines) + "\n"


def pair_legend(dimacs: str) -> dict[int, tuple[str, str]]:
    """Extract ``var -> (site_ref, site_ref)`` from DIMACS legend comments."""
    out = {}
    for line in dimacs.splitlines():
        parts = line.split()
        if len(parts) == 6 and parts[:2] == ["c", "var"] and parts[3] == "PAIR":
            out[int(parts[2])] = (parts[4], parts[5])
    return out


# ------------------------------------------------------------------ decoding


def decode_model(enc: Encoding, assignment) -> Configuration:
    """Configuration from the true Pair variables; validated before return."""
    t = enc.tbn
    pairs = []
    for (s, u), v in enc.vm.pair.items():
        if assignment[v]:
            pairs.append((s, u))
    conf = Configuration(frozenset(pairs))
    if not is_valid_configuration(t, conf):
        raise EncodingError("decoded pairing is not a valid matching")
    if not is_saturated(t, conf):
        raise EncodingError("decoded configuration is not saturated")
    return conf


def expected_clause_counts(t: Tbn) -> dict[str, int]:
    """Closed-form clause counts for the fixed parts of the encoding."""
    return {
        "amo": sum(comb(len(compatible_sites(t, s)), 2) for s in range(t.num_sites)),
        "alo": len(limiting_sites(t)),
        "transitivity": 3 * comb(t.n, 3),
        "rep": comb(t.n, 2),
    }
