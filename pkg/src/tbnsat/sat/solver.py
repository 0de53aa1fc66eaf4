"""Embedded CDCL solver: incremental, assumption-based, verified models."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K

DEFAULT_CONFLICT_BUDGET = 10**6


class Verdict(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


class SolverError(RuntimeError):
    pass


class ModelVerificationError(SolverError):
    """A model claimed satisfying does not satisfy the input clauses."""


@dataclass
class SolveOutcome:
    verdict: Verdict
    model: np.ndarray | None = None  # bool, indexed by 1-based variable; entry 0 unused
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT

    @property
    def unsat(self) -> bool:
        return self.verdict is Verdict.UNSAT

    def value(self, lit: int) -> bool:
        if self.model is None:
            raise SolverError("no model")
        v = self.model[abs(lit)]
        return bool(v) if lit > 0 else not bool(v)


def _to_internal(lits: np.ndarray) -> np.ndarray:
    lits = np.asarray(lits, dtype=np.int64)
    return 2 * (np.abs(lits) - 1) + (lits < 0)


def check_model(flat: np.ndarray, offsets: np.ndarray, model: np.ndarray) -> bool:
    """True iff ``model`` satisfies every clause of a CSR clause set."""
    if len(offsets) <= 1:
        return True
    if np.any(offsets[1:] == offsets[:-1]):
        return False
    truth = model[np.abs(flat)] == (flat > 0)
    return bool(np.logical_or.reduceat(truth, offsets[:-1]).all())


class CdclSolver:
    """Incremental CDCL solver with two watched literals and first-UIP learning.

    Clauses use DIMACS-style signed 1-based literals.  Learned clauses are
    kept across :meth:`solve` calls, so repeated queries under different
    assumptions share work.
    """

    def __init__(self, num_vars: int = 0, seed: int | None = 0,
                 conflict_budget: int | None = DEFAULT_CONFLICT_BUDGET,
                 time_budget: float | None = None, yield_every: int = 20000):
        self.seed = seed
        self.conflict_budget = conflict_budget
        self.time_budget = time_budget
        self.yield_every = yield_every
        self._rng = np.random.default_rng(seed) if seed is not None else None

        self.S = np.zeros(K.N_SCALARS, dtype=np.int64)
        self.S[K.OK] = 1
        self.S[K.MAXLEARNT] = 1000
        self.F = np.zeros(K.N_FLOATS, dtype=np.float64)
        self.F[K.VAR_INC] = 1.0
        self.F[K.CLA_INC] = 1.0

        self._alloc_clauses(1024, 8192)
        self._alloc_vars(0)
        self._orig_flat: list[np.ndarray] = []
        self._orig_offsets: list[np.ndarray] = []
        self._verify_cache = None
        self.ensure_vars(num_vars)

    # ------------------------------------------------------------ storage

    def _alloc_clauses(self, ncls, nlits):
        self.lits = np.zeros(nlits, dtype=np.int64)
        self.cstart = np.zeros(ncls, dtype=np.int64)
        self.clen = np.zeros(ncls, dtype=np.int64)
        self.clearnt = np.zeros(ncls, dtype=np.int8)
        self.cdel = np.zeros(ncls, dtype=np.int8)
        self.clbd = np.zeros(ncls, dtype=np.int64)
        self.cact = np.zeros(ncls, dtype=np.float64)
        self.wnext = np.full(2 * ncls, -1, dtype=np.int64)

    def _alloc_vars(self, n):
        self.assign = np.full(n, K.UNDEF, dtype=np.int8)
        self.level = np.zeros(n, dtype=np.int64)
        self.reason = np.full(n, -1, dtype=np.int64)
        self.trail = np.zeros(n, dtype=np.int64)
        self.trail_lim = np.zeros(n + 1, dtype=np.int64)
        self.phase = np.zeros(n, dtype=np.int8)
        self.seen = np.zeros(n, dtype=np.int8)
        self.heap = np.zeros(n, dtype=np.int64)
        self.heap_pos = np.full(n, -1, dtype=np.int64)
        self.activity = np.zeros(n, dtype=np.float64)
        self.buf = np.zeros(n + 2, dtype=np.int64)
        self.aux = np.zeros(n + 2, dtype=np.int64)
        self.lvl_stamp = np.zeros(n + 2, dtype=np.int64)
        self.lit_stamp = np.zeros(2 * n, dtype=np.int64)
        self.whead = np.full(2 * n, -1, dtype=np.int64)

    @property
    def num_vars(self) -> int:
        return int(self.S[K.NV])

    def ensure_vars(self, n: int):
        old = self.num_vars
        if n <= old:
            return
        saved = {name: getattr(self, name) for name in (
            "assign", "level", "reason", "trail", "trail_lim", "phase", "seen", "heap",
            "heap_pos", "activity", "lvl_stamp", "lit_stamp", "whead")}
        self._alloc_vars(n)
        for name, arr in saved.items():
            getattr(self, name)[: len(arr)] = arr
        if self._rng is not None:
            self.activity[old:n] = self._rng.random(n - old) * 1e-5
        self.S[K.NV] = n
        for v in range(old, n):
            K.heap_insert(self.S, self.heap, self.heap_pos, self.activity, v)

    def _grow_clauses(self, need_cls: int = 0, need_lits: int = 0):
        ncls = max(2 * len(self.clen), int(self.S[K.NC]) + need_cls + 16)
        nlits = max(2 * len(self.lits), int(self.S[K.NL]) + need_lits + self.num_vars + 16)
        old = {name: getattr(self, name) for name in (
            "lits", "cstart", "clen", "clearnt", "cdel", "clbd", "cact", "wnext")}
        self._alloc_clauses(ncls, nlits)
        for name, arr in old.items():
            getattr(self, name)[: len(arr)] = arr

    # ------------------------------------------------------------ clauses

    def add_clauses_csr(self, flat, offsets):
        """Add clauses given as a flat signed-literal array plus offsets."""
        flat = np.ascontiguousarray(flat, dtype=np.int64)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        if len(offsets) <= 1:
            return
        if flat.size:
            self.ensure_vars(int(np.abs(flat).max()))
        self._orig_flat.append(flat)
        self._orig_offsets.append(offsets)
        self._verify_cache = None
        if self.S[K.DL] != 0:
            self._cancel(0)
        ncl = len(offsets) - 1
        while (len(self.clen) - self.S[K.NC] < ncl + 2
               or len(self.lits) - self.S[K.NL] < flat.size + self.num_vars + 2):
            self._grow_clauses(ncl + 2, flat.size)
        K.add_clauses_root(self.S, self.F, self.lits, self.cstart, self.clen, self.clearnt,
                           self.cdel, self.clbd, self.cact, self.whead, self.wnext,
                           self.assign, self.level, self.reason, self.trail, self.trail_lim,
                           self.lit_stamp, self.buf, _to_internal(flat), offsets)

    def add_clause(self, lits):
        lits = list(lits)
        self.add_clauses_csr(np.array(lits, dtype=np.int64), np.array([0, len(lits)], dtype=np.int64))

    def add_clauses(self, clauses):
        flat, offsets = [], [0]
        for c in clauses:
            flat.extend(c)
            offsets.append(len(flat))
        self.add_clauses_csr(np.array(flat, dtype=np.int64), np.array(offsets, dtype=np.int64))

    def _compact(self):
        K.compact(self.S, self.lits, self.cstart, self.clen, self.clearnt, self.cdel, self.clbd,
                  self.cact, self.whead, self.wnext, self.reason, self.trail)

    def _cancel(self, lvl):
        K.cancel_until(self.S, self.assign, self.trail, self.trail_lim, self.phase,
                       self.heap, self.heap_pos, self.activity, lvl)

    # ------------------------------------------------------------ solving

    def _original(self):
        if self._verify_cache is None:
            if not self._orig_flat:
                self._verify_cache = (np.zeros(0, np.int64), np.zeros(1, np.int64))
            else:
                flats, offs, base = [], [np.zeros(1, np.int64)], 0
                for f, o in zip(self._orig_flat, self._orig_offsets):
                    flats.append(f)
                    offs.append(o[1:] + base)
                    base += f.size
                self._verify_cache = (np.concatenate(flats), np.concatenate(offs))
        return self._verify_cache

    def solve(self, assumptions=()) -> SolveOutcome:
        t0 = time.perf_counter()
        before = self.S.copy()
        assumptions = [int(a) for a in assumptions]
        if assumptions:
            self.ensure_vars(max(abs(a) for a in assumptions))
        assumps = _to_internal(np.array(assumptions, dtype=np.int64))
        self.S[K.BUDGET] = -1 if self.conflict_budget is None else self.conflict_budget
        if self.S[K.DL] != 0:
            self._cancel(0)

        while True:
            code = K.search(self.S, self.F, self.lits, self.cstart, self.clen, self.clearnt,
                            self.cdel, self.clbd, self.cact, self.whead, self.wnext,
                            self.assign, self.level, self.reason, self.trail, self.trail_lim,
                            self.phase, self.seen, self.heap, self.heap_pos, self.activity,
                            self.buf, self.aux, self.lvl_stamp, assumps, self.yield_every)
            if code == K.GROW:
                if self.S[K.NDELETED_LITS] * 2 > self.S[K.NL]:
                    self._compact()
                if (len(self.lits) - self.S[K.NL] < self.num_vars + 2
                        or len(self.clen) - self.S[K.NC] < 2
                        or self.S[K.NL] * 4 > len(self.lits) * 3):
                    self._grow_clauses()
                continue
            if code == K.YIELD:
                if self.time_budget is not None and time.perf_counter() - t0 > self.time_budget:
                    self._cancel(0)
                    code = K.UNKNOWN
                    break
                continue
            break

        stats = {
            "conflicts": int(self.S[K.CONFLICTS] - before[K.CONFLICTS]),
            "decisions": int(self.S[K.DECISIONS] - before[K.DECISIONS]),
            "propagations": int(self.S[K.PROPS] - before[K.PROPS]),
            "restarts": int(self.S[K.RESTARTS] - before[K.RESTARTS]),
        }
        if code == K.SAT:
            model = np.zeros(self.num_vars + 1, dtype=bool)
            model[1:] = self.assign[: self.num_vars] == 1
            self._cancel(0)
            flat, offsets = self._original()
            if not check_model(flat, offsets, model) or not all(
                    model[abs(a)] == (a > 0) for a in assumptions):
                raise ModelVerificationError("embedded solver produced a non-satisfying model")
            stats["time"] = time.perf_counter() - t0
            return SolveOutcome(Verdict.SAT, model, stats)
        stats["time"] = time.perf_counter() - t0
        if code == K.UNSAT:
            return SolveOutcome(Verdict.UNSAT, None, stats)
        return SolveOutcome(Verdict.UNKNOWN, None, stats)


def solve(cnf, assumptions=(), seed: int | None = 0,
          conflict_budget: int | None = DEFAULT_CONFLICT_BUDGET,
          time_budget: float | None = None) -> SolveOutcome:
    """One-shot solve of a :class:`~tbnsat.encoder.CnfInstance` (or list of clauses)."""
    s = CdclSolver(seed=seed, conflict_budget=conflict_budget, time_budget=time_budget)
    if hasattr(cnf, "flat"):
        s.ensure_vars(cnf.num_vars)
        s.add_clauses_csr(cnf.flat, cnf.offsets)
    else:
        clauses = list(cnf)
        nv = max((abs(l) for c in clauses for l in c), default=0)
        s.ensure_vars(nv)
        s.add_clauses(clauses)
    return s.solve(assumptions)
