"""Decision procedures built on the encoder and the SAT layer.

``TbnSession`` keeps one incremental solver per TBN: the counter is built
for every bound up to ``n`` and each query only changes the assumptions
(the bound literal plus, for free-monomer queries, the negated Pair
literals of that monomer).  Learned clauses carry over between queries.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .encoder import Encoding, decode_model, encode_polymer_count, encode_query, encode_saturation, to_dimacs
from .model import Configuration, Tbn, TbnError, is_free, is_saturated, polymers, remove_monomer
from .sat import DEFAULT_CONFLICT_BUDGET, CdclSolver, SolverError, Verdict, solve_external

log = logging.getLogger(__name__)


class SolverBudgetExceeded(SolverError):
    """The solver gave up (conflict or time budget) without a verdict."""


@dataclass
class QueryResult:
    stable_polymer_count: int
    free_verdict: bool | None = None
    witness: Configuration | None = None
    method: str = ""
    monomer: int | None = None
    stats: dict = field(default_factory=dict)


def _merge_stats(acc: dict, stats: dict):
    acc["solver_calls"] = acc.get("solver_calls", 0) + 1
    for key in ("conflicts", "decisions", "propagations", "time"):
        if key in stats:
            acc[key] = acc.get(key, 0) + stats[key]


class TbnSession:
    """Answers ``exists(k, free)`` queries for one TBN."""

    def __init__(self, tbn: Tbn, order=None, seed: int | None = 0,
                 conflict_budget: int | None = DEFAULT_CONFLICT_BUDGET,
                 time_budget: float | None = None, solver_cmd: str | None = None):
        self.tbn = tbn
        self.order = order
        self.seed = seed
        self.conflict_budget = conflict_budget
        self.time_budget = time_budget
        self.solver_cmd = solver_cmd
        self.stats: dict = {}
        self._enc: Encoding | None = None
        self._solver: CdclSolver | None = None

    def _ensure_embedded(self):
        if self._solver is None:
            enc = encode_saturation(self.tbn, order=self.order)
            encode_polymer_count(self.tbn, self.tbn.n, enc, incremental=True)
            cnf = enc.cnf()
            s = CdclSolver(seed=self.seed, conflict_budget=self.conflict_budget, time_budget=self.time_budget)
            s.ensure_vars(cnf.num_vars)
            s.add_clauses_csr(cnf.flat, cnf.offsets)
            self._enc, self._solver = enc, s

    def exists(self, k: int, free: int | None = None) -> Configuration | None:
        """A saturated configuration with ``>= k`` polymers (and ``free`` unbound), or None."""
        t = self.tbn
        if k < 1:
            raise ValueError("k must be at least 1")
        if free is not None and not 0 <= free < t.n:
            raise TbnError(f"monomer index {free} out of range")
        if k > t.n:
            return None
        if self.solver_cmd:
            enc = encode_query(t, k, free=free, order=self.order)
            out = solve_external(to_dimacs(enc.cnf(), enc.vm, t), self.solver_cmd, timeout=self.time_budget)
        else:
            self._ensure_embedded()
            enc = self._enc
            assumptions = [enc.count_literal(k)]
            if free is not None:
                assumptions.extend(enc.free_literals(free))
            out = self._solver.solve(assumptions)
        _merge_stats(self.stats, out.stats)
        if out.verdict is Verdict.UNKNOWN:
            raise SolverBudgetExceeded(f"solver budget exhausted on k={k}")
        if out.verdict is Verdict.UNSAT:
            return None
        conf = decode_model(enc, out.model)
        got = len(polymers(t, conf))
        if got < k or (free is not None and not is_free(t, conf, free)):
            raise SolverError(f"witness does not meet the query (polymers={got}, k={k}, free={free})")
        return conf


def _session(t: Tbn, session: TbnSession | None, **kw) -> TbnSession:
    if session is not None:
        return session
    return TbnSession(t, **kw)


def saturated_config_exists(t: Tbn, k: int, free: int | None = None, session: TbnSession | None = None,
                            **kw) -> Configuration | None:
    return _session(t, session, **kw).exists(k, free)


def stable_polymer_count(t: Tbn, session: TbnSession | None = None, batch: bool = False,
                         **kw) -> tuple[int, Configuration]:
    """``S(T)`` and a stable witness, by binary search over the bound."""
    if t.n == 0:
        return 0, Configuration()
    if batch:
        return _stable_count_batch(t, **kw)
    sess = _session(t, session, **kw)
    best = sess.exists(1)
    if best is None:
        raise SolverError("no saturated configuration found; this cannot happen")
    lo, hi = len(polymers(t, best)), t.n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        conf = sess.exists(mid)
        if conf is None:
            hi = mid - 1
        else:
            best = conf
            lo = len(polymers(t, conf))
    return lo, best


def _run_batch(t: Tbn, queries, workers: int | None = None, **kw):
    # independent one-shot sessions so calls can run concurrently (numba kernels release the GIL)
    def run(q):
        k, free = q
        return TbnSession(t, **kw).exists(k, free)

    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run, queries))


def _stable_count_batch(t: Tbn, workers: int | None = None, **kw):
    ks = list(range(1, t.n + 1))
    results = _run_batch(t, [(k, None) for k in ks], workers, **kw)
    found = [(k, c) for k, c in zip(ks, results) if c is not None]
    k, conf = found[-1]
    return k, conf


def can_be_free(t: Tbn, m: int, session: TbnSession | None = None, **kw) -> bool:
    """Whether ``m`` is free in some saturated configuration.

    Always decided by the SAT query.  "No limiting site on ``m``" is not a
    sufficient test: in ``{a*},{a*},{a},{a},{a a},{a},{a* a*}`` the monomer
    ``{a a}`` carries only non-limiting sites, yet without it three ``a``
    sites remain for four limiting ``a*`` sites.
    """
    if not 0 <= m < t.n:
        raise TbnError(f"monomer index {m} out of range")
    return _session(t, session, **kw).exists(1, free=m) is not None


def stably_free(t: Tbn, m: int, session: TbnSession | None = None, **kw) -> QueryResult:
    """Two-query method: ``m`` can be free and ``S(T - m) >= S(T) - 1``."""
    if not 0 <= m < t.n:
        raise TbnError(f"monomer index {m} out of range")
    sess = _session(t, session, **kw)
    s_full, stable = stable_polymer_count(t, sess)
    verdict = False
    witness = stable
    stats = sess.stats
    if can_be_free(t, m, sess):
        reduced = remove_monomer(t, m)
        sub = TbnSession(reduced, seed=sess.seed, conflict_budget=sess.conflict_budget,
                         time_budget=sess.time_budget, solver_cmd=sess.solver_cmd)
        s_reduced, _ = stable_polymer_count(reduced, sub)
        for key, val in sub.stats.items():
            stats[key] = stats.get(key, 0) + val
        verdict = s_reduced >= s_full - 1
        if verdict:
            witness = sess.exists(s_full, free=m)
            if witness is None:
                raise SolverError("stably free but no stable witness with the monomer free")
    return QueryResult(s_full, verdict, witness, "two-query", m, dict(stats))


def stably_free_direct(t: Tbn, m: int, session: TbnSession | None = None, **kw) -> QueryResult:
    """Direct method: compute ``S(T)`` then ask for a stable configuration with ``m`` free."""
    if not 0 <= m < t.n:
        raise TbnError(f"monomer index {m} out of range")
    sess = _session(t, session, **kw)
    s_full, stable = stable_polymer_count(t, sess)
    conf = sess.exists(s_full, free=m)
    return QueryResult(s_full, conf is not None, conf if conf is not None else stable, "direct", m,
                       dict(sess.stats))


def stably_free_batch(t: Tbn, m: int, workers: int | None = None, **kw) -> QueryResult:
    """All ``A(T,k)`` and ``F(T,m,k)`` queries issued at once, for ``k = 1..n``."""
    if not 0 <= m < t.n:
        raise TbnError(f"monomer index {m} out of range")
    ks = list(range(1, t.n + 1))
    qs = [(k, None) for k in ks] + [(k, m) for k in ks]
    res = _run_batch(t, qs, workers, **kw)
    a, f = res[: len(ks)], res[len(ks):]
    s_full = max(k for k, c in zip(ks, a) if c is not None)
    verdict = not any(a[i] is not None and f[i] is None for i in range(len(ks)))
    witness = f[s_full - 1] if verdict else a[s_full - 1]
    return QueryResult(s_full, verdict, witness, "batch", m, {"solver_calls": len(qs)})


def check_witness(t: Tbn, conf: Configuration, k: int) -> bool:
    return is_saturated(t, conf) and len(polymers(t, conf)) == k
