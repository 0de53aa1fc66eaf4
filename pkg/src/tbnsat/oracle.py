"""Exhaustive ground truth for small TBNs.

Deliberately naive: configurations are enumerated one by one and every
answer is computed from the enumeration.  Configurations are distinguished
by which site instances pair, so identical monomers are not quotiented.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterator

from .model import (
    Configuration,
    Tbn,
    TbnError,
    is_free,
    is_saturated,
    limiting_site_types,
    polymers,
)

DEFAULT_BOUND = 10**7


class OracleBoundExceeded(RuntimeError):
    def __init__(self, estimate: int, bound: int):
        self.estimate = estimate
        self.bound = bound
        super().__init__(f"refusing to enumerate ~{estimate:.3g} configurations (bound {bound:.3g})"
                         if estimate < 10**300 else
                         f"refusing to enumerate more than 10^300 configurations (bound {bound:.3g})")


def _type_pairs(t: Tbn):
    seen = set()
    for ty, c in t.type_counts.items():
        key = (ty.name,)
        if key in seen:
            continue
        seen.add(key)
        p = t.type_counts.get(ty, 0)
        q = t.type_counts.get(ty.complement(), 0)
        yield p, q


def estimate_count(t: Tbn, filter: str = "all") -> int:
    """Closed-form number of configurations (exact, used as the enumeration guard).

    Matchings between different complementary type pairs are independent, so
    the count factorises over site names.
    """
    total = 1
    for p, q in _type_pairs(t):
        lo, hi = min(p, q), max(p, q)
        if filter == "saturated":
            total *= factorial(hi) // factorial(hi - lo)
        else:
            total *= sum(comb(p, i) * comb(q, i) * factorial(i) for i in range(lo + 1))
    return total


def enumerate_configurations(t: Tbn, filter: str = "all", bound: int = DEFAULT_BOUND) -> Iterator[Configuration]:
    """Yield every valid (``filter="all"``) or saturated configuration exactly once."""
    if filter not in ("all", "saturated"):
        raise ValueError(f"unknown filter {filter!r}")
    est = estimate_count(t, filter)
    if bound is not None and est > bound:
        raise OracleBoundExceeded(est, bound)

    lim_types = limiting_site_types(t)
    lim = [s for s in range(t.num_sites) if t.site_type[s] in lim_types]
    cands = {s: [u for u in t.sites_of_type(t.site_type[s].complement()) if u != s] for s in lim}
    used = [False] * t.num_sites
    pairs: list[tuple[int, int]] = []
    allow_unpaired = filter == "all"

    def rec(i):
        while i < len(lim) and used[lim[i]]:
            i += 1
        if i == len(lim):
            yield Configuration(frozenset(pairs))
            return
        s = lim[i]
        used[s] = True
        if allow_unpaired:
            yield from rec(i + 1)
        for u in cands[s]:
            if not used[u]:
                used[u] = True
                pairs.append((s, u))
                yield from rec(i + 1)
                pairs.pop()
                used[u] = False
        used[s] = False

    yield from rec(0)


@dataclass
class EnumerationReport:
    total: int = 0
    saturated: int = 0
    stable: int = 0
    max_polymers: int = 0
    configurations: list = field(default_factory=list)  # (Configuration, saturated, #polymers)


def enumeration_report(t: Tbn, bound: int = DEFAULT_BOUND, keep: int = 0) -> EnumerationReport:
    rep = EnumerationReport()
    counts = []
    for c in enumerate_configurations(t, "all", bound):
        rep.total += 1
        sat = is_saturated(t, c)
        k = len(polymers(t, c))
        if sat:
            rep.saturated += 1
            counts.append(k)
        if len(rep.configurations) < keep:
            rep.configurations.append((c, sat, k))
    if counts:
        rep.max_polymers = max(counts)
        rep.stable = counts.count(rep.max_polymers)
    return rep


def oracle_stable_count(t: Tbn, bound: int = DEFAULT_BOUND) -> tuple[int, int]:
    """Exact ``S(T)`` and the number of saturated configurations attaining it."""
    if t.n == 0:
        return 0, 1
    best, num = 0, 0
    for c in enumerate_configurations(t, "saturated", bound):
        k = len(polymers(t, c))
        if k > best:
            best, num = k, 1
        elif k == best:
            num += 1
    return best, num


def count_saturated(t: Tbn, bound: int = DEFAULT_BOUND) -> int:
    return sum(1 for _ in enumerate_configurations(t, "saturated", bound))


def oracle_saturated_exists(t: Tbn, k: int, free: int | None = None, bound: int = DEFAULT_BOUND) -> bool:
    for c in enumerate_configurations(t, "saturated", bound):
        if len(polymers(t, c)) >= k and (free is None or is_free(t, c, free)):
            return True
    return False


def oracle_can_be_free(t: Tbn, m: int, bound: int = DEFAULT_BOUND) -> bool:
    return oracle_saturated_exists(t, 1, free=m, bound=bound)


def oracle_stably_free(t: Tbn, m: int, bound: int = DEFAULT_BOUND) -> bool:
    if not 0 <= m < t.n:
        raise TbnError(f"monomer index {m} out of range")
    best, free_best = 0, -1
    for c in enumerate_configurations(t, "saturated", bound):
        k = len(polymers(t, c))
        best = max(best, k)
        if is_free(t, c, m):
            free_best = max(free_best, k)
    return free_best == best
