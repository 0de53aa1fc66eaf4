"""Core TBN types: site types, monomers, networks and configurations.

Sites are addressed by a dense global id (monomer-major order).  A
configuration is a set of site-id pairs; polymers are the connected
components of the monomer graph induced by inter-monomer pairs.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

_NAME_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-']*$")


class TbnError(ValueError):
    """Raised for structurally invalid TBNs or out-of-range references."""


@dataclass(frozen=True, order=True)
class SiteType:
    name: str
    starred: bool = False

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise TbnError(f"invalid site name {self.name!r}")

    def complement(self) -> SiteType:
        return SiteType(self.name, not self.starred)

    @classmethod
    def parse(cls, token: str) -> SiteType:
        if token.endswith("*"):
            return cls(token[:-1], True)
        return cls(token, False)

    def __str__(self):
        return self.name + ("*" if self.starred else "")


def complement(t: SiteType) -> SiteType:
    return t.complement()


def _as_site(x) -> SiteType:
    if isinstance(x, SiteType):
        return x
    return SiteType.parse(str(x))


@dataclass(frozen=True)
class Monomer:
    sites: tuple[SiteType, ...]
    label: str | None = None
    id: int = -1

    def __post_init__(self):
        if not self.sites:
            raise TbnError("monomer must have at least one site")

    def __str__(self):
        body = " ".join(str(s) for s in self.sites)
        return f"{self.label}: {body}" if self.label else body


class Tbn:
    """An ordered multiset of monomers.

    Monomer order is the canonical ordering used by the encoder.  Duplicate
    monomers are distinct instances.  With ``strict=True`` monomers carrying
    both a site type and its complement are rejected.
    """

    def __init__(self, monomers: Iterable = (), strict: bool = False):
        ms = []
        for i, m in enumerate(monomers):
            if isinstance(m, Monomer):
                ms.append(Monomer(m.sites, m.label, i))
            else:
                ms.append(Monomer(tuple(_as_site(s) for s in m), None, i))
        self.monomers: tuple[Monomer, ...] = tuple(ms)
        self.strict = strict

        site_type, site_monomer, site_slot, per_monomer = [], [], [], []
        for m in self.monomers:
            ids = []
            for slot, s in enumerate(m.sites):
                ids.append(len(site_type))
                site_type.append(s)
                site_monomer.append(m.id)
                site_slot.append(slot)
            per_monomer.append(tuple(ids))
        self.site_type: tuple[SiteType, ...] = tuple(site_type)
        self.site_monomer: tuple[int, ...] = tuple(site_monomer)
        self.site_slot: tuple[int, ...] = tuple(site_slot)
        self.monomer_sites: tuple[tuple[int, ...], ...] = tuple(per_monomer)
        self.type_counts: Counter = Counter(site_type)

        if strict:
            for m in self.monomers:
                own = set(m.sites)
                if any(s.complement() in own for s in own):
                    raise TbnError(f"monomer {m.id} is self-complementary (strict mode)")

        by_type: dict[SiteType, list[int]] = {}
        for sid, t in enumerate(self.site_type):
            by_type.setdefault(t, []).append(sid)
        self._sites_by_type = {t: tuple(v) for t, v in by_type.items()}

    @classmethod
    def from_lists(cls, monomers: Iterable[Iterable], labels: Sequence | None = None, strict=False) -> Tbn:
        labels = list(labels) if labels is not None else None
        ms = []
        for i, m in enumerate(monomers):
            lab = labels[i] if labels else None
            ms.append(Monomer(tuple(_as_site(s) for s in m), lab))
        return cls(ms, strict=strict)

    def __len__(self):
        return len(self.monomers)

    @property
    def n(self) -> int:
        return len(self.monomers)

    @property
    def num_sites(self) -> int:
        return len(self.site_type)

    def __eq__(self, other):
        if not isinstance(other, Tbn):
            return NotImplemented
        return [(m.sites, m.label) for m in self.monomers] == [(m.sites, m.label) for m in other.monomers]

    def __hash__(self):
        return hash(tuple((m.sites, m.label) for m in self.monomers))

    def __repr__(self):
        inner = ", ".join("{" + ", ".join(map(str, m.sites)) + "}" for m in self.monomers)
        return f"Tbn({{{inner}}})"

    def site_ref(self, sid: int) -> str:
        return f"{self.site_monomer[sid]}.{self.site_slot[sid]}"

    def sites_of_type(self, t: SiteType) -> tuple[int, ...]:
        return self._sites_by_type.get(t, ())

    def monomer_label(self, m: int) -> str:
        lab = self.monomers[m].label
        return lab if lab is not None else str(m)

    def find_monomer(self, key) -> int:
        """Resolve a monomer by 0-based index or by unique label.

        Strings that are not labels may also name a monomer by its site
        multiset, e.g. ``"e f"``; this must match exactly one instance up to
        multiplicity of identical copies (the first copy is returned).
        """
        if isinstance(key, int):
            if not 0 <= key < self.n:
                raise TbnError(f"monomer index {key} out of range")
            return key
        key = str(key).strip()
        hits = [m.id for m in self.monomers if m.label == key]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise TbnError(f"label {key!r} is ambiguous ({len(hits)} monomers); select by index")
        if key.lstrip("-").isdigit():
            return self.find_monomer(int(key))
        want = Counter(_as_site(tok) for tok in key.replace(",", " ").split())
        hits = [m.id for m in self.monomers if Counter(m.sites) == want]
        if not hits:
            raise TbnError(f"no monomer matches {key!r}")
        return hits[0]

    def reordered(self, order: Sequence[int]) -> Tbn:
        if sorted(order) != list(range(self.n)):
            raise TbnError("order must be a permutation of monomer ids")
        return Tbn([self.monomers[i] for i in order], strict=self.strict)


def limiting_site_types(tbn: Tbn) -> set[SiteType]:
    """Site types present in ``tbn`` whose complement occurs at least as often."""
    counts = tbn.type_counts
    return {t for t, c in counts.items() if counts.get(t.complement(), 0) >= c}


def limiting_sites(tbn: Tbn) -> list[int]:
    lim = limiting_site_types(tbn)
    return [sid for sid, t in enumerate(tbn.site_type) if t in lim]


def compatible_sites(tbn: Tbn, s: int) -> list[int]:
    """All site instances complementary to site ``s``, including ones on its own monomer."""
    if not 0 <= s < tbn.num_sites:
        raise TbnError(f"site id {s} out of range")
    return list(tbn.sites_of_type(tbn.site_type[s].complement()))


@dataclass(frozen=True)
class Configuration:
    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = frozenset((a, b) if a <= b else (b, a) for a, b in self.pairs)
        object.__setattr__(self, "pairs", norm)

    def __len__(self):
        return len(self.pairs)

    def partner_map(self) -> dict[int, int]:
        out = {}
        for a, b in self.pairs:
            out[a] = b
            out[b] = a
        return out


def is_valid_configuration(tbn: Tbn, c: Configuration) -> bool:
    seen = set()
    for a, b in c.pairs:
        if not (0 <= a < tbn.num_sites and 0 <= b < tbn.num_sites):
            return False
        if a == b or a in seen or b in seen:
            return False
        if tbn.site_type[a].complement() != tbn.site_type[b]:
            return False
        seen.add(a)
        seen.add(b)
    return True


def is_saturated(tbn: Tbn, c: Configuration) -> bool:
    """Saturation via the limiting-site criterion: every limiting site is paired."""
    paired = {s for p in c.pairs for s in p}
    return all(s in paired for s in limiting_sites(tbn))


def is_maximal_matching(tbn: Tbn, c: Configuration) -> bool:
    """Direct maximality: no two unpaired complementary sites remain."""
    paired = {s for p in c.pairs for s in p}
    free_types = Counter(tbn.site_type[s] for s in range(tbn.num_sites) if s not in paired)
    return not any(free_types.get(t.complement(), 0) for t in free_types)


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass(frozen=True)
class PolymerPartition:
    groups: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.groups)

    def group_of(self, m: int) -> tuple[int, ...]:
        for g in self.groups:
            if m in g:
                return g
        raise TbnError(f"monomer {m} not in partition")


def polymers(tbn: Tbn, c: Configuration) -> PolymerPartition:
    dsu = _DSU(tbn.n)
    for a, b in c.pairs:
        ma, mb = tbn.site_monomer[a], tbn.site_monomer[b]
        if ma != mb:
            dsu.union(ma, mb)
    groups: dict[int, list[int]] = {}
    for m in range(tbn.n):
        groups.setdefault(dsu.find(m), []).append(m)
    return PolymerPartition(tuple(tuple(g) for g in sorted(groups.values())))


def is_free(tbn: Tbn, c: Configuration, m: int) -> bool:
    """True when monomer ``m`` is bound to no other monomer in ``c``."""
    for a, b in c.pairs:
        ma, mb = tbn.site_monomer[a], tbn.site_monomer[b]
        if ma != mb and m in (ma, mb):
            return False
    return True


def remove_monomer(tbn: Tbn, m: int) -> Tbn:
    if not 0 <= m < tbn.n:
        raise TbnError(f"monomer index {m} out of range")
    return Tbn([x for x in tbn.monomers if x.id != m], strict=tbn.strict)
