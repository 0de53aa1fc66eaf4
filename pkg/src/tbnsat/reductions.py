"""Instance generators: exact-cover gadgets, graph templates, binary trees.

Also holds the brute-force graph and exact-cover checkers used to test
the generated instances at small scale.
"""
from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass

from .model import Monomer, SiteType, Tbn, TbnError

_IDENT = re.compile(r"^[A-Za-z0-9_]+$")


# ------------------------------------------------------------------ exact cover


@dataclass(frozen=True)
class ExactCoverInstance:
    sets: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        norm = []
        for s in self.sets:
            s = tuple(sorted(set(s)))
            if not s:
                raise ValueError("exact-cover sets must be non-empty")
            for e in s:
                if not _IDENT.match(e):
                    raise ValueError(f"element name {e!r} is not an identifier")
            norm.append(s)
        if not norm:
            raise ValueError("exact-cover instance needs at least one set")
        object.__setattr__(self, "sets", tuple(norm))

    @property
    def universe(self) -> tuple[str, ...]:
        return tuple(sorted({e for s in self.sets for e in s}))

    @property
    def flattened(self) -> Counter:
        return Counter(e for s in self.sets for e in s)

    def surplus(self) -> Counter:
        """The multiset X' - Y."""
        return self.flattened - Counter(self.universe)


def parse_sets(text: str) -> ExactCoverInstance:
    """``"a,b;b,c;c"`` -> {{a,b},{b,c},{c}}."""
    sets = [tuple(e.strip() for e in part.split(",") if e.strip()) for part in text.split(";") if part.strip()]
    return ExactCoverInstance(tuple(sets))


def has_exact_cover(x: ExactCoverInstance) -> bool:
    target = set(x.universe)
    sets = [set(s) for s in x.sets]
    for r in range(1, len(sets) + 1):
        for combo in itertools.combinations(sets, r):
            if sum(len(s) for s in combo) == len(target) and set().union(*combo) == target:
                return True
    return False


def exact_cover_to_tbn(x: ExactCoverInstance, j: int = 2) -> Tbn:
    """``T_j(X)``: ``j-1`` disjoint copies of ``T(X)`` sharing one merged surplus monomer.

    For ``j == 2`` site names are the element names; for larger ``j`` copy
    ``c`` renames element ``e`` to ``c_e``.  When the surplus ``X' - Y`` is
    empty its monomer still exists and carries a single inert ``pad`` site.
    """
    if j < 2:
        raise ValueError("j must be at least 2")
    copies = list(range(1, j))

    def name(c, e):
        return e if j == 2 else f"{c}_{e}"

    ms = []
    for s in x.sets:
        for c in copies:
            ms.append(Monomer(tuple(SiteType(name(c, e)) for e in s)))
    for c in copies:
        ms.append(Monomer(tuple(SiteType(name(c, e), True) for e in x.universe),
                          "Y" if j == 2 else f"Y{c}"))
    surplus = x.surplus()
    sites = [SiteType(name(c, e), True) for c in copies for e in sorted(surplus.elements())]
    if not sites:
        sites = [SiteType("pad")]
    ms.append(Monomer(tuple(sites), "surplus"))
    return Tbn(ms)


def random_exact_cover(rng: random.Random, max_sets: int = 4, max_elems: int = 5,
                       cover: bool | None = None) -> ExactCoverInstance:
    """Random instance; with ``cover`` set, resample until ``has_exact_cover`` matches it."""
    while True:
        elems = [chr(ord("a") + i) for i in range(rng.randint(1, max_elems))]
        sets = []
        for _ in range(rng.randint(1, max_sets)):
            size = rng.randint(1, len(elems))
            sets.append(tuple(rng.sample(elems, size)))
        x = ExactCoverInstance(tuple(sets))
        if cover is None or has_exact_cover(x) == cover:
            return x


# ------------------------------------------------------------------ graphs


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        vs = tuple(dict.fromkeys(self.vertices))
        vset = set(vs)
        es = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in vset or v not in vset:
                raise ValueError(f"edge {u}-{v} references an unknown vertex")
            es.add((u, v) if vs.index(u) < vs.index(v) else (v, u))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", tuple(sorted(es, key=lambda e: (vs.index(e[0]), vs.index(e[1])))))

    @classmethod
    def from_edges(cls, edges, vertices=()) -> Graph:
        vs = list(vertices)
        for u, v in edges:
            for w in (u, v):
                if w not in vs:
                    vs.append(w)
        return cls(tuple(vs), tuple(edges))

    def neighbors(self, v) -> set:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def is_independent(self, subset) -> bool:
        s = set(subset)
        return not any(a in s and b in s for a, b in self.edges)

    def is_cover(self, subset) -> bool:
        s = set(subset)
        return all(a in s or b in s for a, b in self.edges)


def parse_edges(text: str) -> Graph:
    """``"a-b,b-c"`` -> path graph."""
    edges = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        u, sep, v = part.partition("-")
        if not sep:
            raise ValueError(f"bad edge {part!r}; expected u-v")
        edges.append((u.strip(), v.strip()))
    return Graph.from_edges(edges)


def maximum_independent_sets(g: Graph) -> list[frozenset]:
    for r in range(len(g.vertices), -1, -1):
        found = [frozenset(c) for c in itertools.combinations(g.vertices, r) if g.is_independent(c)]
        if found:
            return found
    return []


def minimum_vertex_covers(g: Graph) -> list[frozenset]:
    for r in range(len(g.vertices) + 1):
        found = [frozenset(c) for c in itertools.combinations(g.vertices, r) if g.is_cover(c)]
        if found:
            return found
    return []


def mis_size(g: Graph) -> int:
    return len(maximum_independent_sets(g)[0])


def in_some_mis(g: Graph, v) -> bool:
    return any(v in s for s in maximum_independent_sets(g))


def in_some_min_vc(g: Graph, v) -> bool:
    return any(v in s for s in minimum_vertex_covers(g))


def graph_mis_to_tbn(g: Graph) -> tuple[Tbn, dict]:
    """Template monomer of all edges plus one monomer per vertex of its complemented incident edges.

    Isolated vertices get a single inert site so their monomer is non-empty.
    """
    if not g.edges:
        raise ValueError("graph must have at least one edge")
    edge_site = {e: SiteType(f"e{i}") for i, e in enumerate(g.edges)}
    ms = [Monomer(tuple(edge_site[e] for e in g.edges), "template")]
    vmap = {}
    for idx, v in enumerate(g.vertices):
        sites = [edge_site[e].complement() for e in g.edges if v in e]
        if not sites:
            sites = [SiteType(f"iso{idx}")]
        label = f"v_{v}" if _IDENT.match(str(v)) else f"v{idx}"
        vmap[v] = len(ms)
        ms.append(Monomer(tuple(sites), label))
    return Tbn(ms), vmap


def vc_member_to_mis_member(g: Graph, target) -> tuple[Graph, str]:
    """Doubled graph plus a new vertex adjacent to ``target`` and its copy.

    ``target`` lies in some minimum vertex cover of ``g`` iff the returned
    vertex lies in some maximum independent set of the returned graph.
    """
    if target not in g.vertices:
        raise ValueError(f"unknown vertex {target!r}")
    taken = set(map(str, g.vertices))

    def fresh(base):
        name = base
        while name in taken:
            name += "_"
        taken.add(name)
        return name

    dup = {v: fresh(f"{v}_dup") for v in g.vertices}
    hub = fresh("hub")
    edges = list(g.edges)
    edges += [(dup[u], dup[v]) for u, v in g.edges]
    edges += [(u, dup[v]) for u, v in g.edges]
    edges += [(v, dup[u]) for u, v in g.edges]
    edges += [(hub, target), (hub, dup[target])]
    vertices = tuple(g.vertices) + tuple(dup[v] for v in g.vertices) + (hub,)
    return Graph(vertices, tuple(edges)), hub


def connected_graphs(max_vertices: int = 5):
    """All connected graphs with 2..max_vertices vertices, up to isomorphism (networkx atlas)."""
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    out = []
    for h in graph_atlas_g():
        n = h.number_of_nodes()
        if n < 2 or n > max_vertices or h.number_of_edges() == 0 or not nx.is_connected(h):
            continue
        names = [chr(ord("a") + i) for i in range(n)]
        out.append(Graph(tuple(names), tuple((names[u], names[v]) for u, v in h.edges())))
    return out


# ------------------------------------------------------------------ trees


def tree_tbn(n: int, order: str = "level", seed: int = 0) -> Tbn:
    """Binary-tree family with ``2^n - 1`` monomers and a unique site per monomer.

    The monomer at depth ``d`` (site level ``L = n-1-d``) is
    ``{dL, dL, d(L+1)*, m<i>}``.  ``order="level"`` puts the root first and
    each level before the next; ``"leaves-first"`` reverses that and
    ``"shuffled"`` permutes randomly with ``seed``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ms = []
    uid = 0
    for depth in range(n):
        lvl = n - 1 - depth
        for _ in range(2 ** depth):
            ms.append(Monomer((SiteType(f"d{lvl + 1}", True), SiteType(f"d{lvl}"), SiteType(f"d{lvl}"),
                               SiteType(f"m{uid}"))))
            uid += 1
    if order == "level":
        pass
    elif order == "leaves-first":
        ms.reverse()
    elif order == "shuffled":
        random.Random(seed).shuffle(ms)
    else:
        raise ValueError(f"unknown tree order {order!r}")
    return Tbn(ms)
