"""Line-oriented TBN text format and the JSON result format.

One monomer per line::

    # comment
    3x in_x: x x x      # three identical instances labeled in_x
    b* c* a a

A site is an identifier with an optional trailing ``*`` marking the
complement.  The ``star[x]`` notation is not accepted; write ``x*``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

from .model import Configuration, Monomer, SiteType, Tbn, TbnError, polymers

SCHEMA_VERSION = 1

_COUNT_RE = re.compile(r"^(\d+)x$")
_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-']*$")
_SITE_RE = re.compile(r"^([A-Za-z0-9_][A-Za-z0-9_.\-']*)(\*?)$")


class TbnParseError(TbnError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass(frozen=True)
class TbnDocument:
    source: str
    tbn: Tbn
    lines: tuple[int, ...]  # 1-based source line for each monomer


def parse_document(text: str, strict: bool = False) -> TbnDocument:
    monomers, lines = [], []
    labels_seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        count = 1
        head, sep, rest = line.partition(" ")
        m = _COUNT_RE.match(head)
        if m:
            count = int(m.group(1))
            if count <= 0:
                raise TbnParseError("monomer count must be positive", lineno)
            line = rest.strip()
        elif re.match(r"^-?\d+x$", head):
            raise TbnParseError(f"invalid count {head!r}", lineno)

        label = None
        if ":" in line:
            lab, _, line = line.partition(":")
            lab = lab.strip()
            if not _LABEL_RE.match(lab):
                raise TbnParseError(f"invalid label {lab!r}", lineno)
            if lab in labels_seen:
                raise TbnParseError(f"duplicate label {lab!r} (first on line {labels_seen[lab]})", lineno)
            labels_seen[lab] = lineno
            label = lab

        tokens = line.split()
        if not tokens:
            raise TbnParseError("monomer has no sites", lineno)
        sites = []
        for tok in tokens:
            sm = _SITE_RE.match(tok)
            if not sm:
                raise TbnParseError(f"malformed site token {tok!r}", lineno)
            sites.append(SiteType(sm.group(1), bool(sm.group(2))))
        for _ in range(count):
            monomers.append(Monomer(tuple(sites), label))
            lines.append(lineno)
    return TbnDocument(text, Tbn(monomers, strict=strict), tuple(lines))


def parse_tbn(text: str, strict: bool = False) -> Tbn:
    return parse_document(text, strict=strict).tbn


def read_tbn(path, strict: bool = False) -> Tbn:
    with open(path, encoding="utf-8") as fh:
        return parse_tbn(fh.read(), strict=strict)


def serialize_tbn(t: Tbn) -> str:
    # Labels that repeat are collapsed into an Nx prefix so the text stays parseable.
    out = []
    i = 0
    ms = t.monomers
    while i < len(ms):
        m = ms[i]
        body = " ".join(str(s) for s in m.sites)
        if m.label is None:
            out.append(body)
            i += 1
            continue
        j = i
        while j < len(ms) and ms[j].label == m.label and ms[j].sites == m.sites:
            j += 1
        prefix = f"{j - i}x " if j - i > 1 else ""
        out.append(f"{prefix}{m.label}: {body}")
        i = j
    return "".join(line + "\n" for line in out)


def _monomer_ref(t: Tbn, m: int):
    return t.monomers[m].label if t.monomers[m].label is not None else m


def result_dict(tbn: Tbn, result) -> dict:
    """Build the JSON-ready dict for a query result (see ``schema/result.schema.json``)."""
    witness: Configuration | None = result.witness
    if witness is not None:
        groups = polymers(tbn, witness).groups
        pairs = sorted(witness.pairs)
    else:
        groups, pairs = (), []
    d = {
        "schema_version": SCHEMA_VERSION,
        "stable_polymer_count": int(result.stable_polymer_count),
        "monomer_free": result.free_verdict,
        "polymers": [[_monomer_ref(tbn, m) for m in g] for g in groups],
        "polymer_sites": [
            [[str(s) for s in tbn.monomers[m].sites] for m in g] for g in groups
        ],
        "pairs": [[tbn.site_ref(a), tbn.site_ref(b)] for a, b in pairs],
    }
    if getattr(result, "method", None):
        d["method"] = result.method
    if getattr(result, "monomer", None) is not None:
        d["monomer"] = _monomer_ref(tbn, result.monomer)
    return d


def emit_result_json(tbn: Tbn, result, indent: int | None = 2) -> str:
    return json.dumps(result_dict(tbn, result), indent=indent)


def result_schema() -> dict:
    text = resources.files("tbnsat").joinpath("schema/result.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def parse_site_ref(ref: str) -> tuple[int, int]:
    m, _, slot = ref.partition(".")
    return int(m), int(slot)
