"""Text formats: permutation group specs, corpus manifests, and report rows.

Permutation group spec (one logical line, ``#`` starts a comment line)::

    perm deg=8 gens=(1,2,3) (2,3,4,5,6,7,8)

Manifest: one entry per line, ``name<TAB>kind<TAB>source`` where kind is
``family`` (a family spec such as ``wreath(symmetric(4), 2)``), ``builtin``
(a corpus name, or a family spec), ``perm`` (an inline permutation spec) or
``table`` (path to a table file, relative to the manifest).  Directive lines
``@seed<TAB>n`` and ``@cap<TAB>name<TAB>value`` set the global seed and cap
overrides.  Blank lines and lines starting with ``#`` are ignored.
"""

import csv
import dataclasses
import io
import os
import re

from . import construct
from .chain import GeneratedGroup
from .config import CAPS
from .errors import ParseError
from .permutation import parse_generators
from .table_group import parse_table

_PERM_HEAD = re.compile(r"perm\s+deg\s*=\s*(\d+)\s+gens\s*=\s*")


def parse_perm_spec(text):
    """Parse ``perm deg=<n> gens=<generators>`` into a GeneratedGroup."""
    body = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if body is not None:
            raise ParseError("unexpected extra line after the group spec", lineno, 1)
        body = (lineno, line)
    if body is None:
        raise ParseError("empty group spec", 1, 1)
    lineno, line = body
    lead = len(line) - len(line.lstrip())
    m = _PERM_HEAD.match(line, lead)
    if not m:
        raise ParseError("expected 'perm deg=<n> gens=<generators>'", lineno, lead + 1)
    degree = int(m.group(1))
    if degree < 1:
        raise ParseError("degree must be positive", lineno, m.start(1) + 1)
    rest = line[m.end():]
    try:
        gens = parse_generators(rest, degree, lineno)
    except ParseError as exc:
        col = exc.column + m.end() if exc.column is not None else None
        raise type(exc)(exc.message, lineno, col) from None
    return GeneratedGroup(gens, degree)


def format_perm_spec(group):
    gens = " ".join(str(g) for g in group.generators) or "()"
    return f"perm deg={group.degree} gens={gens}\n"


def load_group_text(text):
    """A permutation spec or a table file, told apart by the first meaningful line."""
    first = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")), "")
    if first.isdigit():
        return parse_table(text).to_generated()
    return parse_perm_spec(text)


@dataclasses.dataclass
class ManifestEntry:
    name: str
    kind: str
    source: str
    line: int


@dataclasses.dataclass
class CorpusManifest:
    entries: list
    seed: int = None
    caps: dict = dataclasses.field(default_factory=dict)
    base_dir: str = "."


KINDS = ("family", "builtin", "perm", "table")


def parse_manifest(text, base_dir="."):
    entries = []
    seed = None
    caps = {}
    names = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.rstrip("\r\n").split("\t")
        if cols[0] == "@seed":
            if len(cols) != 2 or not cols[1].strip().lstrip("-").isdigit():
                raise ParseError("expected '@seed<TAB><integer>'", lineno, 1)
            seed = int(cols[1])
            continue
        if cols[0] == "@cap":
            if len(cols) != 3 or not hasattr(CAPS, cols[1]) or not cols[2].strip().isdigit():
                raise ParseError("expected '@cap<TAB><cap name><TAB><integer>'", lineno, 1)
            caps[cols[1]] = int(cols[2])
            continue
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(cols)}", lineno, 1)
        name, kind, source = (c.strip() for c in cols)
        if not name:
            raise ParseError("empty entry name", lineno, 1)
        if name in names:
            raise ParseError(f"duplicate entry name {name!r}", lineno, 1)
        if kind not in KINDS:
            raise ParseError(f"unknown source kind {kind!r}", lineno, len(cols[0]) + 2)
        names.add(name)
        entries.append(ManifestEntry(name, kind, source, lineno))
    return CorpusManifest(entries, seed, caps, base_dir)


def read_manifest(path):
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh.read(), os.path.dirname(os.path.abspath(path)))


def builtin_manifest(extended=False):
    return CorpusManifest([ManifestEntry(n, "family", s, i) for i, (n, s) in enumerate(construct.corpus_specs(extended), 1)])


def format_manifest(manifest):
    lines = []
    if manifest.seed is not None:
        lines.append(f"@seed\t{manifest.seed}")
    for k, v in sorted(manifest.caps.items()):
        lines.append(f"@cap\t{k}\t{v}")
    lines += [f"{e.name}\t{e.kind}\t{e.source}" for e in manifest.entries]
    return "\n".join(lines) + "\n"


def build_entry(entry, base_dir="."):
    """Construct the group of a manifest entry; parse errors carry the manifest line."""
    try:
        if entry.kind == "family":
            return construct.build(entry.source)
        if entry.kind == "builtin":
            corpus = dict(construct.corpus_specs(extended=True))
            return construct.build(corpus.get(entry.source, entry.source))
        if entry.kind == "perm":
            return parse_perm_spec(entry.source)
        path = entry.source if os.path.isabs(entry.source) else os.path.join(base_dir, entry.source)
        with open(path, encoding="utf-8") as fh:
            return parse_table(fh.read()).to_generated()
    except ParseError as exc:
        raise ParseError(f"entry {entry.name!r}: {exc}", entry.line, exc.column) from None


# -- report rows --

CSV_COLUMNS = (
    "name", "order", "radical_order", "path", "subgroup_order", "class",
    "threshold_log2", "size_log2", "margin_log2", "certificate_ok", "seed",
)


def csv_row(values):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(["" if v is None else v for v in values])
    return buf.getvalue()
