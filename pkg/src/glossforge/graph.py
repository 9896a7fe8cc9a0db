"""Assembly of corpus entries and mapping records into merged concepts.

Entries sharing a QID merge into one concept; unmapped entries become
single-source concepts under a local key.  Cross-links between Chicago
definition pages become directed edges, and the nLab corpus is filtered to
the terms that also appear somewhere else, so that pages about people or
books never reach the final table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .corpora import (
    CHICAGO,
    FRENCH_LEAN,
    MULIMA,
    NLAB,
    CorpusEntry,
    DefinitionPage,
    ProverLink,
    Translations,
    WikiPage,
    slugify,
)
from .errors import GlossforgeError
from .linker import MappingRecord

SCHEMA = "glossforge-graph/1"

# Label priority when corpora disagree on spelling.
LABEL_PRIORITY = (MULIMA, CHICAGO, FRENCH_LEAN, NLAB)


class GraphError(GlossforgeError):
    pass


class MissingMapping(GraphError):
    """A corpus entry has no corresponding MappingRecord."""


def local_key(corpus: str, term: str) -> str:
    return f"local:{corpus}:{slugify(term)}"


@dataclass(frozen=True)
class Concept:
    key: str
    label: str
    entries: tuple[CorpusEntry, ...]
    edges: tuple[str, ...] = ()

    @property
    def qid(self) -> str | None:
        return self.key if self.key.startswith("Q") else None

    def by_corpus(self, corpus: str) -> tuple[CorpusEntry, ...]:
        return tuple(e for e in self.entries if e.corpus == corpus)

    def definition_pages(self) -> tuple[CorpusEntry, ...]:
        return self.by_corpus(CHICAGO)

    def has_non_nlab_payload(self) -> bool:
        return any(e.corpus != NLAB for e in self.entries)

    def has_wiki_page(self) -> bool:
        return any(e.corpus == NLAB for e in self.entries)


@dataclass
class KnowledgeGraph:
    concepts: dict[str, Concept] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)


def _label_for(entries: list[CorpusEntry]) -> str:
    for corpus in LABEL_PRIORITY:
        for entry in entries:
            if entry.corpus != corpus:
                continue
            if corpus == MULIMA and isinstance(entry.payload, Translations):
                english = entry.payload.as_dict().get("en")
                if english:
                    return english
            return entry.term
    return entries[0].term


def assemble(entries: list[CorpusEntry], mappings: list[MappingRecord]) -> KnowledgeGraph:
    """Fold entries and their mapping records into a KnowledgeGraph.

    Single-threaded by design: determinism matters more than speed at this
    scale, and the result is immutable and freely shareable.
    """
    by_term: dict[tuple[str, str], MappingRecord] = {}
    for record in mappings:
        by_term[(record.corpus, record.term)] = record

    grouped: dict[str, list[CorpusEntry]] = {}
    order: list[str] = []
    mapped_counts: dict[str, int] = {}
    entry_counts: dict[str, int] = {}
    for entry in entries:
        record = by_term.get((entry.corpus, entry.term))
        if record is None:
            raise MissingMapping(f"no mapping record for ({entry.corpus!r}, {entry.term!r})")
        entry_counts[entry.corpus] = entry_counts.get(entry.corpus, 0) + 1
        if record.qid is not None:
            mapped_counts[entry.corpus] = mapped_counts.get(entry.corpus, 0) + 1
            key = record.qid
        else:
            key = local_key(entry.corpus, entry.term)
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(entry)

    # Chicago slug -> owning concept key, for edge resolution.
    slug_to_key: dict[str, str] = {}
    for key in order:
        for entry in grouped[key]:
            if isinstance(entry.payload, DefinitionPage):
                slug_to_key.setdefault(entry.payload.slug, key)

    warnings: list[str] = []
    dangling = 0
    concepts: dict[str, Concept] = {}
    multi_definition: list[str] = []
    for key in order:
        group = grouped[key]
        edge_set: list[str] = []
        for entry in group:
            if not isinstance(entry.payload, DefinitionPage):
                continue
            for slug in entry.payload.outgoing_slugs:
                target = slug_to_key.get(slug)
                if target is None:
                    dangling += 1
                    warnings.append(f"dangling link {slug!r} from {entry.payload.slug!r} dropped")
                elif target != key and target not in edge_set:
                    edge_set.append(target)
        if sum(1 for e in group if isinstance(e.payload, DefinitionPage)) > 1:
            multi_definition.append(key)
        concepts[key] = Concept(
            key=key,
            label=_label_for(group),
            entries=tuple(group),
            edges=tuple(sorted(edge_set)),
        )

    stats = {
        "entries": dict(sorted(entry_counts.items())),
        "mapped": dict(sorted(mapped_counts.items())),
        "concepts": len(concepts),
        "merged_concepts": sum(1 for c in concepts.values() if len({e.corpus for e in c.entries}) > 1),
        "multi_definition_concepts": sorted(multi_definition),
        "dangling_links": dangling,
        "warnings": warnings,
    }
    return KnowledgeGraph(concepts=concepts, stats=stats)


def filter_nlab(graph: KnowledgeGraph) -> KnowledgeGraph:
    """Drop concepts whose only payload is an nLab wiki page.

    Afterwards every concept that still carries a wiki page also carries a
    payload from one of the other corpora.
    """
    kept: dict[str, Concept] = {}
    removed = 0
    for key, concept in graph.concepts.items():
        if concept.has_wiki_page() and not concept.has_non_nlab_payload():
            removed += 1
            continue
        kept[key] = concept
    for key, concept in list(kept.items()):
        pruned = tuple(k for k in concept.edges if k in kept)
        if pruned != concept.edges:
            kept[key] = replace(concept, edges=pruned)
    stats = dict(graph.stats)
    stats["nlab_filtered"] = stats.get("nlab_filtered", 0) + removed
    stats["concepts"] = len(kept)
    return KnowledgeGraph(concepts=kept, stats=stats)


def sort_rows(graph: KnowledgeGraph) -> list[Concept]:
    """Case-insensitive code-point order on label (digits before letters),
    ties broken by key string."""
    return sorted(graph.concepts.values(), key=lambda c: (c.label.lower(), c.key))


def _payload_to_json(entry: CorpusEntry) -> dict:
    p = entry.payload
    if isinstance(p, DefinitionPage):
        return {"term": entry.term, "slug": p.slug, "body": p.body, "outgoing_slugs": list(p.outgoing_slugs)}
    if isinstance(p, ProverLink):
        return {"term": entry.term, "lean_url": p.url}
    if isinstance(p, Translations):
        return {"term": entry.term, "translations": p.as_dict()}
    if isinstance(p, WikiPage):
        return {"term": entry.term, "title": p.title}
    raise GraphError(f"unknown payload type {type(p).__name__}")


def _payload_from_json(corpus: str, obj: dict) -> CorpusEntry:
    # Shape is detected from the fields so custom-named corpora round-trip
    # with any of the four payload shapes.
    term = obj["term"]
    if "slug" in obj:
        payload = DefinitionPage(slug=obj["slug"], body=obj["body"], outgoing_slugs=tuple(obj["outgoing_slugs"]))
    elif "translations" in obj:
        payload = Translations(by_language=tuple(obj["translations"].items()))
    elif "title" in obj:
        payload = WikiPage(title=obj["title"])
    elif "lean_url" in obj:
        payload = ProverLink(url=obj.get("lean_url"))
    else:
        raise GraphError(f"unrecognized payload shape for corpus {corpus!r} in graph file")
    return CorpusEntry(corpus=corpus, term=term, payload=payload)


def dump_graph(graph: KnowledgeGraph) -> str:
    """Serialize to the graph.json schema; concepts sorted by key for
    byte-identical output across runs."""
    concepts_obj = {}
    for key in sorted(graph.concepts):
        concept = graph.concepts[key]
        obj: dict = {"label": concept.label}
        known = [c for c in (CHICAGO, FRENCH_LEAN, MULIMA, NLAB) if any(e.corpus == c for e in concept.entries)]
        extra = sorted({e.corpus for e in concept.entries} - {CHICAGO, FRENCH_LEAN, MULIMA, NLAB})
        for corpus in known + extra:
            if corpus in ("label", "edges"):
                raise GraphError(f"corpus name {corpus!r} collides with a reserved graph key")
            obj[corpus] = [_payload_to_json(e) for e in concept.entries if e.corpus == corpus]
        obj["edges"] = list(concept.edges)
        concepts_obj[key] = obj
    doc = {"schema": SCHEMA, "concepts": concepts_obj, "stats": graph.stats}
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def load_graph_text(text: str) -> KnowledgeGraph:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise GraphError(f"unsupported graph schema {doc.get('schema')!r}")
    concepts: dict[str, Concept] = {}
    for key, obj in doc["concepts"].items():
        entries: list[CorpusEntry] = []
        for corpus, group in obj.items():
            if corpus in ("label", "edges"):
                continue
            for payload_obj in group:
                entries.append(_payload_from_json(corpus, payload_obj))
        concepts[key] = Concept(
            key=key, label=obj["label"], entries=tuple(entries), edges=tuple(obj.get("edges", ()))
        )
    return KnowledgeGraph(concepts=concepts, stats=doc.get("stats", {}))


def load_graph(path) -> KnowledgeGraph:
    from pathlib import Path

    return load_graph_text(Path(path).read_text(encoding="utf-8"))


def save_graph(graph: KnowledgeGraph, path) -> None:
    from pathlib import Path

    Path(path).write_text(dump_graph(graph), encoding="utf-8", newline="\n")
