"""Curation service: queue of unmapped / rejected / flagged terms, an
append-only decision log, and an overrides export for the next build.

Decisions are event-sourced: the JSON-lines log is the single durable
source of truth, and replaying it from empty reproduces the override export
exactly.  The service never mutates graph or corpus files.
"""

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .corpora import CHICAGO, DefinitionPage
from .errors import GlossforgeError
from .graph import KnowledgeGraph
from .linker import (
    FORCE_UNMAPPED,
    STRATEGY_REJECTED,
    STRATEGY_UNMAPPED,
    MappingRecord,
    OverrideTable,
)
from .titles import QID_RE, TitleIndex

STATUS_UNMAPPED = "unmapped"
STATUS_REJECTED = "disambiguation_rejected"
STATUS_AMBIGUOUS = "ambiguous_merge"
STATUSES = (STATUS_UNMAPPED, STATUS_REJECTED, STATUS_AMBIGUOUS)

TERMINAL_ACTIONS = ("accept", "reject")
ACTIONS = ("accept", "reject", "defer")

CONTEXT_SNIPPET_CHARS = 240


class ReviewError(GlossforgeError):
    pass


def item_id_for(corpus: str, term: str) -> str:
    """Stable content digest so queues from different builds align."""
    return hashlib.sha256(f"{corpus}\t{term}".encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Candidate:
    qid: str
    label: str | None = None
    description: str | None = None
    is_disambiguation: bool = False

    def to_json(self) -> dict:
        return {
            "qid": self.qid,
            "label": self.label,
            "description": self.description,
            "is_disambiguation": self.is_disambiguation,
        }


@dataclass(frozen=True)
class ReviewItem:
    item_id: str
    corpus: str
    term: str
    status: str
    tried: tuple[str, ...] = ()
    context: str | None = None
    candidates: tuple[Candidate, ...] = ()

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "corpus": self.corpus,
            "term": self.term,
            "status": self.status,
            "tried": list(self.tried),
            "context": self.context,
            "candidates": [c.to_json() for c in self.candidates],
        }


def _context_snippet(graph: KnowledgeGraph | None, corpus: str, term: str) -> str | None:
    if graph is None:
        return None
    for concept in graph.concepts.values():
        for entry in concept.entries:
            if entry.corpus == corpus and entry.term == term and isinstance(entry.payload, DefinitionPage):
                body = entry.payload.body.strip()
                return body[:CONTEXT_SNIPPET_CHARS] if body else None
    return None


def _candidates_from_tried(index: TitleIndex | None, tried: tuple[str, ...]) -> list[Candidate]:
    if index is None:
        return []
    seen: set[str] = set()
    out: list[Candidate] = []
    for title in tried:
        entry = index.entries.get(title)
        if entry is None:
            resolved = index.lookup(title)
            entry = resolved
        if entry is None or str(entry.qid) in seen:
            continue
        seen.add(str(entry.qid))
        out.append(Candidate(qid=str(entry.qid), is_disambiguation=entry.is_disambiguation))
    return out


def build_items(
    mappings: list[MappingRecord],
    graph: KnowledgeGraph | None = None,
    index: TitleIndex | None = None,
) -> list[ReviewItem]:
    """Review items for every unmapped or rejected mapping, plus ambiguous
    merges flagged by the graph build."""
    items: dict[str, ReviewItem] = {}
    for record in mappings:
        if record.strategy == STRATEGY_UNMAPPED:
            status = STATUS_UNMAPPED
        elif record.strategy == STRATEGY_REJECTED:
            status = STATUS_REJECTED
        else:
            continue
        iid = item_id_for(record.corpus, record.term)
        items[iid] = ReviewItem(
            item_id=iid,
            corpus=record.corpus,
            term=record.term,
            status=status,
            tried=record.tried,
            context=_context_snippet(graph, record.corpus, record.term),
            candidates=tuple(_candidates_from_tried(index, record.tried)),
        )
    if graph is not None:
        for key in graph.stats.get("multi_definition_concepts", ()):
            concept = graph.concepts.get(key)
            if concept is None:
                continue
            for entry in concept.by_corpus(CHICAGO):
                iid = item_id_for(entry.corpus, entry.term)
                if iid in items:
                    continue
                items[iid] = ReviewItem(
                    item_id=iid,
                    corpus=entry.corpus,
                    term=entry.term,
                    status=STATUS_AMBIGUOUS,
                    context=_context_snippet(graph, entry.corpus, entry.term),
                )
    return sorted(items.values(), key=lambda i: (i.corpus, i.term))


@dataclass(frozen=True)
class Decision:
    item_id: str
    corpus: str
    term: str
    action: str
    qid: str | None
    decided_at: str
    note: str = ""

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "item_id": self.item_id,
                "corpus": self.corpus,
                "term": self.term,
                "action": self.action,
                "qid": self.qid,
                "decided_at": self.decided_at,
                "note": self.note,
            },
            ensure_ascii=False,
        )

    @staticmethod
    def from_json_line(line: str) -> "Decision":
        obj = json.loads(line)
        return Decision(
            item_id=obj["item_id"],
            corpus=obj["corpus"],
            term=obj["term"],
            action=obj["action"],
            qid=obj.get("qid"),
            decided_at=obj["decided_at"],
            note=obj.get("note", ""),
        )


def export_overrides(decisions: list[Decision]) -> OverrideTable:
    """Replay the log: the last terminal decision per item wins.  accept(Q)
    materializes (corpus, term, Q); reject materializes (corpus, term, NONE);
    defer leaves nothing durable."""
    terminal: dict[str, Decision] = {}
    for decision in decisions:
        if decision.action in TERMINAL_ACTIONS:
            terminal[decision.item_id] = decision
    table = OverrideTable()
    for decision in terminal.values():
        note = decision.note.replace("\t", " ").replace("\n", " ")
        if decision.action == "accept":
            table.set(decision.corpus, decision.term, decision.qid, note)
        else:
            table.set(decision.corpus, decision.term, FORCE_UNMAPPED, note)
    return table


class ReviewState:
    """In-memory queue view over items + the append-only decision log.

    Writes are serialized through a single lock; the queue view is rebuilt
    atomically after each append.
    """

    def __init__(self, items: list[ReviewItem], log_path=None):
        self.items: dict[str, ReviewItem] = {i.item_id: i for i in items}
        self.log_path = Path(log_path) if log_path is not None else None
        self.decisions: list[Decision] = []
        self._lock = threading.Lock()
        if self.log_path is not None and self.log_path.exists():
            for line in self.log_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self.decisions.append(Decision.from_json_line(line))

    def terminal_decisions(self) -> dict[str, Decision]:
        terminal: dict[str, Decision] = {}
        for decision in self.decisions:
            if decision.action in TERMINAL_ACTIONS:
                terminal[decision.item_id] = decision
        return terminal

    def queue(self, status: str | None = None) -> list[ReviewItem]:
        decided = self.terminal_decisions()
        out = [
            item
            for item in self.items.values()
            if item.item_id not in decided and (status is None or item.status == status)
        ]
        return sorted(out, key=lambda i: (i.corpus, i.term))

    def record(self, item_id: str, action: str, qid: str | None, note: str, supersede: bool) -> Decision:
        if action not in ACTIONS:
            raise ReviewError(f"unknown action {action!r}")
        with self._lock:
            item = self.items.get(item_id)
            if item is None:
                raise KeyError(item_id)
            if action == "accept":
                if qid is None or not QID_RE.match(qid):
                    raise ValueError(f"malformed qid {qid!r}")
            else:
                qid = None
            if action in TERMINAL_ACTIONS and item_id in self.terminal_decisions() and not supersede:
                raise FileExistsError(item_id)
            decision = Decision(
                item_id=item_id,
                corpus=item.corpus,
                term=item.term,
                action=action,
                qid=qid,
                decided_at=datetime.now(timezone.utc).isoformat(),
                note=note,
            )
            self.decisions.append(decision)
            if self.log_path is not None:
                self.log_path.parent.mkdir(parents=True, exist_ok=True)
                with self.log_path.open("a", encoding="utf-8") as fh:
                    fh.write(decision.to_json_line() + "\n")
            return decision

    def export_overrides_tsv(self) -> str:
        return export_overrides(self.decisions).to_tsv()

    def stats(self) -> dict:
        queue = self.queue()
        by_status = {status: 0 for status in STATUSES}
        for item in queue:
            by_status[item.status] += 1
        return {
            "items": len(self.items),
            "queued": len(queue),
            "queued_by_status": by_status,
            "decisions": len(self.decisions),
            "terminally_decided": len(self.terminal_decisions()),
        }


def create_app(state: ReviewState | None, ui_dir=None, enricher=None):
    """FastAPI application over a ReviewState; ``state=None`` gives the
    503 empty-service behavior.  ``ui_dir`` is served statically at /."""
    from fastapi import FastAPI, HTTPException, Query
    from fastapi.responses import PlainTextResponse
    from pydantic import BaseModel

    app = FastAPI(title="glossforge review", docs_url=None, redoc_url=None)

    def require_state() -> ReviewState:
        if state is None:
            raise HTTPException(status_code=503, detail="no build loaded")
        return state

    class DecisionIn(BaseModel):
        item_id: str
        action: str
        qid: str | None = None
        note: str = ""
        supersede: bool = False

    @app.get("/api/queue")
    def get_queue(status: str | None = Query(default=None)):
        st = require_state()
        if status is not None and status not in STATUSES:
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        return [item.to_json() for item in st.queue(status)]

    @app.get("/api/item/{item_id}")
    def get_item(item_id: str):
        st = require_state()
        item = st.items.get(item_id)
        if item is None:
            raise HTTPException(status_code=404, detail="unknown item")
        history = [
            json.loads(d.to_json_line()) for d in st.decisions if d.item_id == item_id
        ]
        enriched = item
        if enricher is not None and item.candidates:
            info = enricher.enrich([c.qid for c in item.candidates])
            enriched_candidates = tuple(
                Candidate(
                    qid=c.qid,
                    label=info.get(c.qid, (None, None))[0],
                    description=info.get(c.qid, (None, None))[1],
                    is_disambiguation=c.is_disambiguation,
                )
                for c in item.candidates
            )
            enriched = ReviewItem(
                item_id=item.item_id,
                corpus=item.corpus,
                term=item.term,
                status=item.status,
                tried=item.tried,
                context=item.context,
                candidates=enriched_candidates,
            )
        return {"item": enriched.to_json(), "decisions": history}

    @app.post("/api/decision")
    def post_decision(body: DecisionIn):
        st = require_state()
        if body.action not in ACTIONS:
            raise HTTPException(status_code=400, detail=f"unknown action {body.action!r}")
        try:
            decision = st.record(body.item_id, body.action, body.qid, body.note, body.supersede)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown item") from None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        except FileExistsError:
            raise HTTPException(
                status_code=409, detail="terminal decision exists; repeat with supersede=true"
            ) from None
        return {"ok": True, "decision": json.loads(decision.to_json_line())}

    @app.get("/api/export/overrides", response_class=PlainTextResponse)
    def get_overrides():
        st = require_state()
        return PlainTextResponse(st.export_overrides_tsv(), media_type="text/tab-separated-values")

    @app.get("/api/stats")
    def get_stats():
        return require_state().stats()

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        def root():
            return {"service": "glossforge review", "ui": "not built", "api": "/api/queue"}

    return app
