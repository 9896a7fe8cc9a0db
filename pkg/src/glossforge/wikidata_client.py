"""Optional Wikidata label/description client with a disk cache.

The curation queue must work offline: cache misses yield absent values and
upstream failures degrade to absent values with a logged warning, never an
error.  Requests are rate limited (default 2/s) and batched.
"""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path

logger = logging.getLogger(__name__)

API_URL = "https://www.wikidata.org/w/api.php"
BATCH_SIZE = 50
DEFAULT_TTL_SECONDS = 7 * 24 * 3600


class WikidataClient:
    """Fetches English labels and descriptions for QIDs.

    ``session`` only needs a ``get(url, params=, timeout=)`` returning an
    object with ``.json()``; tests inject a fake.
    """

    def __init__(
        self,
        cache_path,
        offline: bool = False,
        ttl_seconds: int = DEFAULT_TTL_SECONDS,
        requests_per_second: float = 2.0,
        session=None,
        clock=time.time,
    ):
        self.cache_path = Path(cache_path)
        self.offline = offline
        self.ttl_seconds = ttl_seconds
        self.min_interval = 1.0 / requests_per_second if requests_per_second > 0 else 0.0
        self._session = session
        self._clock = clock
        self._last_request = 0.0
        self._cache = self._load_cache()

    def _load_cache(self) -> dict:
        if self.cache_path.exists():
            try:
                return json.loads(self.cache_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                logger.warning("enrichment cache unreadable (%s); starting empty", exc)
        return {}

    def _save_cache(self) -> None:
        self.cache_path.parent.mkdir(parents=True, exist_ok=True)
        self.cache_path.write_text(
            json.dumps(self._cache, ensure_ascii=False, sort_keys=True, indent=1),
            encoding="utf-8",
        )

    def _session_or_default(self):
        if self._session is None:
            import requests

            self._session = requests.Session()
        return self._session

    def _fresh(self, qid: str) -> bool:
        hit = self._cache.get(qid)
        return hit is not None and self._clock() - hit.get("fetched_at", 0) < self.ttl_seconds

    def _throttle(self) -> None:
        elapsed = self._clock() - self._last_request
        if elapsed < self.min_interval:
            time.sleep(self.min_interval - elapsed)
        self._last_request = self._clock()

    def _fetch_batch(self, qids: list[str]) -> None:
        self._throttle()
        response = self._session_or_default().get(
            API_URL,
            params={
                "action": "wbgetentities",
                "ids": "|".join(qids),
                "props": "labels|descriptions",
                "languages": "en",
                "format": "json",
            },
            timeout=10,
        )
        payload = response.json()
        now = self._clock()
        for qid in qids:
            entity = payload.get("entities", {}).get(qid, {})
            label = entity.get("labels", {}).get("en", {}).get("value")
            description = entity.get("descriptions", {}).get("en", {}).get("value")
            self._cache[qid] = {"label": label, "description": description, "fetched_at": now}

    def enrich(self, qids: list[str]) -> dict[str, tuple[str | None, str | None]]:
        """Label/description per QID; absent values when offline or unknown.
        Duplicate qids are deduplicated into a single fetch."""
        unique = list(dict.fromkeys(qids))
        if not self.offline:
            missing = [q for q in unique if not self._fresh(q)]
            for start in range(0, len(missing), BATCH_SIZE):
                batch = missing[start : start + BATCH_SIZE]
                try:
                    self._fetch_batch(batch)
                except Exception as exc:
                    logger.warning("wikidata enrichment failed for %d qids: %s", len(batch), exc)
                    break
            if missing:
                try:
                    self._save_cache()
                except OSError as exc:
                    logger.warning("could not persist enrichment cache: %s", exc)
        out: dict[str, tuple[str | None, str | None]] = {}
        for qid in unique:
            hit = self._cache.get(qid)
            if hit is None:
                out[qid] = (None, None)
            else:
                out[qid] = (hit.get("label"), hit.get("description"))
        return out
