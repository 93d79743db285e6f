"""Assembles the combined per-language search response.

One lookup consults every dictionary associated with the language: the full
index where authoritative (yes/no), else the sparse index (yes/maybe, with
crowd-confirmed absences removed and crowd-promoted entries upgraded), else
the first page of a dictionary that only has ordered pages. Each returned
page carries its image source, the word's aggregated marker, region boxes
from digitization or automation, and annotations. External definition
sources are queried concurrently and failures degrade to an empty list —
the scanned pages always come back.

Indexes stay on the server; the response carries only data for the query.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from time import monotonic
from typing import Optional

from .errors import RasterDictError
from .feedback import FeedbackRecord
from .full import lookup_full, normalize_word
from .location import Annotation, MarkerProposal
from .prefix import expand
from .sparse import lookup_sparse
from .store import (
    ANNOTATED,
    DIGITIZED,
    FULLY_INDEXED,
    LOCATION_INDEXED,
    DictionaryManifest,
    DictionaryStore,
    DigitizedEntry,
)

FULL_AUTHORITY_STATES = (FULLY_INDEXED, LOCATION_INDEXED, ANNOTATED, DIGITIZED)


class InvalidPayload(RasterDictError):
    """A contribution payload is missing fields or has wrong types."""

    code = "INVALID_PAYLOAD"


@dataclass
class DefinitionSource:
    """One external provider of Unicode definitions/resources.

    Subclasses override ``fetch``; failures and timeouts only cost the
    source's own results.
    """

    id: str
    timeout_ms: int = 2000
    enabled: bool = True

    def fetch(self, query: str, language: str) -> dict:
        raise NotImplementedError


class DigitizedDefinitionSource(DefinitionSource):
    """Bundled source backed by the store's own digitized entries."""

    def __init__(self, store: DictionaryStore, id: str = "digitized", timeout_ms: int = 2000):
        super().__init__(id=id, timeout_ms=timeout_ms)
        self.store = store

    def fetch(self, query: str, language: str) -> dict:
        word = normalize_word(query)
        definitions = []
        for manifest in self.store.dictionaries_for_language(language):
            for entry in self.store.digitized_entries(manifest.id):
                if entry.word != word:
                    continue
                text = str(entry.fields.get("definition", "")).strip()
                if not text:
                    continue
                meta = {
                    "contributor": entry.meta.get("contributor", ""),
                    "updated": entry.meta.get("updated", ""),
                    "dictionary": manifest.id,
                }
                for key, value in entry.fields.items():
                    if key != "definition" and str(value).strip():
                        meta[key] = value
                definitions.append({"text": text, "meta": meta})
        return {"definitions": definitions, "resources": []}


class SearchService:
    def __init__(
        self,
        store: DictionaryStore,
        sources: Optional[list[DefinitionSource]] = None,
        deadline_ms: int = 5000,
    ):
        self.store = store
        self.sources = sources if sources is not None else [DigitizedDefinitionSource(store)]
        self.deadline_ms = deadline_ms
        self._executor = ThreadPoolExecutor(max_workers=8, thread_name_prefix="defsource")

    # -- search ------------------------------------------------------------

    def search(self, query: str, language_code: str) -> dict:
        self.store.language(language_code)  # raises UnknownLanguage
        resources, definitions = self._external_results(query, language_code)
        dictionaries = [
            self._dictionary_block(manifest, query)
            for manifest in self.store.dictionaries_for_language(language_code)
        ]
        return {
            "query": query,
            "language": language_code,
            "resources": resources,
            "definitions": definitions,
            "dictionaries": dictionaries,
        }

    def _external_results(self, query: str, language: str) -> tuple[list, list]:
        active = [s for s in self.sources if s.enabled]
        futures = [(s, self._executor.submit(s.fetch, query, language)) for s in active]
        deadline = monotonic() + self.deadline_ms / 1000
        resources: list = []
        definitions: list = []
        for source, future in futures:
            budget = min(source.timeout_ms / 1000, max(0.0, deadline - monotonic()))
            try:
                result = future.result(timeout=budget)
            except Exception:
                continue  # degraded response: drop the failing source
            resources.extend(result.get("resources", []))
            definitions.extend(result.get("definitions", []))
        return resources, definitions

    def _dictionary_block(self, manifest: DictionaryManifest, query: str) -> dict:
        rules = self.store.rules_for_dictionary(manifest.id)
        word = normalize_word(query)
        full = self.store.full_index(manifest.id)
        sparse = self.store.sparse_index(manifest.id)
        ledger = self.store.feedback_ledger(manifest.id)

        if full is not None and manifest.index_state in FULL_AUTHORITY_STATES:
            result = lookup_full(full, word)
            exists, pages = result.exists, result.pages
        elif full is not None and lookup_full(full, word).pages:
            # Crowd promotions certify presence before full indexing finishes.
            exists, pages = "yes", lookup_full(full, word).pages
        elif sparse is not None:
            result = lookup_sparse(sparse, word, rules)
            exists, pages = result.exists, result.pages
            if exists == "maybe":
                absent = ledger.confirmed_absent_pages(word)
                remaining = tuple(p for p in pages if p not in absent)
                if not remaining:
                    exists, pages = "no", ()
                else:
                    pages = remaining
        else:
            exists, pages = "maybe", (1,)

        return {
            "id": manifest.id,
            "exists": exists,
            "pages": [self._page_block(manifest, page, word) for page in pages],
        }

    def _page_block(self, manifest: DictionaryManifest, page: int, word: str) -> dict:
        width, height = manifest.dimensions(page)
        block = {
            "number": page,
            "src": manifest.page_src(page),
            "width": width,
            "height": height,
        }
        if page in manifest.missing_pages:
            block["missing"] = True
        marker = self.store.marker_log(manifest.id).marker_for(page, word)
        if marker is not None:
            block["location"] = {"x": marker.x, "y": marker.y}
        block["boxes"] = [
            {"top": b.top, "bottom": b.bottom, "left": b.left, "right": b.right}
            for b in self._boxes_for(manifest, page, word)
        ]
        block["annotations"] = [
            {"id": a.id, "text": a.text, "meta": a.meta}
            for a in self.store.annotation_log(manifest.id).for_target(page, word)
        ]
        return block

    def _boxes_for(self, manifest: DictionaryManifest, page: int, word: str):
        for entry in self.store.digitized_entries(manifest.id):
            if entry.word == word:
                explicit = [b for b in entry.boxes if b.page == page]
                if explicit:
                    return explicit
        if manifest.index_state in (LOCATION_INDEXED, ANNOTATED, DIGITIZED):
            return [b for b in self.store.automatic_boxes(manifest.id, word) if b.page == page]
        return []

    # -- prefix tree -------------------------------------------------------

    def list_prefix(self, language_code: str, prefix: str) -> dict:
        tree = self.store.prefix_tree(language_code)
        rules = self.store.rules_for_language(language_code)
        result = expand(prefix, tree, rules)
        payload = {"language": language_code, "prefix": prefix}
        if result and isinstance(result[0], str):
            payload["words"] = list(result)
        else:
            payload["buckets"] = [
                {
                    "prefix": bucket.prefix,
                    "count": bucket.word_count,
                    "terminal": bucket.terminal,
                    "leaf": bucket.is_leaf,
                }
                for bucket in result
            ]
        return payload

    # -- contributions -----------------------------------------------------

    @staticmethod
    def _require(payload: dict, *keys):
        missing = [k for k in keys if k not in payload]
        if missing:
            raise InvalidPayload(f"missing fields: {', '.join(missing)}")

    def submit_feedback(self, payload: dict) -> dict:
        self._require(payload, "dictionary", "page", "word", "verdict", "contributor")
        tally = self.store.record_feedback(
            FeedbackRecord(
                dictionary_id=payload["dictionary"],
                page=int(payload["page"]),
                word=payload["word"],
                verdict=payload["verdict"],
                contributor=payload["contributor"],
            )
        )
        return {
            "recorded": True,
            "tally": {
                "present": tally.present_votes,
                "absent": tally.absent_votes,
                "status": tally.status,
            },
        }

    def submit_marker(self, payload: dict) -> dict:
        self._require(payload, "dictionary", "page", "word", "x", "y", "contributor")
        try:
            x, y = int(payload["x"]), int(payload["y"])
        except (TypeError, ValueError):
            raise InvalidPayload("x and y must be integers") from None
        marker = self.store.propose_marker(
            MarkerProposal(
                dictionary_id=payload["dictionary"],
                page=int(payload["page"]),
                word=payload["word"],
                x=x,
                y=y,
                contributor=payload["contributor"],
                timestamp=0.0,
            )
        )
        return {
            "marker": {
                "word": marker.word,
                "page": marker.page,
                "x": marker.x,
                "y": marker.y,
                "proposal_count": marker.proposal_count,
                "policy": marker.policy,
            }
        }

    def submit_annotation(self, payload: dict) -> dict:
        self._require(payload, "dictionary", "page", "word", "text")
        stored = self.store.attach_annotation(
            Annotation(
                dictionary_id=payload["dictionary"],
                page=int(payload["page"]),
                word=payload["word"],
                text=payload["text"],
                meta=dict(payload.get("meta", {})),
            )
        )
        return {
            "annotation": {
                "id": stored.id,
                "page": stored.page,
                "word": stored.word,
                "text": stored.text,
                "meta": stored.meta,
            }
        }

    def submit_digitization(self, payload: dict) -> dict:
        self._require(payload, "dictionary", "word", "fields")
        from .location import RegionBox

        try:
            boxes = [
                RegionBox(
                    page=int(b["page"]), top=int(b["top"]), bottom=int(b["bottom"]),
                    left=int(b["left"]), right=int(b["right"]),
                )
                for b in payload.get("boxes", [])
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPayload(f"bad box: {exc}") from None
        stored = self.store.store_digitization(
            DigitizedEntry(
                dictionary_id=payload["dictionary"],
                word=payload["word"],
                fields=dict(payload["fields"]),
                boxes=boxes,
                meta=dict(payload.get("meta", {})),
            )
        )
        return {
            "entry": {
                "id": stored.id,
                "word": stored.word,
                "fields": stored.fields,
                "boxes": [
                    {"page": b.page, "top": b.top, "bottom": b.bottom,
                     "left": b.left, "right": b.right}
                    for b in stored.boxes
                ],
                "meta": stored.meta,
            }
        }

    def language_listing(self) -> dict:
        return {
            "languages": [
                {
                    "code": lang.code,
                    "display_name": lang.display_name,
                    "direction": lang.direction,
                    "keyboard_layout_ref": lang.keyboard_layout_ref,
                    "dictionaries": [
                        {"id": m.id, "title": m.title, "page_count": m.page_count}
                        for m in self.store.dictionaries_for_language(lang.code)
                    ],
                }
                for lang in self.store.languages()
            ]
        }


def serialize_response(payload: dict) -> bytes:
    """Canonical wire bytes: UTF-8, two-space indent, insertion field order."""
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
