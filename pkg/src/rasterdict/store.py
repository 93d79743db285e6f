"""Registry and on-disk persistence for languages, dictionaries, and logs.

Directory layout under the data dir:

    languages/<code>          language documents (JSON)
    tailoring/<ref>           collation rule files
    wordlists/<ref>           prefix-tree word lists
    keyboards/<ref>           on-screen keyboard layouts (JSON)
    <dictionary_id>/
        manifest              JSON, order-stable
        sparse.tsv            canonical sparse index
        full.tsv              canonical full index
        full.provenance.tsv   manual/crowd sidecar
        markers.log           JSON-lines proposals
        annotations.log       JSON-lines annotations
        feedback.log          JSON-lines votes
        digitized.log         JSON-lines fielded entries

Writes per dictionary funnel through one lock; index snapshots are replaced
atomically so concurrent readers keep a consistent view.
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Optional

from .collation import TailoringRuleSet, parse_tailoring
from .errors import PageOutOfRange, RasterDictError, UnknownTarget
from .feedback import (
    FeedbackLedger,
    FeedbackRecord,
    UnknownDictionary,
    VoteTally,
    policy_from_config,
    promotion_sweep,
)
from .full import (
    FullIndex,
    build_full,
    lookup_full,
    normalize_word,
    parse_full_tsv,
    parse_provenance_tsv,
    serialize_full_tsv,
    serialize_provenance_tsv,
)
from .location import (
    LINEAR_MEAN,
    LTR,
    Annotation,
    AnnotationLog,
    InsufficientMarkers,
    LocationMarker,
    MarkerLog,
    MarkerOutOfBounds,
    MarkerProposal,
    OrderViolation,
    RegionBox,
    column_index,
    estimate_layout,
    region_boxes,
)
from .prefix import PrefixBucket, build_prefix_tree, load_wordlist
from .sparse import (
    SortViolation,
    SparseIndex,
    Variant,
    build_sparse,
    lookup_sparse,
    parse_sparse_tsv,
    serialize_sparse_tsv,
    validate_sorted,
)

ORDERED_PAGES = "ordered_pages"
SPARSE_INDEXED = "sparse_indexed"
FULLY_INDEXED = "fully_indexed"
LOCATION_INDEXED = "location_indexed"
ANNOTATED = "annotated"
DIGITIZED = "digitized"

INDEX_STATES = (
    ORDERED_PAGES, SPARSE_INDEXED, FULLY_INDEXED, LOCATION_INDEXED, ANNOTATED, DIGITIZED,
)

# Progressive pipeline edges; a dictionary without overall ordering may skip
# the sparse stage, and annotation/digitization layer after location markers.
ALLOWED_TRANSITIONS = {
    (ORDERED_PAGES, SPARSE_INDEXED),
    (ORDERED_PAGES, FULLY_INDEXED),
    (SPARSE_INDEXED, FULLY_INDEXED),
    (FULLY_INDEXED, LOCATION_INDEXED),
    (LOCATION_INDEXED, ANNOTATED),
    (LOCATION_INDEXED, DIGITIZED),
    (ANNOTATED, DIGITIZED),
}

RESERVED_DIRS = {"languages", "tailoring", "wordlists", "keyboards"}
_ID_RE = re.compile(r"^[a-z0-9][a-z0-9_-]*$")


class DuplicateId(RasterDictError):
    """A language or dictionary with this identifier already exists."""

    code = "DUPLICATE_ID"


class UnknownLanguage(RasterDictError):
    """No such language registered."""

    code = "UNKNOWN_LANGUAGE"


class IllegalTransition(RasterDictError):
    """Index states advance only along the progressive pipeline."""

    code = "ILLEGAL_TRANSITION"


class MissingArtifact(RasterDictError):
    """The target state requires an artifact that is not loaded."""

    code = "MISSING_ARTIFACT"


@dataclass
class Language:
    code: str
    display_name: str = ""
    direction: str = LTR
    tailoring_ref: str = ""
    wordlist_ref: str = ""
    keyboard_layout_ref: str = ""

    def to_doc(self) -> dict:
        return {
            "code": self.code,
            "display_name": self.display_name,
            "direction": self.direction,
            "tailoring_ref": self.tailoring_ref,
            "wordlist_ref": self.wordlist_ref,
            "keyboard_layout_ref": self.keyboard_layout_ref,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Language":
        return cls(**{k: doc.get(k, "") for k in (
            "code", "display_name", "direction", "tailoring_ref",
            "wordlist_ref", "keyboard_layout_ref",
        )})


@dataclass
class DictionaryManifest:
    id: str
    title: str = ""
    language_codes: list[str] = field(default_factory=list)
    page_count: int = 1
    image_url_template: str = ""
    image_width: int = 1000
    image_height: int = 1500
    page_dimensions: dict[int, tuple[int, int]] = field(default_factory=dict)
    index_state: str = ORDERED_PAGES
    sparse_variant: str = Variant.FIRST_WORD.value
    ordering: str = "flat"
    feedback_policy: dict = field(default_factory=lambda: {"kind": "threshold", "k": 3})
    aggregation_policy: str = LINEAR_MEAN
    reading_direction: str = LTR
    missing_pages: list[int] = field(default_factory=list)
    duplicate_pages: list[int] = field(default_factory=list)
    tailoring_ref: str = ""

    def dimensions(self, page: int) -> tuple[int, int]:
        return self.page_dimensions.get(page, (self.image_width, self.image_height))

    def page_src(self, page: int) -> str:
        return self.image_url_template.replace("{page}", str(page))

    def validate(self):
        if not _ID_RE.match(self.id) or self.id in RESERVED_DIRS:
            raise ValueError(f"bad dictionary id {self.id!r}")
        if self.page_count < 1:
            raise ValueError("page_count must be >= 1")
        if self.index_state not in INDEX_STATES:
            raise ValueError(f"unknown index state {self.index_state!r}")
        for page in self.missing_pages:
            if not 1 <= page <= self.page_count:
                raise PageOutOfRange(f"missing page {page} outside 1..{self.page_count}")

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "language_codes": list(self.language_codes),
            "page_count": self.page_count,
            "image_url_template": self.image_url_template,
            "image_width": self.image_width,
            "image_height": self.image_height,
            "page_dimensions": {str(k): list(v) for k, v in sorted(self.page_dimensions.items())},
            "index_state": self.index_state,
            "sparse_variant": self.sparse_variant,
            "ordering": self.ordering,
            "feedback_policy": self.feedback_policy,
            "aggregation_policy": self.aggregation_policy,
            "reading_direction": self.reading_direction,
            "missing_pages": list(self.missing_pages),
            "duplicate_pages": list(self.duplicate_pages),
            "tailoring_ref": self.tailoring_ref,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DictionaryManifest":
        manifest = cls(id=doc["id"])
        for key in (
            "title", "language_codes", "page_count", "image_url_template",
            "image_width", "image_height", "index_state", "sparse_variant",
            "ordering", "feedback_policy", "aggregation_policy",
            "reading_direction", "missing_pages", "duplicate_pages", "tailoring_ref",
        ):
            if key in doc:
                setattr(manifest, key, doc[key])
        manifest.page_dimensions = {
            int(k): (v[0], v[1]) for k, v in doc.get("page_dimensions", {}).items()
        }
        return manifest


@dataclass
class DigitizedEntry:
    dictionary_id: str
    word: str
    fields: dict
    boxes: list[RegionBox] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    id: Optional[int] = None

    def validate(self):
        if not any(str(v).strip() for v in self.fields.values()):
            raise ValueError("a digitized entry needs at least one non-empty field")


@dataclass
class LoadReport:
    kind: str
    entries: int
    violations: list[int] = field(default_factory=list)
    installed: bool = True


class _Runtime:
    """Mutable per-dictionary state behind the store's writer lock."""

    def __init__(self, manifest: DictionaryManifest):
        self.manifest = manifest
        self.sparse: Optional[SparseIndex] = None
        self.full: Optional[FullIndex] = None
        self.marker_log = MarkerLog(policy=manifest.aggregation_policy)
        self.annotation_log: Optional[AnnotationLog] = None
        self.ledger: Optional[FeedbackLedger] = None
        self.digitized: list[DigitizedEntry] = []
        self.lock = threading.Lock()


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _iso(epoch: float) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class DictionaryStore:
    """Owns every artifact under one data directory."""

    def __init__(self, data_dir, clock: Callable[[], float] = time.time):
        self.data_dir = Path(data_dir)
        self.clock = clock
        self._languages: dict[str, Language] = {}
        self._runtimes: dict[str, _Runtime] = {}
        self._rules_cache: dict[str, TailoringRuleSet] = {}
        self._tree_cache: dict[str, PrefixBucket] = {}
        (self.data_dir / "languages").mkdir(parents=True, exist_ok=True)
        self._load_all()

    # -- loading -----------------------------------------------------------

    def _load_all(self):
        for path in sorted((self.data_dir / "languages").iterdir()):
            if path.is_file():
                language = Language.from_doc(json.loads(path.read_text("utf-8")))
                self._languages[language.code] = language
        for path in sorted(self.data_dir.iterdir()):
            if not path.is_dir() or path.name in RESERVED_DIRS:
                continue
            manifest_path = path / "manifest"
            if not manifest_path.is_file():
                continue
            manifest = DictionaryManifest.from_doc(json.loads(manifest_path.read_text("utf-8")))
            runtime = _Runtime(manifest)
            self._runtimes[manifest.id] = runtime
            self._load_artifacts(runtime)

    def _load_artifacts(self, runtime: _Runtime):
        directory = self.data_dir / runtime.manifest.id
        rules = self.rules_for_dictionary(runtime.manifest.id)
        sparse_path = directory / "sparse.tsv"
        if sparse_path.is_file():
            entries = parse_sparse_tsv(sparse_path.read_text("utf-8"))
            try:
                runtime.sparse = build_sparse(
                    entries,
                    Variant(runtime.manifest.sparse_variant),
                    runtime.manifest.page_count,
                    rules,
                    dictionary_id=runtime.manifest.id,
                    rules_ref=runtime.manifest.tailoring_ref,
                )
            except SortViolation:
                # A stored index that regressed stays unloaded until operators
                # fix it (surfaced by the validate command); it is never served.
                runtime.sparse = None
        full_path = directory / "full.tsv"
        if full_path.is_file():
            pairs = parse_full_tsv(full_path.read_text("utf-8"))
            index = build_full(
                pairs, rules, page_count=runtime.manifest.page_count,
                dictionary_id=runtime.manifest.id,
            )
            sidecar = directory / "full.provenance.tsv"
            if sidecar.is_file():
                recorded = parse_provenance_tsv(sidecar.read_text("utf-8"))
                provenance = {
                    key: recorded.get(key, "manual") for key in index.provenance
                }
                index = FullIndex(
                    dictionary_id=index.dictionary_id, postings=index.postings,
                    provenance=provenance, rules_ref=index.rules_ref,
                    page_count=index.page_count,
                )
            runtime.full = index
        for proposal in self._read_log(directory / "markers.log"):
            runtime.marker_log.proposals.append(
                MarkerProposal(
                    dictionary_id=runtime.manifest.id,
                    page=proposal["page"], word=proposal["word"],
                    x=proposal["x"], y=proposal["y"],
                    contributor=proposal.get("contributor", ""),
                    timestamp=proposal.get("timestamp", 0.0),
                )
            )
        annotation_log = self._make_annotation_log(runtime)
        for doc in self._read_log(directory / "annotations.log"):
            annotation_log.annotations.append(
                Annotation(
                    dictionary_id=runtime.manifest.id, page=doc["page"], word=doc["word"],
                    text=doc["text"], meta=doc.get("meta", {}), id=doc["id"],
                )
            )
            annotation_log._next_id = max(annotation_log._next_id, doc["id"] + 1)
        runtime.annotation_log = annotation_log
        ledger = self._make_ledger(runtime)
        for doc in self._read_log(directory / "feedback.log"):
            ledger.records.append(
                FeedbackRecord(
                    dictionary_id=runtime.manifest.id, page=doc["page"], word=doc["word"],
                    verdict=doc["verdict"], contributor=doc.get("contributor", ""),
                    timestamp=doc.get("timestamp", 0.0),
                )
            )
        runtime.ledger = ledger
        for doc in self._read_log(directory / "digitized.log"):
            runtime.digitized.append(
                DigitizedEntry(
                    dictionary_id=runtime.manifest.id, word=doc["word"],
                    fields=doc.get("fields", {}),
                    boxes=[RegionBox(**box) for box in doc.get("boxes", [])],
                    meta=doc.get("meta", {}), id=doc["id"],
                )
            )

    @staticmethod
    def _read_log(path: Path) -> Iterable[dict]:
        if not path.is_file():
            return []
        return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line.strip()]

    def _append_log(self, dictionary_id: str, name: str, doc: dict):
        path = self.data_dir / dictionary_id / name
        with path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(doc, ensure_ascii=False) + "\n")

    # -- helpers -----------------------------------------------------------

    def _make_ledger(self, runtime: _Runtime) -> FeedbackLedger:
        manifest = runtime.manifest

        def candidate_pages(word: str):
            if runtime.sparse is not None:
                rules = self.rules_for_dictionary(manifest.id)
                return lookup_sparse(runtime.sparse, word, rules).pages
            return range(1, manifest.page_count + 1)

        return FeedbackLedger(
            policy=policy_from_config(manifest.feedback_policy),
            candidate_pages=candidate_pages,
        )

    def _make_annotation_log(self, runtime: _Runtime) -> AnnotationLog:
        def target_exists(page: int, word: str) -> bool:
            if runtime.marker_log.marker_for(page, word) is not None:
                return True
            if runtime.full is not None:
                return page in lookup_full(runtime.full, word).pages
            return False

        return AnnotationLog(target_exists=target_exists, clock=lambda: _iso(self.clock()))

    def _runtime(self, dictionary_id: str) -> _Runtime:
        runtime = self._runtimes.get(dictionary_id)
        if runtime is None:
            raise UnknownDictionary(f"no dictionary {dictionary_id!r}")
        return runtime

    # -- languages ---------------------------------------------------------

    def register_language(self, language: Language) -> Language:
        if language.code in self._languages:
            raise DuplicateId(f"language {language.code!r} already registered")
        if not _ID_RE.match(language.code):
            raise ValueError(f"bad language code {language.code!r}")
        self._languages[language.code] = language
        (self.data_dir / "languages" / language.code).write_text(
            _dump_json(language.to_doc()), "utf-8"
        )
        return language

    def languages(self) -> list[Language]:
        return sorted(self._languages.values(), key=lambda lang: lang.code)

    def language(self, code: str) -> Language:
        if code not in self._languages:
            raise UnknownLanguage(f"no language {code!r}")
        return self._languages[code]

    def write_tailoring(self, ref: str, text: str):
        path = self.data_dir / "tailoring" / ref
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, "utf-8")
        self._rules_cache.clear()

    def write_wordlist(self, ref: str, text: str):
        path = self.data_dir / "wordlists" / ref
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, "utf-8")
        self._tree_cache.clear()

    def write_keyboard(self, ref: str, layout) -> None:
        path = self.data_dir / "keyboards" / ref
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_dump_json(layout), "utf-8")

    def keyboard_layout(self, code: str):
        language = self.language(code)
        path = self.data_dir / "keyboards" / language.keyboard_layout_ref
        if not language.keyboard_layout_ref or not path.is_file():
            return None
        return json.loads(path.read_text("utf-8"))

    def _rules_from_ref(self, ref: str) -> TailoringRuleSet:
        if not ref:
            return TailoringRuleSet.empty()
        if ref not in self._rules_cache:
            path = self.data_dir / "tailoring" / ref
            if not path.is_file():
                raise FileNotFoundError(f"tailoring file {path} not found")
            self._rules_cache[ref] = parse_tailoring(path.read_text("utf-8"), language_code=ref)
        return self._rules_cache[ref]

    def rules_for_language(self, code: str) -> TailoringRuleSet:
        return self._rules_from_ref(self.language(code).tailoring_ref)

    def rules_for_dictionary(self, dictionary_id: str) -> TailoringRuleSet:
        runtime = self._runtime(dictionary_id)
        manifest = runtime.manifest
        if manifest.tailoring_ref:
            return self._rules_from_ref(manifest.tailoring_ref)
        if manifest.language_codes:
            return self.rules_for_language(manifest.language_codes[0])
        return TailoringRuleSet.empty()

    def prefix_tree(self, code: str) -> PrefixBucket:
        language = self.language(code)
        if code not in self._tree_cache:
            if not language.wordlist_ref:
                raise FileNotFoundError(f"language {code!r} has no wordlist")
            path = self.data_dir / "wordlists" / language.wordlist_ref
            if not path.is_file():
                raise FileNotFoundError(f"wordlist file {path} not found")
            words = load_wordlist(path.read_text("utf-8"))
            rules = self.rules_for_language(code)
            self._tree_cache[code] = build_prefix_tree(words, rules)
        return self._tree_cache[code]

    # -- dictionaries ------------------------------------------------------

    def register_dictionary(self, manifest: DictionaryManifest) -> DictionaryManifest:
        manifest.validate()
        if manifest.id in self._runtimes:
            raise DuplicateId(f"dictionary {manifest.id!r} already registered")
        for code in manifest.language_codes:
            if code not in self._languages:
                raise UnknownLanguage(f"no language {code!r}")
        directory = self.data_dir / manifest.id
        directory.mkdir(parents=True, exist_ok=True)
        runtime = _Runtime(manifest)
        self._runtimes[manifest.id] = runtime
        self._load_artifacts(runtime)
        if manifest.index_state != ORDERED_PAGES:
            try:
                self._check_artifacts(runtime, manifest.index_state)
            except MissingArtifact:
                manifest.index_state = ORDERED_PAGES
        self._persist_manifest(manifest)
        return manifest

    def _persist_manifest(self, manifest: DictionaryManifest):
        (self.data_dir / manifest.id / "manifest").write_text(
            _dump_json(manifest.to_doc()), "utf-8"
        )

    def manifest(self, dictionary_id: str) -> DictionaryManifest:
        return self._runtime(dictionary_id).manifest

    def dictionaries(self) -> list[DictionaryManifest]:
        return [r.manifest for _, r in sorted(self._runtimes.items())]

    def dictionaries_for_language(self, code: str) -> list[DictionaryManifest]:
        self.language(code)
        return [m for m in self.dictionaries() if code in m.language_codes]

    def _check_artifacts(self, runtime: _Runtime, state: str):
        manifest = runtime.manifest
        if state == SPARSE_INDEXED and runtime.sparse is None:
            raise MissingArtifact(f"{manifest.id}: no sparse index loaded")
        if state == FULLY_INDEXED and runtime.full is None:
            raise MissingArtifact(f"{manifest.id}: no full index loaded")
        if state == LOCATION_INDEXED and not runtime.marker_log.proposals:
            raise MissingArtifact(f"{manifest.id}: no location markers")
        if state == ANNOTATED and not (runtime.annotation_log and runtime.annotation_log.annotations):
            raise MissingArtifact(f"{manifest.id}: no annotations")
        if state == DIGITIZED and not runtime.digitized:
            raise MissingArtifact(f"{manifest.id}: no digitized entries")

    def advance_state(self, dictionary_id: str, new_state: str) -> DictionaryManifest:
        runtime = self._runtime(dictionary_id)
        with runtime.lock:
            current = runtime.manifest.index_state
            if (current, new_state) not in ALLOWED_TRANSITIONS:
                raise IllegalTransition(f"{current} -> {new_state}")
            self._check_artifacts(runtime, new_state)
            runtime.manifest.index_state = new_state
            self._persist_manifest(runtime.manifest)
            return runtime.manifest

    # -- index ingestion ---------------------------------------------------

    def ingest_index(self, dictionary_id: str, text: str, kind: str) -> LoadReport:
        runtime = self._runtime(dictionary_id)
        rules = self.rules_for_dictionary(dictionary_id)
        manifest = runtime.manifest
        with runtime.lock:
            if kind == "sparse":
                entries = parse_sparse_tsv(text)
                ordered = sorted(entries, key=lambda e: e.page)
                violations = validate_sorted(ordered, rules)
                if violations:
                    # Operators fix the data; an unsorted index is never served.
                    return LoadReport("sparse", len(entries), violations, installed=False)
                index = build_sparse(
                    entries, Variant(manifest.sparse_variant), manifest.page_count,
                    rules, dictionary_id=manifest.id, rules_ref=manifest.tailoring_ref,
                )
                runtime.sparse = index
                (self.data_dir / manifest.id / "sparse.tsv").write_text(
                    serialize_sparse_tsv(list(index.entries)), "utf-8"
                )
                return LoadReport("sparse", len(index.entries))
            if kind == "full":
                pairs = parse_full_tsv(text)
                index = build_full(
                    pairs, rules, page_count=manifest.page_count, dictionary_id=manifest.id,
                )
                runtime.full = index
                self._persist_full(manifest.id, index)
                return LoadReport("full", sum(len(p) for p in index.postings.values()))
            raise ValueError(f"kind must be sparse|full, got {kind!r}")

    def _persist_full(self, dictionary_id: str, index: FullIndex):
        directory = self.data_dir / dictionary_id
        (directory / "full.tsv").write_text(serialize_full_tsv(index), "utf-8")
        (directory / "full.provenance.tsv").write_text(serialize_provenance_tsv(index), "utf-8")

    # -- contributions -----------------------------------------------------

    def record_feedback(self, rec: FeedbackRecord) -> VoteTally:
        runtime = self._runtime(rec.dictionary_id)
        with runtime.lock:
            rec = FeedbackRecord(
                rec.dictionary_id, rec.page, normalize_word(rec.word), rec.verdict,
                rec.contributor, rec.timestamp or self.clock(),
            )
            tally = runtime.ledger.record(rec)
            self._append_log(rec.dictionary_id, "feedback.log", {
                "page": rec.page, "word": rec.word, "verdict": rec.verdict,
                "contributor": rec.contributor, "timestamp": rec.timestamp,
            })
            return tally

    def propose_marker(self, proposal: MarkerProposal) -> LocationMarker:
        runtime = self._runtime(proposal.dictionary_id)
        with runtime.lock:
            width, height = runtime.manifest.dimensions(proposal.page)
            if not 1 <= proposal.page <= runtime.manifest.page_count:
                raise PageOutOfRange(
                    f"page {proposal.page} outside 1..{runtime.manifest.page_count}"
                )
            if not (0 <= proposal.x < width and 0 <= proposal.y < height):
                raise MarkerOutOfBounds(
                    f"({proposal.x}, {proposal.y}) outside {width}x{height} page image"
                )
            proposal = MarkerProposal(
                proposal.dictionary_id, proposal.page, normalize_word(proposal.word),
                proposal.x, proposal.y, proposal.contributor,
                proposal.timestamp or self.clock(),
            )
            marker = runtime.marker_log.propose(proposal)
            self._append_log(proposal.dictionary_id, "markers.log", {
                "page": proposal.page, "word": proposal.word,
                "x": proposal.x, "y": proposal.y,
                "contributor": proposal.contributor, "timestamp": proposal.timestamp,
            })
            return marker

    def attach_annotation(self, ann: Annotation) -> Annotation:
        runtime = self._runtime(ann.dictionary_id)
        with runtime.lock:
            ann = Annotation(
                dictionary_id=ann.dictionary_id, page=ann.page,
                word=normalize_word(ann.word), text=ann.text, meta=ann.meta,
            )
            stored = runtime.annotation_log.attach(ann)
            self._append_log(ann.dictionary_id, "annotations.log", {
                "id": stored.id, "page": stored.page, "word": stored.word,
                "text": stored.text, "meta": stored.meta,
            })
            return stored

    def store_digitization(self, entry: DigitizedEntry) -> DigitizedEntry:
        runtime = self._runtime(entry.dictionary_id)
        with runtime.lock:
            entry.validate()
            word = normalize_word(entry.word)
            has_marker = any(
                normalize_word(p.word) == word for p in runtime.marker_log.proposals
            )
            has_posting = runtime.full is not None and lookup_full(runtime.full, word).pages
            if not has_marker and not has_posting:
                raise UnknownTarget(f"{word!r} has no marker or full-index entry")
            boxes = list(entry.boxes)
            if not boxes and runtime.manifest.index_state in (
                LOCATION_INDEXED, ANNOTATED, DIGITIZED,
            ):
                boxes = self.automatic_boxes(entry.dictionary_id, word)
            stored = DigitizedEntry(
                dictionary_id=entry.dictionary_id, word=word, fields=dict(entry.fields),
                boxes=boxes,
                meta={**entry.meta, "updated": _iso(self.clock())},
                id=len(runtime.digitized) + 1,
            )
            runtime.digitized.append(stored)
            self._append_log(entry.dictionary_id, "digitized.log", {
                "id": stored.id, "word": stored.word, "fields": stored.fields,
                "boxes": [
                    {"page": b.page, "top": b.top, "bottom": b.bottom,
                     "left": b.left, "right": b.right}
                    for b in stored.boxes
                ],
                "meta": stored.meta,
            })
            return stored

    def digitized_entries(self, dictionary_id: str) -> list[DigitizedEntry]:
        return list(self._runtime(dictionary_id).digitized)

    # -- geometry ----------------------------------------------------------

    def dictionary_layout(self, dictionary_id: str):
        """Dictionary-wide layout from every aggregated marker, or None."""
        runtime = self._runtime(dictionary_id)
        manifest = runtime.manifest
        markers = runtime.marker_log.all_markers()
        try:
            return estimate_layout(
                markers, manifest.image_width, manifest.image_height,
                reading_direction=manifest.reading_direction,
            )
        except InsufficientMarkers:
            return None

    def automatic_boxes(self, dictionary_id: str, word: str) -> list[RegionBox]:
        """Regions between the word's marker and the next marker in reading order."""
        runtime = self._runtime(dictionary_id)
        layout = self.dictionary_layout(dictionary_id)
        if layout is None:
            return []
        markers = runtime.marker_log.all_markers()
        ordered = sorted(
            markers, key=lambda m: (m.page, column_index(layout, m.x), m.y)
        )
        target = normalize_word(word)
        for position, marker in enumerate(ordered):
            if normalize_word(marker.word) == target:
                following = ordered[position + 1] if position + 1 < len(ordered) else None
                if following is not None and following.page > marker.page + 1:
                    following = None  # no layout knowledge for skipped pages
                try:
                    return region_boxes(marker, following, layout, layout)
                except (OrderViolation, ValueError):
                    return []
        return []

    # -- promotion ---------------------------------------------------------

    def sweep_promotions(self, dictionary_id: Optional[str] = None) -> dict[str, list]:
        """Promote confirmed-present votes into full indexes; idempotent."""
        targets = [dictionary_id] if dictionary_id else sorted(self._runtimes)
        applied: dict[str, list] = {}
        for dict_id in targets:
            runtime = self._runtime(dict_id)
            with runtime.lock:
                index = runtime.full or FullIndex(
                    dictionary_id=dict_id, page_count=runtime.manifest.page_count,
                )
                index, promotions = promotion_sweep(runtime.ledger, index)
                if promotions:
                    runtime.full = index
                    self._persist_full(dict_id, index)
                applied[dict_id] = promotions
        return applied

    # -- lookups used by the service ---------------------------------------

    def sparse_index(self, dictionary_id: str) -> Optional[SparseIndex]:
        return self._runtime(dictionary_id).sparse

    def full_index(self, dictionary_id: str) -> Optional[FullIndex]:
        return self._runtime(dictionary_id).full

    def feedback_ledger(self, dictionary_id: str) -> FeedbackLedger:
        return self._runtime(dictionary_id).ledger

    def marker_log(self, dictionary_id: str) -> MarkerLog:
        return self._runtime(dictionary_id).marker_log

    def annotation_log(self, dictionary_id: str) -> AnnotationLog:
        return self._runtime(dictionary_id).annotation_log
