"""Page-anchored sparse indexes with predecessor lookup.

An index holds one anchor word per page (the page's first or last headword).
Lookup finds the anchor at or just before the query word and returns the
page range up to the next anchor: if the word is anywhere in the dictionary,
it is within that range. Windowed and alphabet-only indexes are the same
structure with fewer anchors, so the guarantee degrades to a wider range,
never to a miss.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .collation import TailoringRuleSet, collation_key, compare, expand_units
from .errors import PageOutOfRange, ParseError, RasterDictError

YES, NO, MAYBE = "yes", "no", "maybe"


class SortViolation(RasterDictError):
    """Anchor word order contradicts page order."""

    code = "SORT_VIOLATION"

    def __init__(self, positions: list[int]):
        super().__init__(f"word order contradicts page order at positions {positions}")
        self.positions = positions


class DuplicatePage(RasterDictError):
    """Two anchors share one page."""

    code = "DUPLICATE_PAGE"


class EmptyIndex(RasterDictError):
    """The index holds no entries."""

    code = "EMPTY_INDEX"


class InvalidAnchorWord(RasterDictError):
    """Alphabet anchors must be distinct single collation units."""

    code = "INVALID_ANCHOR"


class Variant(str, Enum):
    FIRST_WORD = "first_word"
    LAST_WORD = "last_word"


@dataclass(frozen=True)
class SparseEntry:
    word: str
    page: int


@dataclass(frozen=True)
class SparseLookupResult:
    pages: tuple[int, ...]
    exists: str  # "yes" | "maybe"
    anchor_word: str


@dataclass(frozen=True)
class SparseIndex:
    """Immutable snapshot; lookups are read-only and share it freely."""

    dictionary_id: str
    variant: Variant
    entries: tuple[SparseEntry, ...]
    page_count: int
    rules_ref: str = ""
    _keys: tuple = field(init=False, repr=False, compare=False, default=())

    def attach_keys(self, rules: TailoringRuleSet) -> "SparseIndex":
        keys = tuple(collation_key(e.word, rules) for e in self.entries)
        object.__setattr__(self, "_keys", keys)
        return self


def _coerce_entries(entries: Iterable) -> list[SparseEntry]:
    out = []
    for item in entries:
        out.append(item if isinstance(item, SparseEntry) else SparseEntry(*item))
    return out


def validate_sorted(entries: Sequence, rules: TailoringRuleSet) -> list[int]:
    """Positions i where entries[i].word sorts after entries[i+1].word."""
    items = _coerce_entries(entries)
    return [
        i
        for i in range(len(items) - 1)
        if compare(items[i].word, items[i + 1].word, rules) > 0
    ]


def build_sparse(
    entries: Iterable,
    variant: Variant,
    page_count: int,
    rules: TailoringRuleSet,
    dictionary_id: str = "",
    rules_ref: str = "",
) -> SparseIndex:
    """Validate and snapshot a sparse index, entries ordered by page."""
    items = sorted(_coerce_entries(entries), key=lambda e: e.page)
    if not items:
        raise EmptyIndex("cannot build an empty sparse index")
    for entry in items:
        if not entry.word:
            raise InvalidAnchorWord("anchor words must be non-empty")
        if not 1 <= entry.page <= page_count:
            raise PageOutOfRange(f"page {entry.page} outside 1..{page_count}")
    for left, right in zip(items, items[1:]):
        if left.page == right.page:
            raise DuplicatePage(f"page {left.page} anchored twice")
    violations = validate_sorted(items, rules)
    if violations:
        raise SortViolation(violations)
    index = SparseIndex(
        dictionary_id=dictionary_id,
        variant=variant,
        entries=tuple(items),
        page_count=page_count,
        rules_ref=rules_ref,
    )
    return index.attach_keys(rules)


def build_alphabet_index(
    letter_anchors: Iterable,
    page_count: int,
    rules: TailoringRuleSet,
    dictionary_id: str = "",
    rules_ref: str = "",
) -> SparseIndex:
    """Sparse index anchored only where a new letter's section begins."""
    items = _coerce_entries(letter_anchors)
    seen_units = set()
    for entry in items:
        units = expand_units(entry.word, rules)
        if len(units) != 1:
            raise InvalidAnchorWord(f"anchor {entry.word!r} is not a single collation unit")
        if units[0] in seen_units:
            raise InvalidAnchorWord(f"letter {entry.word!r} anchored twice")
        seen_units.add(units[0])
    return build_sparse(items, Variant.FIRST_WORD, page_count, rules, dictionary_id, rules_ref)


def lookup_sparse(index: SparseIndex, word: str, rules: TailoringRuleSet) -> SparseLookupResult:
    """Predecessor (or successor, for last-word anchors) binary search.

    Exact anchor hits answer "yes" with the pages the anchor run covers;
    otherwise the gap range between the neighbouring anchors comes back as
    "maybe". A query sorting outside every anchor returns the nearest
    anchored page, still "maybe": unanchored front matter or window gaps may
    hide the word, so absence is never asserted here.
    """
    if not index.entries:
        raise EmptyIndex("lookup on an empty index")
    keys = index._keys or tuple(collation_key(e.word, rules) for e in index.entries)
    entries = index.entries
    query_key = collation_key(word, rules)
    lo, hi = bisect_left(keys, query_key), bisect_right(keys, query_key)
    if lo < hi:
        first, last = entries[lo], entries[hi - 1]
        return SparseLookupResult(
            pages=tuple(range(first.page, last.page + 1)),
            exists=YES,
            anchor_word=first.word,
        )
    if index.variant is Variant.FIRST_WORD:
        pred = lo - 1
        if pred < 0:
            return SparseLookupResult((entries[0].page,), MAYBE, entries[0].word)
        start = entries[pred].page
        end = entries[pred + 1].page - 1 if pred + 1 < len(entries) else index.page_count
        return SparseLookupResult(tuple(range(start, end + 1)), MAYBE, entries[pred].word)
    succ = lo
    if succ >= len(entries):
        return SparseLookupResult((entries[-1].page,), MAYBE, entries[-1].word)
    start = entries[succ - 1].page + 1 if succ > 0 else 1
    return SparseLookupResult(tuple(range(start, entries[succ].page + 1)), MAYBE, entries[succ].word)


def parse_sparse_tsv(text: str) -> list[SparseEntry]:
    """Parse the on-disk form: WORD<TAB>PAGE per line, # comments, blanks ok."""
    entries = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ParseError("expected WORD<TAB>PAGE", line_no)
        word, _, page_text = line.partition("\t")
        if not word:
            raise ParseError("empty word", line_no)
        try:
            page = int(page_text.strip())
        except ValueError:
            raise ParseError(f"bad page number {page_text!r}", line_no) from None
        entries.append(SparseEntry(word, page))
    return entries


def serialize_sparse_tsv(entries: Sequence[SparseEntry]) -> str:
    """Canonical form: page-ordered, no comments."""
    ordered = sorted(_coerce_entries(entries), key=lambda e: e.page)
    return "".join(f"{e.word}\t{e.page}\n" for e in ordered)
