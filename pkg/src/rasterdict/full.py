"""Exhaustive word-to-pages index: certifies presence or absence.

Unlike the sparse index, postings need no global ordering, so this also
serves root-clustered and prefix/suffix-clustered dictionaries. Crowdsourced
feedback promotes confirmed (word, page) pairs into it over time; manually
indexed entries always outrank crowd promotions.
"""

from __future__ import annotations

import re
import unicodedata
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Iterable

from .collation import RootPattern, TailoringRuleSet, collation_key, matches_root
from .errors import PageOutOfRange, ParseError

YES, NO = "yes", "no"

MANUAL, CROWD = "manual", "crowd"

_WHITESPACE = re.compile(r"\s+")


def normalize_word(word: str) -> str:
    """Canonical composition plus single-space phrase boundaries."""
    return _WHITESPACE.sub(" ", unicodedata.normalize("NFC", word)).strip()


@dataclass(frozen=True)
class FullLookupResult:
    pages: tuple[int, ...]
    exists: str  # "yes" | "no"


@dataclass(frozen=True)
class FullIndex:
    """Immutable snapshot; ``promote`` returns a replacement snapshot."""

    dictionary_id: str = ""
    postings: dict = field(default_factory=dict)  # word -> tuple of pages
    provenance: dict = field(default_factory=dict)  # (word, page) -> manual|crowd
    rules_ref: str = ""
    page_count: int | None = None

    def words(self) -> list[str]:
        return list(self.postings)


def _check_page(page: int, page_count: int | None):
    if page < 1 or (page_count is not None and page > page_count):
        bound = page_count if page_count is not None else "∞"
        raise PageOutOfRange(f"page {page} outside 1..{bound}")


def build_full(
    pairs: Iterable[tuple[str, int]],
    rules: TailoringRuleSet,
    page_count: int | None = None,
    dictionary_id: str = "",
    rules_ref: str = "",
    provenance: str = MANUAL,
) -> FullIndex:
    """Merge (word, page) pairs into postings; input order is irrelevant."""
    staged: dict[str, set[int]] = {}
    for word, page in pairs:
        _check_page(page, page_count)
        normalized = normalize_word(word)
        if not normalized:
            raise ParseError("empty word after normalization", 0)
        staged.setdefault(normalized, set()).add(page)
    postings = {word: tuple(sorted(pages)) for word, pages in staged.items()}
    prov = {(word, page): provenance for word, pages in postings.items() for page in pages}
    return FullIndex(
        dictionary_id=dictionary_id,
        postings=postings,
        provenance=prov,
        rules_ref=rules_ref,
        page_count=page_count,
    )


def lookup_full(index: FullIndex, word: str) -> FullLookupResult:
    """All pages when present, certified absence otherwise.

    Matching is exact on the normalized word (no prefix matching); the
    collation tie-break makes distinct normalized spellings distinct words.
    """
    pages = index.postings.get(normalize_word(word))
    if pages:
        return FullLookupResult(pages=pages, exists=YES)
    return FullLookupResult(pages=(), exists=NO)


def promote(index: FullIndex, word: str, page: int) -> FullIndex:
    """New snapshot with a crowd-confirmed (word, page); idempotent.

    Manual provenance is never downgraded to crowd.
    """
    _check_page(page, index.page_count)
    normalized = normalize_word(word)
    existing = index.postings.get(normalized, ())
    if page in existing:
        return index  # already present; provenance untouched
    postings = dict(index.postings)
    postings[normalized] = tuple(sorted(existing + (page,)))
    prov = dict(index.provenance)
    prov[(normalized, page)] = CROWD
    return FullIndex(
        dictionary_id=index.dictionary_id,
        postings=postings,
        provenance=prov,
        rules_ref=index.rules_ref,
        page_count=index.page_count,
    )


@dataclass(frozen=True)
class RootMatch:
    root: RootPattern
    derivative: str | None
    pages: tuple[int, ...]


@dataclass(frozen=True)
class RootIndex:
    """Derivatives clustered under root patterns, collation-sorted inside."""

    roots: dict = field(default_factory=dict)  # RootPattern -> [(word, pages)]
    rules_ref: str = ""

    def with_derivative(
        self, root: RootPattern, word: str, pages: Iterable[int], rules: TailoringRuleSet
    ) -> "RootIndex":
        normalized = normalize_word(word)
        if not matches_root(normalized, root, rules):
            raise ValueError(f"{normalized!r} does not derive from root {root.letters}")
        roots = {pattern: list(items) for pattern, items in self.roots.items()}
        bucket = roots.setdefault(root, [])
        keyed = [(collation_key(w, rules), w, p) for w, p in bucket]
        insort(keyed, (collation_key(normalized, rules), normalized, tuple(sorted(pages))))
        roots[root] = [(w, p) for _, w, p in keyed]
        return RootIndex(roots=roots, rules_ref=self.rules_ref)


def build_root_index(
    derivatives: Iterable[tuple[RootPattern, str, Iterable[int]]], rules: TailoringRuleSet
) -> RootIndex:
    index = RootIndex()
    for root, word, pages in derivatives:
        index = index.with_derivative(root, word, pages, rules)
    return index


def lookup_by_root(index: RootIndex, word: str, rules: TailoringRuleSet) -> list[RootMatch]:
    """Exact derivative hits, else candidate roots the word could sit under."""
    normalized = normalize_word(word)
    exact: list[RootMatch] = []
    for root, items in index.roots.items():
        keys = [collation_key(w, rules) for w, _ in items]
        pos = bisect_left(keys, collation_key(normalized, rules))
        if pos < len(items) and items[pos][0] == normalized:
            exact.append(RootMatch(root=root, derivative=normalized, pages=items[pos][1]))
    if exact:
        return exact
    return [
        RootMatch(root=root, derivative=None, pages=())
        for root in index.roots
        if matches_root(normalized, root, rules)
    ]


def parse_full_tsv(text: str) -> list[tuple[str, int]]:
    """WORD<TAB>PAGE[,PAGE...] per line; # comments and blanks ignored."""
    pairs: list[tuple[str, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ParseError("expected WORD<TAB>PAGE[,PAGE...]", line_no)
        word, _, pages_text = line.partition("\t")
        if not word:
            raise ParseError("empty word", line_no)
        for chunk in pages_text.split(","):
            try:
                pairs.append((word, int(chunk.strip())))
            except ValueError:
                raise ParseError(f"bad page number {chunk!r}", line_no) from None
    return pairs


def serialize_full_tsv(index: FullIndex) -> str:
    """Canonical form: code-point-sorted words, ascending page lists."""
    lines = [
        f"{word}\t{','.join(str(p) for p in index.postings[word])}\n"
        for word in sorted(index.postings)
    ]
    return "".join(lines)


def parse_provenance_tsv(text: str) -> dict[tuple[str, int], str]:
    """Sidecar: WORD<TAB>PAGE<TAB>{manual|crowd} per line."""
    out: dict[tuple[str, int], str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[2] not in (MANUAL, CROWD):
            raise ParseError("expected WORD<TAB>PAGE<TAB>{manual|crowd}", line_no)
        try:
            out[(parts[0], int(parts[1]))] = parts[2]
        except ValueError:
            raise ParseError(f"bad page number {parts[1]!r}", line_no) from None
    return out


def serialize_provenance_tsv(index: FullIndex) -> str:
    lines = [
        f"{word}\t{page}\t{index.provenance.get((word, page), MANUAL)}\n"
        for word in sorted(index.postings)
        for page in index.postings[word]
    ]
    return "".join(lines)
