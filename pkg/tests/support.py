"""Shared helpers: rule-set builders, synthetic dictionaries, lookup oracles.

Oracles here are deliberately naive (linear scans, brute-force grouping) so
they stay independent of the library's optimized paths.
"""

from __future__ import annotations

import random

from rasterdict.collation import TailoringRuleSet, collation_key, compare


def make_rules(ordered_units, ignorables=(), normalize=True, language_code="test"):
    """Rules from unit strings listed in ascending order (weights 10, 20, ...)."""
    units = tuple(
        (tuple(ord(c) for c in unit), (i + 1) * 10)
        for i, unit in enumerate(ordered_units)
    )
    return TailoringRuleSet(
        language_code=language_code,
        units=units,
        ignorables=frozenset(ord(c) for c in ignorables),
        normalize=normalize,
    )


# Czech-style ordering: digraph "ch" ranks between "h" and "i".
CZECH_LIKE = make_rules(
    ["a", "b", "c", "d", "e", "f", "g", "h", "ch", "i", "j", "k", "l", "m",
     "n", "o", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z"],
    normalize=False,
)


class SyntheticDictionary:
    """A generated ground-truth dictionary: sorted words assigned to pages.

    ``truth`` maps each headword to the page its entry begins on. Every page
    holds at least one beginning headword, so first/last word anchors exist
    for each page.
    """

    def __init__(self, rules, truth, page_count, pages):
        self.rules = rules
        self.truth = truth  # word -> page
        self.page_count = page_count
        self.pages = pages  # page -> [words beginning on it, in order]

    def first_word_entries(self):
        return [(words[0], page) for page, words in sorted(self.pages.items())]

    def last_word_entries(self):
        return [(words[-1], page) for page, words in sorted(self.pages.items())]


def random_tailoring(rng: random.Random) -> TailoringRuleSet:
    """A shuffled Latin-ish alphabet with one two-code-point compound unit."""
    letters = [chr(c) for c in range(ord("a"), ord("z") + 1)]
    rng.shuffle(letters)
    first, second = rng.sample(letters, 2)
    compound = first + second
    insert_at = letters.index(first) + 1
    ordered = letters[:insert_at] + [compound] + letters[insert_at:]
    return make_rules(ordered, normalize=False)


def random_words(rng: random.Random, rules: TailoringRuleSet, n: int) -> list[str]:
    """n distinct words over the tailoring's units, sorted by collation."""
    alphabet = ["".join(chr(c) for c in seq) for seq, _ in rules.units] or [
        chr(c) for c in range(ord("a"), ord("z") + 1)
    ]
    words = set()
    while len(words) < n:
        length = rng.randint(1, 7)
        words.add("".join(rng.choice(alphabet) for _ in range(length)))
    return sorted(words, key=lambda w: collation_key(w, rules))


def synthetic_dictionary(rng: random.Random, rules=None, page_count=None,
                         max_words_per_page=20) -> SyntheticDictionary:
    rules = rules or random_tailoring(rng)
    page_count = page_count or rng.randint(10, 200)
    per_page = [rng.randint(1, max_words_per_page) for _ in range(page_count)]
    words = random_words(rng, rules, sum(per_page))
    pages: dict[int, list[str]] = {}
    truth: dict[str, int] = {}
    cursor = 0
    for page in range(1, page_count + 1):
        chunk = words[cursor : cursor + per_page[page - 1]]
        cursor += per_page[page - 1]
        pages[page] = chunk
        for word in chunk:
            truth[word] = page
    return SyntheticDictionary(rules, truth, page_count, pages)


def linear_lookup_first_word(entries, word, rules, page_count):
    """Predecessor scan over first-word anchors; mirrors the paper's criterion
    with a plain left-to-right pass instead of binary search."""
    match_positions = [i for i, (w, _) in enumerate(entries) if compare(w, word, rules) == 0]
    if match_positions:
        pages = list(range(entries[match_positions[0]][1], entries[match_positions[-1]][1] + 1))
        return pages, "yes"
    predecessor = None
    for i, (w, _) in enumerate(entries):
        if compare(w, word, rules) < 0:
            predecessor = i
        else:
            break
    if predecessor is None:
        return [entries[0][1]], "maybe"
    start = entries[predecessor][1]
    end = entries[predecessor + 1][1] - 1 if predecessor + 1 < len(entries) else page_count
    return list(range(start, end + 1)), "maybe"


def page_cells(layout, lo_pos=None, hi_pos=None):
    """Brute-force cell enumeration for the region-tiling oracle.

    Yields every integer pixel cell of a page that sits inside a column and
    whose reading position (column index, y) is within [lo_pos, hi_pos).
    """
    for ci, (left, right) in enumerate(layout.columns):
        for y in range(layout.margins.top, layout.margins.bottom):
            pos = (ci, y)
            if lo_pos is not None and pos < lo_pos:
                continue
            if hi_pos is not None and pos >= hi_pos:
                continue
            for x in range(left, right):
                yield (x, y)


def assert_exact_tiling(boxes, expected_by_page, page_dims):
    """Boxes must cover the expected cells exactly once and nothing else."""
    for page, expected in expected_by_page.items():
        width, height = page_dims[page]
        page_boxes = [b for b in boxes if b.page == page]
        coverage = {}
        for box in page_boxes:
            for y in range(box.top, box.bottom):
                for x in range(box.left, box.right):
                    cell = (x, y)
                    coverage[cell] = coverage.get(cell, 0) + 1
        assert all(count == 1 for count in coverage.values()), "overlapping boxes"
        assert set(coverage) == expected, "tiling differs from oracle cells"
        assert sum(b.area for b in page_boxes) == len(expected)
    assert {b.page for b in boxes} <= set(expected_by_page)


def linear_lookup_last_word(entries, word, rules, page_count):
    match_positions = [i for i, (w, _) in enumerate(entries) if compare(w, word, rules) == 0]
    if match_positions:
        pages = list(range(entries[match_positions[0]][1], entries[match_positions[-1]][1] + 1))
        return pages, "yes"
    successor = None
    for i in range(len(entries) - 1, -1, -1):
        if compare(word, entries[i][0], rules) < 0:
            successor = i
        else:
            break
    if successor is None:
        return [entries[-1][1]], "maybe"
    start = entries[successor - 1][1] + 1 if successor > 0 else 1
    return list(range(start, entries[successor][1] + 1)), "maybe"
