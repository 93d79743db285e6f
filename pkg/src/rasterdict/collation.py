"""Language- and dictionary-specific word ordering.

A tailoring assigns integer primary weights to collation units (sequences
of one to three code points, so a compound letter such as KAF + U+06BE can
rank as a single letter). Words expand into weight sequences by greedy
longest-match; code points outside the tailoring sort after every tailored
unit by a fixed offset, which keeps the ordering total without exhaustive
rule sets. Ignorable code points (diacritics) contribute no weight and are
only seen by the code-point tie-break.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .errors import ParseError

# Unknown code points map to UNTAILORED_OFFSET + ord(cp); tailored weights
# must stay below so unknowns always sort last.
UNTAILORED_OFFSET = 0x200000

LESS, EQUAL, GREATER = -1, 0, 1

MAX_UNIT_LENGTH = 3


@dataclass(frozen=True)
class TailoringRuleSet:
    """Ordered collation units plus ignorables for one language/dictionary.

    ``units`` maps code-point sequences to strictly increasing primary
    weights. ``normalize`` applies canonical composition (NFC) before
    expansion; rule files enable it so composed and decomposed input agree.
    """

    language_code: str = "und"
    units: tuple[tuple[tuple[int, ...], int], ...] = ()
    ignorables: frozenset[int] = frozenset()
    normalize: bool = True
    _unit_map: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        seen: dict[tuple[int, ...], int] = {}
        last_weight = None
        for seq, weight in self.units:
            if not 1 <= len(seq) <= MAX_UNIT_LENGTH:
                raise ValueError(f"unit {seq!r} must be 1..{MAX_UNIT_LENGTH} code points")
            if seq in seen:
                raise ValueError(f"duplicate unit {seq!r}")
            if last_weight is not None and weight <= last_weight:
                raise ValueError(f"weights must be strictly increasing, got {weight} after {last_weight}")
            if not 0 <= weight < UNTAILORED_OFFSET:
                raise ValueError(f"weight {weight} outside 0..{UNTAILORED_OFFSET - 1}")
            seen[seq] = weight
            last_weight = weight
        object.__setattr__(self, "_unit_map", seen)

    @classmethod
    def empty(cls, language_code: str = "und") -> "TailoringRuleSet":
        """Untailored rules: compare degenerates to plain code-point order."""
        return cls(language_code=language_code, normalize=False)

    @property
    def max_unit_length(self) -> int:
        return max((len(seq) for seq, _ in self.units), default=1)


@dataclass(frozen=True, order=True)
class CollationKey:
    """Primary weights plus the source word as the final tie-break.

    Keys compare lexicographically; Python's tuple/str ordering makes the
    dataclass ``order`` flag implement exactly that.
    """

    weights: tuple[int, ...]
    source_word: str


def expand_units(word: str, rules: TailoringRuleSet) -> list[tuple[int, ...]]:
    """Split a word into collation units by greedy longest match.

    Ignorable code points are dropped. Unknown code points become
    single-code-point units.
    """
    if rules.normalize:
        word = unicodedata.normalize("NFC", word)
    cps = tuple(ord(c) for c in word)
    units: list[tuple[int, ...]] = []
    unit_map = rules._unit_map
    longest = min(rules.max_unit_length, MAX_UNIT_LENGTH)
    i = 0
    n = len(cps)
    while i < n:
        matched = None
        for length in range(min(longest, n - i), 0, -1):
            candidate = cps[i : i + length]
            if candidate in unit_map:
                matched = candidate
                break
        if matched is not None:
            units.append(matched)
            i += len(matched)
        elif cps[i] in rules.ignorables:
            i += 1
        else:
            units.append((cps[i],))
            i += 1
    return units


def unit_weight(unit: tuple[int, ...], rules: TailoringRuleSet) -> int:
    """Primary weight of one collation unit under the tailoring."""
    weight = rules._unit_map.get(unit)
    if weight is not None:
        return weight
    if len(unit) != 1:
        raise KeyError(f"unknown multi-code-point unit {unit!r}")
    return UNTAILORED_OFFSET + unit[0]


def collation_key(word: str, rules: TailoringRuleSet) -> CollationKey:
    """Expand ``word`` into its primary-weight key."""
    weights = tuple(unit_weight(u, rules) for u in expand_units(word, rules))
    return CollationKey(weights=weights, source_word=word)


def compare(a: str, b: str, rules: TailoringRuleSet) -> int:
    """Total order over words: -1, 0, or 1 (cmp-style).

    Lexicographic on primary weights; equal weights fall back to plain
    code-point order of the original words, so distinct spellings never
    compare equal.
    """
    ka, kb = collation_key(a, rules), collation_key(b, rules)
    if ka < kb:
        return LESS
    if ka > kb:
        return GREATER
    return EQUAL


def sort_key(rules: TailoringRuleSet):
    """Key function for ``sorted(words, key=sort_key(rules))``."""
    return lambda word: collation_key(word, rules)


@dataclass(frozen=True)
class RootPattern:
    """Root letters that derivatives embed in order, e.g. K-T-B."""

    letters: tuple[str, ...]

    def __post_init__(self):
        if not 2 <= len(self.letters) <= 4:
            raise ValueError("root patterns have 2..4 letters")

    def letter_units(self, rules: TailoringRuleSet) -> list[tuple[int, ...]]:
        units = []
        for letter in self.letters:
            expanded = expand_units(letter, rules)
            if len(expanded) != 1:
                raise ValueError(f"root letter {letter!r} is not a single collation unit")
            units.append(expanded[0])
        return units


def matches_root(word: str, root: RootPattern, rules: TailoringRuleSet) -> bool:
    """True when the root letters occur in order within the word's units.

    Extra letters may appear anywhere (the derivative shape
    extras-L1-extras-L2-extras-L3-extras), including nowhere.
    """
    if not word:
        return False
    targets = root.letter_units(rules)
    pos = 0
    for unit in expand_units(word, rules):
        if pos < len(targets) and unit == targets[pos]:
            pos += 1
    return pos == len(targets)


def _format_codepoints(seq: tuple[int, ...]) -> str:
    return "".join(f"U+{cp:04X}" for cp in seq)


_HEX_DIGITS = set("0123456789abcdefABCDEF")


def _parse_unit_text(text: str, line_no: int) -> tuple[int, ...]:
    cps: list[int] = []
    i = 0
    while i < len(text):
        if text[i : i + 2] == "U+":
            j = i + 2
            while j < len(text) and j - i - 2 < 6 and text[j] in _HEX_DIGITS:
                j += 1
            if j - i - 2 < 4:
                raise ParseError(f"bad code point escape in {text!r}", line_no)
            cp = int(text[i + 2 : j], 16)
            if cp > 0x10FFFF:
                raise ParseError(f"code point U+{cp:X} out of range", line_no)
            cps.append(cp)
            i = j
        else:
            cps.append(ord(text[i]))
            i += 1
    if not 1 <= len(cps) <= MAX_UNIT_LENGTH:
        raise ParseError(f"unit {text!r} must be 1..{MAX_UNIT_LENGTH} code points", line_no)
    return tuple(cps)


def parse_tailoring(text: str, language_code: str = "und", normalize: bool = True) -> TailoringRuleSet:
    """Parse a tailoring rule file.

    One ``UNIT<TAB>WEIGHT`` rule per line, units written literally or as
    ``U+XXXX`` escapes; ``!IGNORE U+XXXX`` declares an ignorable; ``#``
    starts a comment line; blank lines allowed.
    """
    units: list[tuple[tuple[int, ...], int]] = []
    ignorables: set[int] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("!IGNORE"):
            arg = line[len("!IGNORE") :].strip()
            seq = _parse_unit_text(arg, line_no)
            if len(seq) != 1:
                raise ParseError("!IGNORE takes a single code point", line_no)
            ignorables.add(seq[0])
            continue
        if "\t" not in line:
            raise ParseError("expected UNIT<TAB>WEIGHT", line_no)
        unit_text, _, weight_text = line.partition("\t")
        try:
            weight = int(weight_text.strip())
        except ValueError:
            raise ParseError(f"bad weight {weight_text!r}", line_no) from None
        units.append((_parse_unit_text(unit_text, line_no), weight))
    units.sort(key=lambda uw: uw[1])
    try:
        return TailoringRuleSet(
            language_code=language_code,
            units=tuple(units),
            ignorables=frozenset(ignorables),
            normalize=normalize,
        )
    except ValueError as exc:
        raise ParseError(str(exc), 0) from exc


def serialize_tailoring(rules: TailoringRuleSet) -> str:
    """Canonical textual form: escaped units by weight, then ignorables."""
    lines = [f"{_format_codepoints(seq)}\t{weight}" for seq, weight in rules.units]
    lines.extend(f"!IGNORE U+{cp:04X}" for cp in sorted(rules.ignorables))
    return "\n".join(lines) + ("\n" if lines else "")
