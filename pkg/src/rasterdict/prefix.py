"""Language-wide prefix tree for exploring words without typing them.

Words group by their first few collation units (default three, the depth
printed page headers traditionally use); a word shorter than the depth sits
in a bucket keyed by the whole word. The tree is dictionary-independent, so
adding a dictionary never invalidates it. Oversized buckets can be split by
extending their prefix until every bucket fits a tolerance, and bucket-size
statistics support choosing depth and tolerance per language.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .collation import TailoringRuleSet, collation_key, expand_units
from .errors import RasterDictError


class UnknownPrefix(RasterDictError):
    """The requested prefix is not a node of the tree."""

    code = "UNKNOWN_PREFIX"


@dataclass(frozen=True)
class PrefixBucket:
    """One tree node: either children one unit deeper, or a leaf word list.

    ``terminal`` marks a whole-word bucket (every member equals the prefix),
    which can never split further.
    """

    prefix: str
    word_count: int
    terminal: bool
    children: Optional[tuple["PrefixBucket", ...]] = None
    words: Optional[tuple[str, ...]] = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None


@dataclass(frozen=True)
class PrefixStats:
    prefix_size: int
    count: int
    min: int
    q1: float
    median: float
    mean: float
    q3: float
    max: int


def _unit_text(units: Sequence[tuple[int, ...]]) -> str:
    return "".join("".join(chr(cp) for cp in unit) for unit in units)


def _expanded(words: Iterable[str], rules: TailoringRuleSet) -> list[tuple[str, list]]:
    expanded = []
    for word in words:
        units = expand_units(word, rules)
        if not word or not units:
            raise ValueError(f"word {word!r} has no collation units")
        expanded.append((word, units))
    expanded.sort(key=lambda pair: collation_key(pair[0], rules))
    return expanded


def _build_bucket(members: list[tuple[str, list]], prefix_units: list, depth: int,
                  rules: TailoringRuleSet) -> PrefixBucket:
    prefix = _unit_text(prefix_units)
    level = len(prefix_units)
    whole = [pair for pair in members if len(pair[1]) == level]
    rest = [pair for pair in members if len(pair[1]) > level]
    if level >= depth or not rest:
        if whole and not rest:
            return PrefixBucket(prefix=prefix, word_count=len(members), terminal=True,
                                words=tuple(w for w, _ in members))
        return PrefixBucket(prefix=prefix, word_count=len(members), terminal=False,
                            words=tuple(w for w, _ in members))
    children: list[PrefixBucket] = []
    if whole:
        children.append(
            PrefixBucket(prefix=prefix, word_count=len(whole), terminal=True,
                         words=tuple(w for w, _ in whole))
        )
    group: list[tuple[str, list]] = []
    for pair in rest:
        if group and pair[1][level] != group[-1][1][level]:
            children.append(_build_bucket(group, prefix_units + [group[-1][1][level]], depth, rules))
            group = []
        group.append(pair)
    if group:
        children.append(_build_bucket(group, prefix_units + [group[-1][1][level]], depth, rules))
    return PrefixBucket(prefix=prefix, word_count=len(members), terminal=False,
                        children=tuple(children))


def build_prefix_tree(words: Iterable[str], rules: TailoringRuleSet, depth: int = 3) -> PrefixBucket:
    """Group words by their first ``depth`` collation units."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    expanded = _expanded(words, rules)
    if not expanded:
        raise ValueError("cannot build a prefix tree from no words")
    return _build_bucket(expanded, [], depth, rules)


def _find_bucket(tree: PrefixBucket, prefix: str, rules: TailoringRuleSet) -> PrefixBucket:
    if prefix == "":
        return tree
    units = expand_units(prefix, rules)
    if not units:
        raise UnknownPrefix(f"prefix {prefix!r} has no collation units")
    node = tree
    for level in range(1, len(units) + 1):
        target = _unit_text(units[:level])
        if node.is_leaf:
            raise UnknownPrefix(f"no bucket for prefix {prefix!r}")
        matches = [
            child for child in node.children
            if child.prefix == target and not (child.terminal and level < len(units))
        ]
        if not matches:
            raise UnknownPrefix(f"no bucket for prefix {prefix!r}")
        node = matches[0]
    return node


def expand(prefix: str, tree: PrefixBucket, rules: TailoringRuleSet) -> Union[
    tuple[PrefixBucket, ...], tuple[str, ...]
]:
    """Children one level down, or the leaf word list at full depth.

    Results are collation-ordered and stable for a given tree, so responses
    may be cached downstream.
    """
    bucket = _find_bucket(tree, prefix, rules)
    return bucket.words if bucket.is_leaf else bucket.children


def split_oversized(tree: PrefixBucket, tolerance: int, rules: TailoringRuleSet) -> PrefixBucket:
    """Split every leaf bucket above the tolerance by extending its prefix.

    Whole-word buckets cannot split and stay as they are. Word counts are
    preserved exactly.
    """
    if tolerance < 1:
        raise ValueError("tolerance must be >= 1")

    def rebuild(bucket: PrefixBucket) -> PrefixBucket:
        if bucket.is_leaf:
            if bucket.terminal or bucket.word_count <= tolerance:
                return bucket
            members = _expanded(bucket.words, rules)
            prefix_units = expand_units(bucket.prefix, rules)
            deeper = _build_bucket(members, list(prefix_units), len(prefix_units) + 1, rules)
            if deeper.is_leaf:
                return deeper  # nothing to split into (single word form)
            return rebuild(deeper)
        return PrefixBucket(
            prefix=bucket.prefix,
            word_count=bucket.word_count,
            terminal=bucket.terminal,
            children=tuple(rebuild(child) for child in bucket.children),
        )

    return rebuild(tree)


def leaf_buckets(tree: PrefixBucket) -> list[PrefixBucket]:
    if tree.is_leaf:
        return [tree]
    out: list[PrefixBucket] = []
    for child in tree.children:
        out.extend(leaf_buckets(child))
    return out


def bucket_sizes(words: Iterable[str], prefix_size: int, rules: TailoringRuleSet) -> dict[str, int]:
    """Bucket sizes at one prefix size; short words bucket as whole words."""
    sizes: dict[str, int] = {}
    for word, units in _expanded(words, rules):
        key = _unit_text(units[: min(prefix_size, len(units))])
        sizes[key] = sizes.get(key, 0) + 1
    return sizes


def prefix_stats(words: Sequence[str], prefix_size: int, rules: TailoringRuleSet) -> PrefixStats:
    """Count/min/quartiles/mean/max of bucket sizes at one prefix size.

    Quartiles interpolate linearly between closest ranks; the mean is
    reported to one decimal.
    """
    if prefix_size < 1:
        raise ValueError("prefix_size must be >= 1")
    sizes = sorted(bucket_sizes(words, prefix_size, rules).values())
    count = len(sizes)
    total = sum(sizes)
    if count == 1:
        q1 = median = q3 = float(sizes[0])
    else:
        q1, median, q3 = statistics.quantiles(sizes, n=4, method="inclusive")
    return PrefixStats(
        prefix_size=prefix_size,
        count=count,
        min=sizes[0],
        q1=round(q1, 2),
        median=round(median, 2),
        mean=round(total / count, 1),
        q3=round(q3, 2),
        max=sizes[-1],
    )


def load_wordlist(text: str) -> list[str]:
    """One word per line; spell-checker affix flags after "/" are stripped."""
    seen: dict[str, None] = {}
    for raw in text.splitlines():
        word = raw.split("/", 1)[0].strip()
        if word:
            seen.setdefault(word, None)
    return list(seen)
