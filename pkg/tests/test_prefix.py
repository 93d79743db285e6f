import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from rasterdict.collation import TailoringRuleSet
from rasterdict.prefix import (
    PrefixBucket,
    UnknownPrefix,
    bucket_sizes,
    build_prefix_tree,
    expand,
    leaf_buckets,
    load_wordlist,
    prefix_stats,
    split_oversized,
)

from support import make_rules

EMPTY = TailoringRuleSet.empty()
FIVE = ["a", "an", "ant", "and", "bat"]


def brute_force_groups(words, size):
    # Character-based oracle; valid while tests use untailored rules.
    return Counter(w[: min(size, len(w))] for w in words)


def all_level_members(tree, level):
    """Multiset of words reachable under buckets cut at a given level."""
    found = Counter()

    def walk(bucket, depth):
        if bucket.is_leaf or depth == level:
            found.update(collect_words(bucket))
            return
        for child in bucket.children:
            walk(child, depth + 1)

    def collect_words(bucket):
        if bucket.is_leaf:
            return list(bucket.words)
        out = []
        for child in bucket.children:
            out.extend(collect_words(child))
        return out

    walk(tree, 0)
    return found


def test_depth_one_grouping_matches_brute_force():
    tree = build_prefix_tree(FIVE, EMPTY, depth=1)
    got = {child.prefix: child.word_count for child in tree.children}
    assert got == brute_force_groups(FIVE, 1) == {"a": 4, "b": 1}


def test_depth_three_short_words_key_whole():
    tree = build_prefix_tree(FIVE, EMPTY, depth=3)
    leaves = {leaf.prefix: leaf.word_count for leaf in leaf_buckets(tree)}
    assert leaves == {"a": 1, "an": 1, "ant": 1, "and": 1, "bat": 1}
    assert tree.word_count == 5


def test_empty_words_rejected():
    with pytest.raises(ValueError):
        build_prefix_tree(["a", ""], EMPTY)
    with pytest.raises(ValueError):
        build_prefix_tree([], EMPTY)


def test_expand_root_and_mid_levels():
    tree = build_prefix_tree(FIVE, EMPTY, depth=3)
    top = expand("", tree, EMPTY)
    assert [b.prefix for b in top] == ["a", "b"]
    children = expand("an", tree, EMPTY)
    # The exact word "an" surfaces as a terminal bucket among the children;
    # "and"/"ant" are terminal too since each holds only its own word.
    assert [(b.prefix, b.terminal) for b in children] == [
        ("an", True), ("and", True), ("ant", True),
    ]
    assert expand("and", tree, EMPTY) == ("and",)


def test_expand_unknown_prefix():
    tree = build_prefix_tree(FIVE, EMPTY, depth=3)
    with pytest.raises(UnknownPrefix):
        expand("zz", tree, EMPTY)
    with pytest.raises(UnknownPrefix):
        expand("anx", tree, EMPTY)


def test_expand_orders_by_collation():
    rules = make_rules(["a", "b", "c", "ch", "d"], normalize=False)
    tree = build_prefix_tree(["cad", "chad", "cbd"], rules, depth=2)
    # "ch" is one unit ranked after "c", so "chad" gets its own top bucket.
    assert [b.prefix for b in expand("", tree, rules)] == ["c", "ch"]
    assert [b.prefix for b in expand("c", tree, rules)] == ["ca", "cb"]
    assert [b.prefix for b in expand("ch", tree, rules)] == ["cha"]


def test_compound_unit_counts_as_one_letter():
    kaf, heh = "ک", "ھ"
    rules = make_rules([kaf, kaf + heh, "a", "b"], normalize=False)
    word = kaf + heh + "ab"
    tree = build_prefix_tree([word, kaf + "ab"], rules, depth=2)
    prefixes = sorted(b.prefix for b in tree.children)
    assert prefixes == sorted([kaf, kaf + heh])
    deeper = {b.prefix for b in expand(kaf + heh, tree, rules)}
    assert deeper == {kaf + heh + "a"}


def test_split_fixpoint_when_within_tolerance():
    tree = build_prefix_tree(FIVE, EMPTY, depth=1)
    assert split_oversized(tree, 10, EMPTY) == tree


def test_split_tolerance_one_gives_single_word_leaves():
    rng = random.Random(5)
    words = list({"".join(rng.choice("abc") for _ in range(rng.randint(1, 5))) for _ in range(40)})[:20]
    tree = build_prefix_tree(words, EMPTY, depth=1)
    split = split_oversized(tree, 1, EMPTY)
    for leaf in leaf_buckets(split):
        assert leaf.word_count == 1 or leaf.terminal
    assert sum(l.word_count for l in leaf_buckets(split)) == len(words)
    assert all_level_members(split, 99) == Counter(words)


def test_split_outlier_bucket():
    words = [f"con{suffix:04d}" for suffix in range(1798)]
    tree = build_prefix_tree(words, EMPTY, depth=3)
    assert leaf_buckets(tree)[0].word_count == 1798
    split = split_oversized(tree, 500, EMPTY)
    leaves = leaf_buckets(split)
    assert all(l.word_count <= 500 or l.terminal for l in leaves)
    assert sum(l.word_count for l in leaves) == 1798


@settings(deadline=None, max_examples=30)
@given(st.lists(st.text(alphabet="abcd", min_size=1, max_size=6), min_size=1, max_size=40),
       st.integers(1, 4))
def test_partition_property_at_every_level(words, depth):
    tree = build_prefix_tree(words, EMPTY, depth=depth)
    for level in range(1, depth + 1):
        assert all_level_members(tree, level) == Counter(words)
    sizes = bucket_sizes(words, depth, EMPTY)
    assert sum(sizes.values()) == len(words)


@settings(deadline=None, max_examples=30)
@given(st.lists(st.text(alphabet="abcd", min_size=1, max_size=6), min_size=1, max_size=60, unique=True))
def test_stats_mean_times_count_and_monotonicity(words):
    previous_count, previous_max = 0, None
    for size in range(1, 7):
        sizes = bucket_sizes(words, size, EMPTY)
        assert sum(sizes.values()) == len(words)  # exact, before rounding
        stats = prefix_stats(words, size, EMPTY)
        assert stats.count == len(sizes)
        assert stats.min <= stats.q1 <= stats.median <= stats.q3 <= stats.max
        assert stats.count >= previous_count
        if previous_max is not None:
            assert stats.max <= previous_max
        previous_count, previous_max = stats.count, stats.max


def test_stats_five_word_example():
    stats = prefix_stats(FIVE, 1, EMPTY)
    assert (stats.count, stats.min, stats.max) == (2, 1, 4)
    assert stats.mean == 2.5
    assert stats.median == 2.5


def test_wordlist_ingest_strips_flags_and_dedupes():
    text = "apple/NS\nbanana\napple/XY\n\n  cherry  \n"
    assert load_wordlist(text) == ["apple", "banana", "cherry"]
