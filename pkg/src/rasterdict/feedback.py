"""Found/not-found votes and the policies that turn them into certainty.

Users who land on a candidate page are asked whether the word was there.
Votes accumulate per (word, page) with one logical vote per contributor
(later votes replace earlier ones). A policy closes the tally: either a
minimum number of agreeing votes with a matching margin against dissent, or
a simple majority once enough votes are in. Confirmed-present pairs are
promoted into the full index; confirmed-absent pages let lookups rule pages
out before manual indexing ever finishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .errors import RasterDictError
from .full import FullIndex, lookup_full, promote

PRESENT, ABSENT = "present", "absent"
OPEN, CONFIRMED_PRESENT, CONFIRMED_ABSENT = "open", "confirmed_present", "confirmed_absent"


class IrrelevantPage(RasterDictError):
    """Vote on a page that is not a candidate for the word."""

    code = "IRRELEVANT_PAGE"


class UnknownDictionary(RasterDictError):
    """No such dictionary registered."""

    code = "UNKNOWN_DICTIONARY"


@dataclass(frozen=True)
class FeedbackRecord:
    dictionary_id: str
    page: int
    word: str
    verdict: str  # "present" | "absent"
    contributor: str
    timestamp: float = 0.0


@dataclass(frozen=True)
class VoteTally:
    present_votes: int
    absent_votes: int
    status: str = OPEN


@dataclass(frozen=True)
class ThresholdPolicy:
    """Close once one side has k votes and a margin of k over the other."""

    k: int = 3


@dataclass(frozen=True)
class MajorityPolicy:
    """Once min_votes are in, the strictly larger side wins; ties stay open."""

    min_votes: int = 5


Policy = ThresholdPolicy | MajorityPolicy


def apply_policy(tally: VoteTally, policy: Policy) -> str:
    present, absent = tally.present_votes, tally.absent_votes
    if isinstance(policy, ThresholdPolicy):
        k = policy.k
        if present >= k and (absent == 0 or present - absent >= k):
            return CONFIRMED_PRESENT
        if absent >= k and (present == 0 or absent - present >= k):
            return CONFIRMED_ABSENT
        return OPEN
    if isinstance(policy, MajorityPolicy):
        if present + absent >= policy.min_votes:
            if present > absent:
                return CONFIRMED_PRESENT
            if absent > present:
                return CONFIRMED_ABSENT
        return OPEN
    raise ValueError(f"unknown policy {policy!r}")


def policy_from_config(config) -> Policy:
    """Accepts {"kind": "threshold", "k": 3} or {"kind": "majority", "min_votes": 5}."""
    if isinstance(config, (ThresholdPolicy, MajorityPolicy)):
        return config
    if not config:
        return ThresholdPolicy()
    kind = config.get("kind", "threshold")
    if kind == "threshold":
        return ThresholdPolicy(k=int(config.get("k", 3)))
    if kind == "majority":
        return MajorityPolicy(min_votes=int(config.get("min_votes", 5)))
    raise ValueError(f"unknown feedback policy kind {kind!r}")


def policy_to_config(policy: Policy) -> dict:
    if isinstance(policy, ThresholdPolicy):
        return {"kind": "threshold", "k": policy.k}
    return {"kind": "majority", "min_votes": policy.min_votes}


class FeedbackLedger:
    """Append-only vote log for one dictionary.

    ``candidate_pages`` (word -> pages the sparse index allows) guards
    against drive-by votes on pages the word cannot be on; pass None to
    accept any page, e.g. for dictionaries that are not indexed yet.
    """

    def __init__(
        self,
        policy: Policy = ThresholdPolicy(),
        candidate_pages: Optional[Callable[[str], Sequence[int]]] = None,
    ):
        self.policy = policy
        self.candidate_pages = candidate_pages
        self.records: list[FeedbackRecord] = []

    def record(self, rec: FeedbackRecord) -> VoteTally:
        if rec.verdict not in (PRESENT, ABSENT):
            raise ValueError(f"verdict must be present|absent, got {rec.verdict!r}")
        if self.candidate_pages is not None:
            allowed = self.candidate_pages(rec.word)
            if rec.page not in allowed:
                raise IrrelevantPage(
                    f"page {rec.page} is not a candidate for {rec.word!r}"
                )
        self.records.append(rec)
        return self.tally(rec.page, rec.word)

    def tally(self, page: int, word: str) -> VoteTally:
        last_vote: dict[str, str] = {}
        for rec in self.records:
            if rec.page == page and rec.word == word:
                last_vote[rec.contributor] = rec.verdict
        present = sum(1 for verdict in last_vote.values() if verdict == PRESENT)
        absent = len(last_vote) - present
        open_tally = VoteTally(present, absent, OPEN)
        return VoteTally(present, absent, apply_policy(open_tally, self.policy))

    def targets(self) -> list[tuple[str, int]]:
        seen: dict[tuple[str, int], None] = {}
        for rec in self.records:
            seen.setdefault((rec.word, rec.page), None)
        return sorted(seen)

    def confirmed_absent_pages(self, word: str) -> set[int]:
        return {
            page
            for w, page in self.targets()
            if w == word and self.tally(page, w).status == CONFIRMED_ABSENT
        }


def promotion_sweep(
    ledger: FeedbackLedger, full_index: FullIndex
) -> tuple[FullIndex, list[tuple[str, int]]]:
    """Promote every confirmed-present (word, page) not yet in the index.

    Returns the replacement snapshot and the newly applied promotions;
    re-running immediately is a no-op.
    """
    promotions: list[tuple[str, int]] = []
    index = full_index
    for word, page in ledger.targets():
        if ledger.tally(page, word).status != CONFIRMED_PRESENT:
            continue
        if page in lookup_full(index, word).pages:
            continue
        index = promote(index, word, page)
        promotions.append((word, page))
    return index, promotions
