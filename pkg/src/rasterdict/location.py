"""Crowd-placed word locations, page-layout inference, and region geometry.

Markers aggregate repeated placement attempts for one (dictionary, page,
word); the layout of a page (margins, columns) is inferred from marker
positions alone, and the region belonging to a word is everything between
its marker and the next word's marker in reading order, possibly spanning
columns and the page boundary.

All geometry is integer pixels in source-image space. Boxes and layout
bounds are half-open: a box covers left <= x < right, top <= y < bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import RasterDictError, UnknownTarget

LAST_WINS = "last_wins"
LINEAR_MEAN = "linear_mean"
QUADRATIC_MEAN = "quadratic_mean"

LTR, RTL = "ltr", "rtl"


class MixedTarget(RasterDictError):
    """Proposals disagree on (dictionary, page, word)."""

    code = "MIXED_TARGET"


class InsufficientMarkers(RasterDictError):
    """Too few markers to infer a page layout."""

    code = "INSUFFICIENT_MARKERS"


class OrderViolation(RasterDictError):
    """Markers are not in strict reading order."""

    code = "ORDER_VIOLATION"


class MarkerOutOfBounds(RasterDictError):
    """Marker coordinates fall outside the page image."""

    code = "MARKER_OUT_OF_BOUNDS"


@dataclass(frozen=True)
class MarkerProposal:
    dictionary_id: str
    page: int
    word: str
    x: int
    y: int
    contributor: str
    timestamp: float


@dataclass(frozen=True)
class LocationMarker:
    word: str
    page: int
    x: int
    y: int
    proposal_count: int
    policy: str


@dataclass
class Annotation:
    dictionary_id: str
    page: int
    word: str
    text: str
    meta: dict
    id: Optional[int] = None


@dataclass(frozen=True)
class Margins:
    top: int
    bottom: int
    left: int
    right: int


@dataclass(frozen=True)
class PageLayout:
    margins: Margins
    columns: tuple[tuple[int, int], ...]  # (left, right) in reading order
    reading_direction: str = LTR
    page: Optional[int] = None  # None = dictionary-wide default


@dataclass(frozen=True)
class RegionBox:
    page: int
    top: int
    bottom: int
    left: int
    right: int

    def __post_init__(self):
        if self.top >= self.bottom or self.left >= self.right:
            raise ValueError(f"degenerate box {self}")

    @property
    def area(self) -> int:
        return (self.bottom - self.top) * (self.right - self.left)


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def aggregate_marker(proposals: Iterable[MarkerProposal], policy: str) -> LocationMarker:
    """Collapse placement attempts into one marker position.

    last_wins takes the latest attempt; the mean policies damp spamming by
    averaging (root-mean-square for quadratic_mean), rounded half-up.
    """
    items = list(proposals)
    if not items:
        raise MixedTarget("no proposals to aggregate")
    target = (items[0].dictionary_id, items[0].page, items[0].word)
    if any((p.dictionary_id, p.page, p.word) != target for p in items):
        raise MixedTarget(f"proposals span multiple targets, expected {target}")
    if policy == LAST_WINS:
        chosen = max(items, key=lambda p: (p.timestamp, p.contributor))
        x, y = chosen.x, chosen.y
    elif policy == LINEAR_MEAN:
        x = _round_half_up(sum(p.x for p in items) / len(items))
        y = _round_half_up(sum(p.y for p in items) / len(items))
    elif policy == QUADRATIC_MEAN:
        x = _round_half_up(math.sqrt(sum(p.x**2 for p in items) / len(items)))
        y = _round_half_up(math.sqrt(sum(p.y**2 for p in items) / len(items)))
    else:
        raise ValueError(f"unknown aggregation policy {policy!r}")
    return LocationMarker(
        word=items[0].word, page=items[0].page, x=x, y=y,
        proposal_count=len(items), policy=policy,
    )


def estimate_layout(
    markers: Iterable[LocationMarker],
    page_width: int,
    page_height: int,
    reading_direction: str = LTR,
    min_markers: int = 10,
    gap_fraction: float = 0.25,
    pad_fraction: float = 0.02,
) -> PageLayout:
    """Margins and column intervals from aggregated marker positions.

    Columns come from 1-D clustering of marker x values: sort, then split
    wherever the gap exceeds ``gap_fraction`` of the page width. Margins and
    column edges get ``pad_fraction`` padding (at least one pixel) so the
    markers themselves stay strictly inside.
    """
    items = list(markers)
    if len(items) < min_markers:
        raise InsufficientMarkers(f"{len(items)} markers, need {min_markers}")
    xs = sorted(m.x for m in items)
    ys = sorted(m.y for m in items)
    pad_x = max(1, _round_half_up(pad_fraction * page_width))
    pad_y = max(1, _round_half_up(pad_fraction * page_height))
    margins = Margins(
        top=max(0, ys[0] - pad_y),
        bottom=min(page_height, ys[-1] + pad_y),
        left=max(0, xs[0] - pad_x),
        right=min(page_width, xs[-1] + pad_x),
    )
    threshold = gap_fraction * page_width
    clusters: list[list[int]] = [[xs[0]]]
    for left, right in zip(xs, xs[1:]):
        if right - left > threshold:
            clusters.append([right])
        else:
            clusters[-1].append(right)
    columns = [
        (max(margins.left, cluster[0] - pad_x), min(margins.right, cluster[-1] + pad_x))
        for cluster in clusters
    ]
    if reading_direction == RTL:
        columns.reverse()
    return PageLayout(
        margins=margins,
        columns=tuple(columns),
        reading_direction=reading_direction,
    )


def column_index(layout: PageLayout, x: int) -> int:
    """Reading-order index of the column containing x (nearest on a miss)."""
    for i, (left, right) in enumerate(layout.columns):
        if left <= x < right:
            return i
    return min(
        range(len(layout.columns)),
        key=lambda i: min(abs(x - layout.columns[i][0]), abs(x - (layout.columns[i][1] - 1))),
    )


def _column_slice(layout: PageLayout, page: int, col: int, top: int, bottom: int) -> Optional[RegionBox]:
    left, right = layout.columns[col]
    top = max(top, layout.margins.top)
    bottom = min(bottom, layout.margins.bottom)
    if top >= bottom:
        return None
    return RegionBox(page=page, top=top, bottom=bottom, left=left, right=right)


def _page_tail(layout: PageLayout, page: int, col: int, from_y: int) -> list[RegionBox]:
    boxes = [_column_slice(layout, page, col, from_y, layout.margins.bottom)]
    boxes += [
        _column_slice(layout, page, c, layout.margins.top, layout.margins.bottom)
        for c in range(col + 1, len(layout.columns))
    ]
    return [b for b in boxes if b]


def _page_head(layout: PageLayout, page: int, col: int, to_y: int) -> list[RegionBox]:
    boxes = [
        _column_slice(layout, page, c, layout.margins.top, layout.margins.bottom)
        for c in range(col)
    ]
    boxes.append(_column_slice(layout, page, col, layout.margins.top, to_y))
    return [b for b in boxes if b]


def region_boxes(
    word_marker: LocationMarker,
    next_marker: Optional[LocationMarker],
    layout: PageLayout,
    next_page_layout: Optional[PageLayout] = None,
) -> list[RegionBox]:
    """Boxes covering everything from one word's marker to the next marker.

    In reading order: the rest of the word's column, any whole columns in
    between, and the next word's column down to its marker, continuing onto
    the next page when the next word starts there. Without a next marker the
    region runs to the end of the page.
    """
    col = column_index(layout, word_marker.x)
    if next_marker is None:
        return _page_tail(layout, word_marker.page, col, word_marker.y)
    if next_marker.page == word_marker.page:
        next_col = column_index(layout, next_marker.x)
        if (next_col, next_marker.y) <= (col, word_marker.y):
            raise OrderViolation(
                f"{next_marker.word!r} does not follow {word_marker.word!r} in reading order"
            )
        if next_col == col:
            box = _column_slice(layout, word_marker.page, col, word_marker.y, next_marker.y)
            return [box] if box else []
        boxes = [_column_slice(layout, word_marker.page, col, word_marker.y, layout.margins.bottom)]
        boxes += [
            _column_slice(layout, word_marker.page, c, layout.margins.top, layout.margins.bottom)
            for c in range(col + 1, next_col)
        ]
        boxes.append(_column_slice(layout, word_marker.page, next_col, layout.margins.top, next_marker.y))
        return [b for b in boxes if b]
    if next_marker.page < word_marker.page:
        raise OrderViolation(
            f"{next_marker.word!r} is on an earlier page than {word_marker.word!r}"
        )
    if next_page_layout is None:
        raise ValueError("next_page_layout required when the next word is on a later page")
    next_col = column_index(next_page_layout, next_marker.x)
    boxes = _page_tail(layout, word_marker.page, col, word_marker.y)
    boxes += _page_head(next_page_layout, next_marker.page, next_col, next_marker.y)
    return boxes


class MarkerLog:
    """Append-only proposal log with per-target aggregation.

    Single-writer: the owning store serializes appends. Aggregates are
    recomputed from the proposal list, so replaying the log reproduces them.
    """

    def __init__(self, policy: str = LINEAR_MEAN, page_width: int = 0, page_height: int = 0):
        self.policy = policy
        self.page_width = page_width
        self.page_height = page_height
        self.proposals: list[MarkerProposal] = []

    def propose(self, proposal: MarkerProposal) -> LocationMarker:
        if self.page_width and not 0 <= proposal.x < self.page_width:
            raise MarkerOutOfBounds(f"x={proposal.x} outside 0..{self.page_width - 1}")
        if self.page_height and not 0 <= proposal.y < self.page_height:
            raise MarkerOutOfBounds(f"y={proposal.y} outside 0..{self.page_height - 1}")
        if proposal.x < 0 or proposal.y < 0:
            raise MarkerOutOfBounds("negative coordinates")
        self.proposals.append(proposal)
        return self.marker_for(proposal.page, proposal.word)

    def proposals_for(self, page: int, word: str) -> list[MarkerProposal]:
        return [p for p in self.proposals if p.page == page and p.word == word]

    def marker_for(self, page: int, word: str) -> Optional[LocationMarker]:
        matching = self.proposals_for(page, word)
        if not matching:
            return None
        return aggregate_marker(matching, self.policy)

    def all_markers(self) -> list[LocationMarker]:
        targets: dict[tuple[int, str], None] = {}
        for p in self.proposals:
            targets.setdefault((p.page, p.word), None)
        return [self.marker_for(page, word) for page, word in targets]


class AnnotationLog:
    """Comments and linked resources attached to a located word."""

    def __init__(
        self,
        target_exists: Callable[[int, str], bool] = lambda page, word: True,
        clock: Callable[[], str] = None,
    ):
        self.target_exists = target_exists
        self.clock = clock or (lambda: "1970-01-01T00:00:00Z")
        self.annotations: list[Annotation] = []
        self._next_id = 1

    def attach(self, ann: Annotation) -> Annotation:
        if not ann.text:
            raise ValueError("annotation text must be non-empty")
        if not self.target_exists(ann.page, ann.word):
            raise UnknownTarget(f"{ann.word!r} on page {ann.page} is not indexed or marked")
        stored = Annotation(
            dictionary_id=ann.dictionary_id,
            page=ann.page,
            word=ann.word,
            text=ann.text,
            meta={**ann.meta, "updated": self.clock()},
            id=self._next_id,
        )
        self._next_id += 1
        self.annotations.append(stored)
        return stored

    def for_target(self, page: int, word: str) -> list[Annotation]:
        return [a for a in self.annotations if a.page == page and a.word == word]
