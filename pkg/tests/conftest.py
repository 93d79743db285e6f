import pytest

from rasterdict.feedback import FeedbackRecord
from rasterdict.location import Annotation, MarkerProposal, RegionBox
from rasterdict.service import SearchService
from rasterdict.store import (
    FULLY_INDEXED,
    SPARSE_INDEXED,
    DictionaryManifest,
    DictionaryStore,
    DigitizedEntry,
    Language,
)

FIXED_CLOCK = 1_600_000_000.0  # 2020-09-13T12:26:40Z


def build_demo_store(root) -> DictionaryStore:
    """Three dictionaries in three indexing states plus a second language.

    Used by the service tests and the wire-format golden tests; everything
    it produces is deterministic (fixed clock, fixed data).
    """
    store = DictionaryStore(root, clock=lambda: FIXED_CLOCK)
    store.register_language(Language(code="en", display_name="English", direction="ltr"))
    store.register_language(Language(code="tr", display_name="Turkish", direction="ltr"))

    store.register_dictionary(
        DictionaryManifest(
            id="modern-full",
            title="Modern Desk Dictionary",
            language_codes=["en"],
            page_count=10,
            image_url_template="https://img.example/modern/{page}.jpg",
            image_width=900,
            image_height=1400,
        )
    )
    store.ingest_index("modern-full", "apple\t3\nkite\t4,5\nmango\t7\n", "full")
    store.advance_state("modern-full", FULLY_INDEXED)
    store.store_digitization(
        DigitizedEntry(
            dictionary_id="modern-full",
            word="kite",
            fields={"definition": "a toy flown on a string", "part_of_speech": "noun"},
            boxes=[RegionBox(page=4, top=100, bottom=220, left=80, right=460)],
            meta={"contributor": "dana"},
        )
    )

    store.register_dictionary(
        DictionaryManifest(
            id="classic-sparse",
            title="Classic Volumes",
            language_codes=["en"],
            page_count=12,
            image_url_template="https://img.example/classic/{page}.jpg",
            image_width=1000,
            image_height=1500,
            missing_pages=[3],
        )
    )
    store.ingest_index("classic-sparse", "apple\t1\nmango\t5\nzebra\t9\n", "sparse")
    store.advance_state("classic-sparse", SPARSE_INDEXED)
    store.propose_marker(MarkerProposal("classic-sparse", 2, "cat", 120, 340, "ann", 0.0))
    store.attach_annotation(
        Annotation("classic-sparse", 2, "cat", "also spelled katte in vol. 2",
                   {"contributor": "ann"})
    )
    store.record_feedback(FeedbackRecord("classic-sparse", 2, "cat", "present", "ann"))

    store.register_dictionary(
        DictionaryManifest(
            id="scans-only",
            title="Uncatalogued Scans",
            language_codes=["en"],
            page_count=30,
            image_url_template="https://img.example/scans/{page}.jpg",
            missing_pages=[1],
        )
    )

    store.register_dictionary(
        DictionaryManifest(
            id="tiny-full",
            title="Tiny Glossary",
            language_codes=["tr"],
            page_count=2,
            image_url_template="https://img.example/tiny/{page}.jpg",
        )
    )
    store.ingest_index("tiny-full", "elma\t1\n", "full")
    store.advance_state("tiny-full", FULLY_INDEXED)

    store.register_language(
        Language(code="cz", display_name="Czech-like", tailoring_ref="cz.rules",
                 wordlist_ref="cz.words", keyboard_layout_ref="cz.keys")
    )
    store.write_tailoring("cz.rules", "a\t10\nb\t20\nc\t30\nch\t35\nd\t40\nn\t50\nt\t60\n")
    store.write_wordlist("cz.words", "an\nand\nant\nbat\na\nchad\ncad\n")
    store.write_keyboard("cz.keys", {"rows": [["a", "b", "c", "ch", "d"], ["n", "t"]]})
    return store


@pytest.fixture
def demo_store(tmp_path):
    return build_demo_store(tmp_path / "data")


@pytest.fixture
def demo_service(demo_store):
    return SearchService(demo_store)
