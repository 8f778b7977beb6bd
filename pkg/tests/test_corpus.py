import filecmp

import numpy as np
import pytest
from hypothesis import given, strategies as st

from levelblend.corpus import (
    ALL_LABELS,
    AnnotatedSegment,
    Corpus,
    DirectionalLabel,
    GameId,
    Provenance,
    TileGrid,
    augment_zelda_flips,
    auto_label_openings,
    build_corpus,
    derive_zelda_label,
    dump_corpus,
    extract_segments,
    game_config,
    ingest_paths,
    load_corpus,
    merge_corpora,
    pad_zelda_corpus,
    pad_zelda_room,
    parse_corpus,
    parse_level,
    save_corpus,
    unique_labels,
)
from levelblend.errors import AnnotationError, ExtractionError, LevelFormatError, ShapeError, VocabularyError
from levelblend.synth import write_fixtures, zelda_room

from conftest import VGLC_FIXTURES


def zelda_grid(label, seed=0, stairs=False) -> TileGrid:
    room = zelda_room(label, np.random.default_rng(seed), stairs)
    return TileGrid.from_lines(["".join(r) for r in room])


def perimeter_doors(grid: TileGrid) -> tuple[int, int, int, int]:
    """Independent scan: which outer two-tile bands contain a door tile."""
    a = grid.as_array()
    return (
        int((a[:2] == "D").any()),
        int((a[-2:] == "D").any()),
        int((a[:, :2] == "D").any()),
        int((a[:, -2:] == "D").any()),
    )


# --- parsing ------------------------------------------------------------------

def test_parse_zelda_room_shape():
    text = zelda_grid((0, 1, 1, 0)).text()
    grid = parse_level(text, "zelda")
    assert grid.shape == (11, 16)


def test_parse_empty_is_format_error():
    with pytest.raises(LevelFormatError):
        parse_level("", GameId.ZELDA)


def test_parse_uniform_grid():
    grid = parse_level("WWW\nWWW\nWWW\n", "zelda")
    assert grid.shape == (3, 3) and set(grid.tiles) == {"W"}


def test_parse_ragged_rows():
    with pytest.raises(LevelFormatError, match="line 2"):
        parse_level("WWW\nWW\n", "zelda")


def test_parse_unknown_character_reports_position():
    with pytest.raises(VocabularyError) as info:
        parse_level("WWW\nWxW\n", "zelda")
    assert (info.value.row, info.value.col, info.value.char) == (1, 1, "x")


def test_parse_handles_crlf():
    assert parse_level("WF\r\nFW\r\n", "zelda").tiles == "WFFW"


def test_game_id_aliases():
    assert GameId.parse("Mega Man") is GameId.MEGAMAN
    assert GameId.parse("lode_runner") is GameId.LODERUNNER
    with pytest.raises(ValueError):
        GameId.parse("tetris")


# --- extraction -----------------------------------------------------------------

def loderunner_text(fill=".") -> str:
    rows = [fill * 32 for _ in range(21)] + ["B" * 32]
    return "\n".join(rows)


def test_loderunner_quadrants():
    grid = parse_level(loderunner_text(), "loderunner")
    segs = extract_segments(grid, "loderunner")
    assert len(segs) == 4
    assert all(s.grid.shape == (11, 16) for s in segs)
    labels = {(s.provenance.row, s.provenance.col): s.label for s in segs}
    assert labels[(0, 0)] == DirectionalLabel(0, 1, 0, 1)
    assert labels[(0, 16)] == DirectionalLabel(0, 1, 1, 0)
    assert labels[(11, 0)] == DirectionalLabel(1, 0, 0, 1)
    assert labels[(11, 16)] == DirectionalLabel(1, 0, 1, 0)


def test_loderunner_wrong_shape():
    grid = parse_level("\n".join(["." * 16] * 11), "loderunner")
    with pytest.raises(ExtractionError):
        extract_segments(grid, "loderunner")


def test_all_block_metroid_area_filtered():
    grid = parse_level("\n".join(["#" * 32] * 15), "metroid")
    assert extract_segments(grid, "metroid") == []


def test_single_segment_level():
    grid = zelda_grid((1, 0, 0, 0))
    segs = extract_segments(grid, "zelda")
    assert len(segs) == 1 and segs[0].grid == grid
    assert segs[0].provenance == Provenance("level", 0, 0)


def test_partial_levels_need_opt_in():
    grid = TileGrid.from_lines(["-" * 16 + "#"] * 15)
    with pytest.raises(ExtractionError):
        extract_segments(grid, "metroid")
    assert len(extract_segments(grid, "metroid", allow_partial=True)) == 1


# --- labels -----------------------------------------------------------------------

def test_zelda_label_three_doors():
    assert derive_zelda_label(zelda_grid((1, 1, 1, 0))) == DirectionalLabel(1, 1, 1, 0)


def test_zelda_label_no_doors():
    assert derive_zelda_label(zelda_grid((0, 0, 0, 0), stairs=True)) == DirectionalLabel(0, 0, 0, 0)


@pytest.mark.parametrize("label", ALL_LABELS, ids=str)
def test_zelda_label_matches_perimeter_scan(label):
    grid = zelda_grid(label, seed=label.index)
    assert tuple(derive_zelda_label(grid)) == perimeter_doors(grid) == tuple(label)


def test_enclosed_segment_has_no_openings():
    grid = TileGrid.from_lines(["#" * 16] + ["#" + "-" * 14 + "#"] * 13 + ["#" * 16])
    assert auto_label_openings(grid, "metroid") == DirectionalLabel(0, 0, 0, 0)


def test_empty_left_right_borders_are_open():
    grid = TileGrid.from_lines(["#" * 16] + ["-" * 16] * 13 + ["#" * 16])
    label = auto_label_openings(grid, "megaman")
    assert label.left == 1 and label.right == 1


def test_metroid_corridor_with_right_door():
    rows = ["#" * 16] * 10 + ["-" * 15 + "D"] * 3 + ["#" * 16] * 2
    grid = TileGrid.from_lines(rows)
    assert auto_label_openings(grid, "metroid") == DirectionalLabel(0, 0, 1, 1)


def test_label_parsing_errors():
    with pytest.raises(AnnotationError):
        DirectionalLabel.parse("1,0,1")
    with pytest.raises(AnnotationError):
        DirectionalLabel.parse("1 0 2 0")
    assert DirectionalLabel.parse("1 0 0 1") == DirectionalLabel(1, 0, 0, 1)


def test_label_flip_rules():
    assert DirectionalLabel(1, 0, 0, 1).flip_horizontal() == DirectionalLabel(1, 0, 1, 0)
    assert DirectionalLabel(1, 0, 0, 1).flip_vertical() == DirectionalLabel(0, 1, 0, 1)


# --- flip augmentation ------------------------------------------------------------

def zelda_segment(grid: TileGrid, name="r") -> AnnotatedSegment:
    return AnnotatedSegment(grid, derive_zelda_label(grid), GameId.ZELDA, Provenance(name))


def test_symmetric_room_contributes_once():
    grid = TileGrid.from_lines(["W" * 16] * 2 + ["WW" + "F" * 12 + "WW"] * 7 + ["W" * 16] * 2)
    assert len(augment_zelda_flips([zelda_segment(grid)])) == 1


def test_asymmetric_room_contributes_four():
    out = augment_zelda_flips([zelda_segment(zelda_grid((1, 0, 1, 0), seed=3))])
    assert len(out) == 4
    assert [s.provenance.variant for s in out] == ["", "h", "v", "hv"]


@given(st.lists(st.sampled_from(range(16)), min_size=1, max_size=6), st.integers(0, 50))
def test_flip_augmentation_idempotent_and_consistent(label_ids, seed):
    rooms = [zelda_segment(zelda_grid(ALL_LABELS[i], seed + k), f"r{k}") for k, i in enumerate(label_ids)]
    once = augment_zelda_flips(rooms)
    twice = augment_zelda_flips(once)
    assert {s.grid for s in once} == {s.grid for s in twice}
    assert len(twice) == len(once)
    for seg in once:
        assert seg.label == derive_zelda_label(seg.grid)


def test_flip_rejects_other_games():
    seg = AnnotatedSegment(TileGrid.from_lines(["-"]), None, GameId.METROID, Provenance("x"))
    with pytest.raises(ShapeError):
        augment_zelda_flips([seg])


# --- padding ----------------------------------------------------------------------

def test_padding_preserves_rows():
    grid = zelda_grid((0, 1, 0, 1), seed=4)
    padded = pad_zelda_room(grid)
    assert padded.shape == (15, 16)
    assert padded.lines()[2:13] == grid.lines()


def test_padding_uniform_room():
    padded = pad_zelda_room(TileGrid.from_lines(["F" * 16] * 11))
    assert set(padded.tiles) == {"F"} and padded.shape == (15, 16)


def test_padding_fixture_by_hand():
    lines = [chr(ord("a") + i) * 16 for i in range(11)]
    expected = ["a", "b", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "j", "k"]
    padded = pad_zelda_room(TileGrid.from_lines(lines))
    assert [line[0] for line in padded.lines()] == expected


def test_padding_shape_checked():
    with pytest.raises(ShapeError):
        pad_zelda_room(TileGrid.from_lines(["F" * 16] * 15))


def test_pad_corpus_only_touches_zelda(fixture_corpora):
    mixed = merge_corpora([fixture_corpora[GameId.ZELDA], fixture_corpora[GameId.METROID]])
    padded = pad_zelda_corpus(mixed)
    assert padded.shape == (15, 16)
    assert len(padded) == len(mixed)


# --- persistence ------------------------------------------------------------------

def small_corpus() -> Corpus:
    segs = [zelda_segment(zelda_grid(ALL_LABELS[i], seed=i), f"room{i}") for i in (1, 6, 15)]
    return Corpus((GameId.ZELDA,), segs)


def test_corpus_round_trip(tmp_path):
    corpus = small_corpus()
    save_corpus(corpus, tmp_path / "c.txt")
    assert load_corpus(tmp_path / "c.txt") == corpus


def test_round_trip_keeps_game_bits():
    seg = AnnotatedSegment(TileGrid.from_lines(["--"]), None, GameId.METROID, Provenance("m", 0, 0, "x"), (0, 1))
    corpus = Corpus((GameId.ZELDA, GameId.METROID), [seg])
    assert parse_corpus(dump_corpus(corpus)) == corpus


def test_short_label_in_file_rejected():
    text = dump_corpus(small_corpus()).replace("label=0,0,0,1", "label=0,0,1", 1)
    with pytest.raises(AnnotationError):
        parse_corpus(text)


def test_corpus_header_errors(tmp_path):
    with pytest.raises(AnnotationError):
        parse_corpus("not a corpus\n")
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path / "missing.txt")
    text = dump_corpus(small_corpus()).replace("segments: 3", "segments: 4")
    with pytest.raises(AnnotationError):
        parse_corpus(text)


def test_duplicate_provenance_rejected():
    seg = zelda_segment(zelda_grid((0, 0, 0, 1)))
    with pytest.raises(AnnotationError):
        Corpus((GameId.ZELDA,), [seg, seg])


def test_mixed_shapes_rejected(fixture_corpora):
    mixed = merge_corpora([fixture_corpora[GameId.ZELDA], fixture_corpora[GameId.METROID]])
    with pytest.raises(ShapeError):
        mixed.shape


# --- fixtures and ingestion -------------------------------------------------------

EXPECTED_FIXTURE_COUNTS = {
    GameId.ZELDA: (185, 16),
    GameId.METROID: (75, 12),
    GameId.MEGAMAN: (53, 9),
    GameId.LODERUNNER: (100, 4),
}


@pytest.mark.parametrize("game", list(GameId), ids=str)
def test_fixture_counts(fixture_corpora, game):
    corpus = fixture_corpora[game]
    assert (len(corpus), len(unique_labels(corpus))) == EXPECTED_FIXTURE_COUNTS[game]


def test_fixtures_regenerate_identically(tmp_path):
    write_fixtures(tmp_path, seed=1)
    for game in GameId:
        committed = sorted(p.name for p in (VGLC_FIXTURES / game.value).iterdir())
        fresh = sorted(p.name for p in (tmp_path / game.value).iterdir())
        assert committed == fresh
        match, mismatch, errors = filecmp.cmpfiles(VGLC_FIXTURES / game.value, tmp_path / game.value, committed, shallow=False)
        assert not mismatch and not errors


def test_ingest_is_deterministic():
    a = ingest_paths([VGLC_FIXTURES / "metroid"], "metroid")
    b = ingest_paths([VGLC_FIXTURES / "metroid"], "metroid")
    assert dump_corpus(a) == dump_corpus(b)


def test_platformer_sidecar_labels_used(fixture_corpora):
    corpus = fixture_corpora[GameId.MEGAMAN]
    sidecar = (VGLC_FIXTURES / "megaman" / "labels.txt").read_text().split("\n")
    first_key, *bits = sidecar[0].split()
    seg = next(s for s in corpus.segments if s.provenance.key == first_key)
    assert tuple(seg.label) == tuple(int(b) for b in bits)


def test_ingest_reports_file_on_bad_tile(tmp_path):
    (tmp_path / "bad.txt").write_text("WWW\nWzW\n")
    with pytest.raises(VocabularyError, match="bad.txt"):
        ingest_paths([tmp_path], "zelda")


def test_ingest_missing_path(tmp_path):
    with pytest.raises(FileNotFoundError):
        ingest_paths([tmp_path / "nope"], "zelda")


def test_build_corpus_padding_and_augment_flags():
    text = zelda_grid((1, 0, 0, 0), seed=2).text()
    plain = build_corpus([("a", text)], "zelda", augment=False)
    assert len(plain) == 1
    padded = build_corpus([("a", text)], "zelda", pad=True)
    assert padded.shape == (15, 16) and len(padded) == 4


def test_vocabulary_is_sorted_union(zelda_corpus):
    vocab = zelda_corpus.vocabulary
    assert list(vocab) == sorted(set(vocab))
    assert set(vocab) <= set(game_config("zelda").vocabulary)
