"""Level parsing, segment extraction and labelling, and corpus persistence.

Levels are VGLC-style text: one character per tile, one line per row. Each game
binds a tile vocabulary and a segment size through ``data/games.json``:

    Zelda        11 x 16 rooms (2-tile wall perimeter around a 7 x 12 floor)
    Metroid      15 x 16 screens
    Mega Man     15 x 16 screens
    Lode Runner  22 x 32 levels split into four 11 x 16 quadrants

Directional labels are always ordered (Up, Down, Left, Right).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    AnnotationError,
    ExtractionError,
    LevelFormatError,
    ShapeError,
    VocabularyError,
)

CONFIG_ENV = "LEVELBLEND_GAMES_CONFIG"
CORPUS_MAGIC = "# levelblend corpus v1"


class GameId(str, Enum):
    ZELDA = "zelda"
    METROID = "metroid"
    MEGAMAN = "megaman"
    LODERUNNER = "loderunner"

    @classmethod
    def parse(cls, value: "str | GameId") -> "GameId":
        if isinstance(value, GameId):
            return value
        key = str(value).strip().lower().replace(" ", "").replace("_", "").replace("-", "")
        aliases = {"mm": "megaman", "lr": "loderunner", "met": "metroid", "z": "zelda"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown game {value!r}; expected one of {[g.value for g in cls]}") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GameConfig:
    game: GameId
    display: str
    vocabulary: str
    segment_shape: tuple[int, int]
    solid: frozenset[str]
    passable: frozenset[str]
    doors: frozenset[str]
    filler: frozenset[str]
    band: int = 1
    open_run: int = 2
    level_shape: tuple[int, int] | None = None
    legend: Mapping[str, str] = field(default_factory=dict)


def _config_source(path: str | os.PathLike | None) -> str:
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path:
        return Path(path).read_text(encoding="utf-8")
    return resources.files("levelblend").joinpath("data/games.json").read_text(encoding="utf-8")


@lru_cache(maxsize=8)
def _load_configs(source: str) -> dict[GameId, GameConfig]:
    raw = json.loads(source)
    configs = {}
    for name, entry in raw.items():
        game = GameId.parse(name)
        legend = dict(entry.get("legend", {}))
        vocabulary = entry.get("vocabulary") or "".join(legend)
        level_shape = entry.get("level_shape")
        configs[game] = GameConfig(
            game=game,
            display=entry.get("display", game.value),
            vocabulary=vocabulary,
            segment_shape=tuple(entry["segment_shape"]),
            solid=frozenset(entry.get("solid", "")),
            passable=frozenset(entry.get("passable", "")),
            doors=frozenset(entry.get("doors", "")),
            filler=frozenset(entry.get("filler", "")),
            band=int(entry.get("band", 1)),
            open_run=int(entry.get("open_run", 2)),
            level_shape=tuple(level_shape) if level_shape else None,
            legend=legend,
        )
    return configs


def game_config(game: "GameId | str", path: str | os.PathLike | None = None) -> GameConfig:
    """Return the tile configuration for ``game``.

    The packaged ``games.json`` is used unless ``path`` or the
    ``LEVELBLEND_GAMES_CONFIG`` environment variable names another file.
    """
    game = GameId.parse(game)
    configs = _load_configs(_config_source(path))
    if game not in configs:
        raise KeyError(f"no configuration for {game}")
    return configs[game]


class DirectionalLabel(NamedTuple):
    up: int = 0
    down: int = 0
    left: int = 0
    right: int = 0

    @classmethod
    def parse(cls, text: "str | Sequence[int]") -> "DirectionalLabel":
        if isinstance(text, str):
            parts = [p for p in text.replace(",", " ").split() if p]
        else:
            parts = list(text)
        if len(parts) != 4:
            raise AnnotationError(f"directional label needs 4 bits, got {len(parts)}: {text!r}")
        try:
            bits = [int(p) for p in parts]
        except (TypeError, ValueError):
            raise AnnotationError(f"non-integer label bit in {text!r}") from None
        if any(b not in (0, 1) for b in bits):
            raise AnnotationError(f"label bits must be 0 or 1: {text!r}")
        return cls(*bits)

    def flip_horizontal(self) -> "DirectionalLabel":
        return DirectionalLabel(self.up, self.down, self.right, self.left)

    def flip_vertical(self) -> "DirectionalLabel":
        return DirectionalLabel(self.down, self.up, self.left, self.right)

    @property
    def index(self) -> int:
        return self.up * 8 + self.down * 4 + self.left * 2 + self.right

    def __str__(self) -> str:
        return ",".join(str(b) for b in self)


ALL_LABELS: tuple[DirectionalLabel, ...] = tuple(
    DirectionalLabel(*bits) for bits in product((0, 1), repeat=4)
)


@dataclass(frozen=True)
class TileGrid:
    """Rectangular tile map stored as a row-major string."""

    rows: int
    cols: int
    tiles: str

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("grid dimensions must be non-negative")
        if len(self.tiles) != self.rows * self.cols:
            raise ShapeError(
                f"tile string has {len(self.tiles)} entries, expected {self.rows}x{self.cols}"
            )

    @classmethod
    def from_lines(cls, lines: Sequence[str]) -> "TileGrid":
        lines = list(lines)
        if not lines:
            return cls(0, 0, "")
        width = len(lines[0])
        if any(len(line) != width for line in lines):
            raise ShapeError("ragged rows")
        return cls(len(lines), width, "".join(lines))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, r: int) -> str:
        return self.tiles[r * self.cols:(r + 1) * self.cols]

    def lines(self) -> list[str]:
        return [self.row(r) for r in range(self.rows)]

    def column(self, c: int) -> str:
        return self.tiles[c::self.cols] if self.cols else ""

    def at(self, r: int, c: int) -> str:
        return self.tiles[r * self.cols + c]

    def text(self) -> str:
        return "\n".join(self.lines())

    def crop(self, top: int, left: int, height: int, width: int) -> "TileGrid":
        if top < 0 or left < 0 or top + height > self.rows or left + width > self.cols:
            raise ShapeError(f"crop {height}x{width}@({top},{left}) outside {self.rows}x{self.cols}")
        return TileGrid.from_lines(
            [self.row(r)[left:left + width] for r in range(top, top + height)]
        ) if height else TileGrid(0, width, "")

    def flip_horizontal(self) -> "TileGrid":
        return TileGrid.from_lines([line[::-1] for line in self.lines()])

    def flip_vertical(self) -> "TileGrid":
        return TileGrid.from_lines(self.lines()[::-1])

    def transpose(self) -> "TileGrid":
        return TileGrid.from_lines([self.column(c) for c in range(self.cols)])

    def as_array(self) -> np.ndarray:
        return np.array(list(self.tiles), dtype="<U1").reshape(self.rows, self.cols)

    def indices(self, vocabulary: str) -> np.ndarray:
        """Tile indices into ``vocabulary`` as an int array of shape (rows, cols)."""
        lookup = {ch: i for i, ch in enumerate(vocabulary)}
        try:
            flat = [lookup[ch] for ch in self.tiles]
        except KeyError as exc:
            raise ShapeError(f"tile {exc.args[0]!r} missing from vocabulary {vocabulary!r}") from None
        return np.array(flat, dtype=np.int64).reshape(self.rows, self.cols)

    @classmethod
    def from_indices(cls, idx: np.ndarray, vocabulary: str) -> "TileGrid":
        idx = np.asarray(idx)
        rows, cols = idx.shape
        return cls(rows, cols, "".join(vocabulary[i] for i in idx.ravel()))

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class Provenance:
    level: str
    row: int = 0
    col: int = 0
    variant: str = ""

    @property
    def key(self) -> str:
        base = f"{self.level}:{self.row}:{self.col}"
        return f"{base}+{self.variant}" if self.variant else base

    @classmethod
    def parse(cls, key: str) -> "Provenance":
        base, _, variant = key.partition("+")
        try:
            level, row, col = base.rsplit(":", 2)
            return cls(level, int(row), int(col), variant)
        except ValueError:
            raise AnnotationError(f"bad provenance key {key!r}") from None


@dataclass(frozen=True)
class AnnotatedSegment:
    grid: TileGrid
    label: DirectionalLabel | None
    game: GameId
    provenance: Provenance
    game_bits: tuple[int, ...] = ()


@dataclass
class Corpus:
    games: tuple[GameId, ...]
    segments: list[AnnotatedSegment]

    def __post_init__(self):
        self.games = tuple(GameId.parse(g) for g in self.games)
        seen = set()
        for seg in self.segments:
            key = (seg.game, seg.provenance.key)
            if key in seen:
                raise AnnotationError(f"duplicate provenance {seg.provenance.key}")
            seen.add(key)

    @property
    def vocabulary(self) -> str:
        """Sorted (by code point) union of the tile characters present."""
        chars: set[str] = set()
        for seg in self.segments:
            chars.update(seg.grid.tiles)
        return "".join(sorted(chars))

    @property
    def shape(self) -> tuple[int, int] | None:
        shapes = {seg.grid.shape for seg in self.segments}
        if len(shapes) > 1:
            raise ShapeError(f"corpus mixes segment shapes {sorted(shapes)}")
        return shapes.pop() if shapes else None

    @property
    def labels(self) -> list[DirectionalLabel]:
        return [seg.label for seg in self.segments]

    def __len__(self) -> int:
        return len(self.segments)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.games == other.games and self.segments == other.segments


def parse_level(text: str, game: "GameId | str", config: GameConfig | None = None) -> TileGrid:
    """Parse VGLC-style level text into a :class:`TileGrid`."""
    cfg = config or game_config(game)
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise LevelFormatError("empty level text")
    width = len(lines[0])
    if width == 0:
        raise LevelFormatError("first row is empty")
    vocab = set(cfg.vocabulary)
    for r, line in enumerate(lines):
        if len(line) != width:
            raise LevelFormatError(
                f"ragged rows: line {r + 1} has {len(line)} characters, expected {width}"
            )
        for c, ch in enumerate(line):
            if ch not in vocab:
                raise VocabularyError(ch, r, c, cfg.game.value)
    return TileGrid(len(lines), width, "".join(lines))


LODE_RUNNER_QUADRANT_LABELS = {
    (0, 0): DirectionalLabel(0, 1, 0, 1),
    (0, 1): DirectionalLabel(0, 1, 1, 0),
    (1, 0): DirectionalLabel(1, 0, 0, 1),
    (1, 1): DirectionalLabel(1, 0, 1, 0),
}


def extract_segments(
    level: TileGrid,
    game: "GameId | str",
    source: str = "level",
    *,
    allow_partial: bool = False,
    config: GameConfig | None = None,
) -> list[AnnotatedSegment]:
    """Cut a level into non-overlapping segments anchored at the top-left.

    Zelda rooms get door-derived labels and Lode Runner quadrants get
    position labels. Metroid and Mega Man segments are returned unlabelled;
    see :func:`label_segments`. Slots made entirely of filler tiles are dropped.
    """
    game = GameId.parse(game)
    cfg = config or game_config(game)
    h, w = cfg.segment_shape
    if game is GameId.LODERUNNER and cfg.level_shape and level.shape != tuple(cfg.level_shape):
        raise ExtractionError(
            f"Lode Runner levels must be {cfg.level_shape[0]}x{cfg.level_shape[1]}, got {level.rows}x{level.cols}"
        )
    if not allow_partial and (level.rows % h or level.cols % w):
        raise ExtractionError(
            f"{level.rows}x{level.cols} level does not tile into {h}x{w} segments"
        )
    if level.rows < h or level.cols < w:
        raise ExtractionError(f"{level.rows}x{level.cols} level is smaller than one {h}x{w} segment")

    out = []
    for sr in range(level.rows // h):
        for sc in range(level.cols // w):
            grid = level.crop(sr * h, sc * w, h, w)
            if cfg.filler and set(grid.tiles) <= cfg.filler:
                continue
            if game is GameId.ZELDA:
                label = derive_zelda_label(grid, cfg)
            elif game is GameId.LODERUNNER:
                label = LODE_RUNNER_QUADRANT_LABELS[(sr, sc)]
            else:
                label = None
            out.append(AnnotatedSegment(grid, label, game, Provenance(source, sr * h, sc * w)))
    return out


def _side_bands(grid: TileGrid, band: int) -> dict[str, list[str]]:
    """Lines making up each side's border band, outermost first."""
    band_r = min(band, grid.rows)
    band_c = min(band, grid.cols)
    return {
        "up": [grid.row(r) for r in range(band_r)],
        "down": [grid.row(grid.rows - 1 - r) for r in range(band_r)],
        "left": [grid.column(c) for c in range(band_c)],
        "right": [grid.column(grid.cols - 1 - c) for c in range(band_c)],
    }


def derive_zelda_label(room: TileGrid, config: GameConfig | None = None) -> DirectionalLabel:
    cfg = config or game_config(GameId.ZELDA)
    bands = _side_bands(room, cfg.band)
    bits = [int(any(ch in cfg.doors for line in bands[side] for ch in line))
            for side in ("up", "down", "left", "right")]
    return DirectionalLabel(*bits)


def _longest_run(line: str, allowed: frozenset[str]) -> int:
    best = run = 0
    for ch in line:
        run = run + 1 if ch in allowed else 0
        best = max(best, run)
    return best


def auto_label_openings(
    segment: TileGrid,
    game: "GameId | str",
    run: int | None = None,
    band: int | None = None,
    config: GameConfig | None = None,
) -> DirectionalLabel:
    """Heuristic opening detector for platformer segments.

    A side is open when its outermost ``band`` lines contain a contiguous run
    of at least ``run`` passable (or door) tiles.
    """
    cfg = config or game_config(game)
    run = cfg.open_run if run is None else run
    band = cfg.band if band is None else band
    allowed = cfg.passable | cfg.doors
    bands = _side_bands(segment, band)
    bits = [int(any(_longest_run(line, allowed) >= run for line in bands[side]))
            for side in ("up", "down", "left", "right")]
    return DirectionalLabel(*bits)


def label_segments(
    segments: Iterable[AnnotatedSegment],
    annotations: Mapping[str, DirectionalLabel] | None = None,
    *,
    strict: bool = False,
) -> list[AnnotatedSegment]:
    """Fill in labels: sidecar annotations win, otherwise keep or auto-derive.

    With ``strict`` every segment must have a sidecar entry.
    """
    annotations = annotations or {}
    out = []
    for seg in segments:
        key = seg.provenance.key
        if key in annotations:
            out.append(replace(seg, label=annotations[key]))
        elif strict:
            raise AnnotationError(f"no annotation for segment {key}")
        elif seg.label is None:
            out.append(replace(seg, label=auto_label_openings(seg.grid, seg.game)))
        else:
            out.append(seg)
    return out


def augment_zelda_flips(rooms: Sequence[AnnotatedSegment]) -> list[AnnotatedSegment]:
    """Add horizontal, vertical and combined flips of every room, deduplicated.

    Closing under both flips (including their composition) makes the
    operation idempotent. Order: each input followed by its new flips.
    """
    seen: set[TileGrid] = set()
    out = []
    for room in rooms:
        if room.game is not GameId.ZELDA:
            raise ShapeError(f"flip augmentation applies to Zelda rooms, got {room.game}")
        label = room.label if room.label is not None else derive_zelda_label(room.grid)
        h = room.grid.flip_horizontal()
        v = room.grid.flip_vertical()
        variants = [
            (room.grid, label, room.provenance.variant),
            (h, label.flip_horizontal(), "h"),
            (v, label.flip_vertical(), "v"),
            (h.flip_vertical(), label.flip_horizontal().flip_vertical(), "hv"),
        ]
        for grid, lab, tag in variants:
            if grid in seen:
                continue
            seen.add(grid)
            prov = room.provenance
            if tag != prov.variant:
                prov = replace(prov, variant=_compose_variant(prov.variant, tag))
            out.append(AnnotatedSegment(grid, lab, room.game, prov))
    return out


def _compose_variant(base: str, tag: str) -> str:
    flips = {"h": 0, "v": 0}
    for ch in base + tag:
        if ch in flips:
            flips[ch] ^= 1
    return ("h" if flips["h"] else "") + ("v" if flips["v"] else "")


def pad_zelda_room(room: TileGrid) -> TileGrid:
    """11x16 room -> 15x16 by repeating its two outermost rows at top and bottom."""
    if room.shape != (11, 16):
        raise ShapeError(f"Zelda padding expects an 11x16 room, got {room.rows}x{room.cols}")
    lines = room.lines()
    return TileGrid.from_lines(lines[:2] + lines + lines[-2:])


def pad_zelda_corpus(corpus: Corpus) -> Corpus:
    segs = [
        replace(s, grid=pad_zelda_room(s.grid)) if s.game is GameId.ZELDA and s.grid.shape == (11, 16) else s
        for s in corpus.segments
    ]
    return Corpus(corpus.games, segs)


# --- persistence -----------------------------------------------------------

def save_corpus(corpus: Corpus, path: str | os.PathLike) -> None:
    Path(path).write_text(dump_corpus(corpus), encoding="utf-8")


def dump_corpus(corpus: Corpus) -> str:
    out = [
        CORPUS_MAGIC,
        "games: " + ",".join(g.value for g in corpus.games),
        "vocabulary: " + corpus.vocabulary,
        f"segments: {len(corpus.segments)}",
    ]
    for seg in corpus.segments:
        label = "none" if seg.label is None else str(seg.label)
        bits = f" bits={','.join(map(str, seg.game_bits))}" if seg.game_bits else ""
        out.append(
            f"@segment game={seg.game.value} key={seg.provenance.key} "
            f"label={label} shape={seg.grid.rows}x{seg.grid.cols}{bits}"
        )
        out.extend(seg.grid.lines())
    return "\n".join(out) + "\n"


def load_corpus(path: str | os.PathLike) -> Corpus:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus file not found: {path}")
    return parse_corpus(path.read_text(encoding="utf-8"), str(path))


def parse_corpus(text: str, name: str = "<corpus>") -> Corpus:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CORPUS_MAGIC:
        raise AnnotationError(f"{name}: missing corpus header")
    header = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("@segment"):
        if lines[i].strip():
            key, sep, value = lines[i].partition(":")
            if not sep:
                raise AnnotationError(f"{name}:{i + 1}: malformed header line")
            header[key.strip()] = value.strip()
        i += 1
    try:
        games = tuple(GameId.parse(g) for g in header["games"].split(",") if g)
        declared = int(header["segments"])
    except (KeyError, ValueError) as exc:
        raise AnnotationError(f"{name}: bad header ({exc})") from None

    segments = []
    while i < len(lines):
        line = lines[i]
        if not line.startswith("@segment"):
            raise AnnotationError(f"{name}:{i + 1}: expected @segment record")
        fields = dict(tok.split("=", 1) for tok in line.split()[1:] if "=" in tok)
        try:
            game = GameId.parse(fields["game"])
            prov = Provenance.parse(fields["key"])
            rows, cols = (int(v) for v in fields["shape"].split("x"))
            label_text = fields["label"]
            bits = tuple(int(b) for b in fields["bits"].split(",")) if "bits" in fields else ()
        except (KeyError, ValueError) as exc:
            raise AnnotationError(f"{name}:{i + 1}: malformed segment record ({exc})") from None
        try:
            label = None if label_text == "none" else DirectionalLabel.parse(label_text)
        except AnnotationError as exc:
            raise AnnotationError(f"{name}:{i + 1}: {exc}") from None
        body = lines[i + 1:i + 1 + rows]
        if len(body) != rows or any(len(b) != cols for b in body):
            raise AnnotationError(f"{name}:{i + 1}: segment body does not match shape {rows}x{cols}")
        segments.append(AnnotatedSegment(TileGrid(rows, cols, "".join(body)), label, game, prov, bits))
        i += 1 + rows
    if len(segments) != declared:
        raise AnnotationError(f"{name}: header declares {declared} segments, found {len(segments)}")
    return Corpus(games, segments)


def load_annotations(path: str | os.PathLike) -> dict[str, DirectionalLabel]:
    """Read a sidecar of ``<provenance key> <u> <d> <l> <r>`` lines; ``#`` starts a comment line."""
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        try:
            out[key] = DirectionalLabel.parse(rest)
        except AnnotationError as exc:
            raise AnnotationError(f"{path}:{n}: {exc}") from None
    return out


def save_annotations(labels: Mapping[str, DirectionalLabel], path: str | os.PathLike) -> None:
    lines = [f"{key} {' '.join(str(b) for b in label)}" for key, label in labels.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_corpus(
    levels: Iterable[tuple[str, str]],
    game: "GameId | str",
    *,
    annotations: Mapping[str, DirectionalLabel] | None = None,
    augment: bool | None = None,
    pad: bool = False,
    allow_partial: bool = False,
    transpose: bool = False,
) -> Corpus:
    """Run the ingestion pipeline over ``(source name, level text)`` pairs.

    ``augment`` defaults to on for Zelda. ``pad`` turns Zelda rooms into 15x16.
    """
    game = GameId.parse(game)
    segments: list[AnnotatedSegment] = []
    for source, text in levels:
        grid = parse_level(text, game)
        if transpose:
            grid = grid.transpose()
        segments.extend(extract_segments(grid, game, source, allow_partial=allow_partial))
    segments = label_segments(segments, annotations)
    if augment is None:
        augment = game is GameId.ZELDA
    if augment and game is GameId.ZELDA:
        segments = augment_zelda_flips(segments)
    corpus = Corpus((game,), segments)
    return pad_zelda_corpus(corpus) if pad else corpus


def merge_corpora(corpora: Sequence[Corpus]) -> Corpus:
    games: list[GameId] = []
    segments: list[AnnotatedSegment] = []
    for c in corpora:
        for g in c.games:
            if g not in games:
                games.append(g)
        segments.extend(c.segments)
    return Corpus(tuple(games), segments)


def unique_labels(corpus: Corpus) -> set[DirectionalLabel]:
    return {s.label for s in corpus.segments if s.label is not None}


ANNOTATION_SIDECAR = "labels.txt"


def level_files(path: str | os.PathLike) -> list[Path]:
    """Level text files under ``path`` (a file or a directory), sorted by name."""
    path = Path(path)
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise FileNotFoundError(f"no such file or directory: {path}")
    return sorted(p for p in path.glob("*.txt") if p.name != ANNOTATION_SIDECAR)


def ingest_paths(paths: Iterable[str | os.PathLike], game: "GameId | str", **kw) -> Corpus:
    """Build a corpus from level files or directories; a ``labels.txt`` next to them is used as the sidecar."""
    files: list[Path] = []
    annotations: dict[str, DirectionalLabel] = dict(kw.pop("annotations", None) or {})
    for p in paths:
        found = level_files(p)
        files.extend(found)
        for sidecar in {f.parent / ANNOTATION_SIDECAR for f in found}:
            if sidecar.exists():
                annotations.update(load_annotations(sidecar))
    levels = []
    for f in files:
        try:
            text = f.read_text(encoding="utf-8")
            parse_level(text, game)
        except UnicodeDecodeError as exc:
            raise LevelFormatError(f"{f}: not UTF-8 text ({exc.reason})") from None
        except VocabularyError as exc:
            raise VocabularyError(exc.char, exc.row, exc.col, exc.game, source=str(f)) from None
        except LevelFormatError as exc:
            raise LevelFormatError(f"{f}: {exc}") from None
        levels.append((f.stem, text))
    return build_corpus(levels, game, annotations=annotations or None, **kw)
