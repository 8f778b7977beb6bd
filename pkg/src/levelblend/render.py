"""Text and raster rendering of segments and assembled levels."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .assembler import Level
from .corpus import AnnotatedSegment, DirectionalLabel, GameId
from .errors import LevelBlendError, ShapeError
from .layout import Layout, LayoutCell, OFFSETS, OPPOSITE

DEFAULT_TILESET = "tileset.json"


class TilesetError(LevelBlendError):
    """A tile has no colour or sprite in the tileset."""


@dataclass(frozen=True)
class TextStyle:
    corner: str = "+"
    horizontal: str = "="
    vertical: str = ":"
    opening: str = " "
    background: str = " "


def single_cell_level(seg: AnnotatedSegment) -> Level:
    """Wrap one segment as a one-cell level whose open sides follow its label."""
    sides = seg.label if seg.label is not None else DirectionalLabel()
    layout = Layout({(0, 0): LayoutCell((0, 0), DirectionalLabel(*sides))}, 0)
    return Level(layout, {(0, 0): seg})


def _extent(level: Level) -> tuple[int, int, int, int, int, int]:
    if not level.placements:
        raise ShapeError("level has no placed segments")
    h, w = level.segment_shape
    r0, c0, r1, c1 = level.layout.bounds() if level.layout.cells else (0, 0, 0, 0)
    for r, c in level.placements:
        r0, c0, r1, c1 = min(r0, r), min(c0, c), max(r1, r), max(c1, c)
    return h, w, r0, c0, r1 - r0 + 1, c1 - c0 + 1


def _side_open(level: Level, pos, side: int) -> bool:
    """Open if either this cell or the neighbour across ``side`` says so."""
    cell = level.layout.cells.get(pos)
    if cell is not None and cell.sides[side]:
        return True
    dr, dc = OFFSETS[side]
    nb = level.layout.cells.get((pos[0] + dr, pos[1] + dc))
    return bool(nb is not None and nb.sides[OPPOSITE[side]])


def _mark_span(length: int) -> tuple[int, int]:
    """Centered span covering about a third of a side (at least one tile)."""
    n = max(1, length // 3)
    if (length - n) % 2:
        n += 1 if n < length else -1
    start = (length - n) // 2
    return start, start + n


def render_text(level: Level, style: TextStyle | None = None) -> str:
    """Tiles laid out by cell position inside border characters.

    Each cell takes ``(h + 1) x (w + 1)`` characters including its top/left
    border; a final bottom/right border closes the frame. Open sides are drawn
    as a gap in the border centred on the side.
    """
    st = style or TextStyle()
    h, w, r0, c0, nr, nc = _extent(level)
    H, W = nr * (h + 1) + 1, nc * (w + 1) + 1
    canvas = np.full((H, W), st.background, dtype="<U1")
    for i in range(nr + 1):
        canvas[i * (h + 1), :] = st.horizontal
    for j in range(nc + 1):
        canvas[:, j * (w + 1)] = st.vertical
    canvas[::h + 1, ::w + 1] = st.corner
    hs, he = _mark_span(w)
    vs, ve = _mark_span(h)
    for (r, c), seg in level.placements.items():
        top, left = (r - r0) * (h + 1), (c - c0) * (w + 1)
        canvas[top + 1:top + 1 + h, left + 1:left + 1 + w] = seg.grid.as_array()
        if _side_open(level, (r, c), 0):
            canvas[top, left + 1 + hs:left + 1 + he] = st.opening
        if _side_open(level, (r, c), 1):
            canvas[top + h + 1, left + 1 + hs:left + 1 + he] = st.opening
        if _side_open(level, (r, c), 2):
            canvas[top + 1 + vs:top + 1 + ve, left] = st.opening
        if _side_open(level, (r, c), 3):
            canvas[top + 1 + vs:top + 1 + ve, left + w + 1] = st.opening
    return "\n".join("".join(row) for row in canvas) + "\n"


# --- raster ---------------------------------------------------------------------

def _rgb(value: str) -> tuple[int, int, int]:
    v = value.lstrip("#")
    if len(v) != 6:
        raise TilesetError(f"colour {value!r} is not #rrggbb")
    return tuple(int(v[i:i + 2], 16) for i in (0, 2, 4))


@dataclass
class Tileset:
    """Tile character to colour (``#rrggbb``) or sprite path, per game with a shared fallback."""

    tile_size: int = 8
    border: int = 2
    background: str = "#000000"
    games: dict[str, dict[str, str]] = field(default_factory=dict)
    default: dict[str, str] = field(default_factory=dict)
    base_dir: Path | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def load(cls, path=None) -> "Tileset":
        if path is None:
            data = json.loads(resources.files("levelblend.data").joinpath(DEFAULT_TILESET).read_text("utf-8"))
            base = None
        else:
            path = Path(path)
            data = json.loads(path.read_text(encoding="utf-8"))
            base = path.parent
        return cls(
            int(data.get("tile_size", 8)), int(data.get("border", 2)), data.get("background", "#000000"),
            {GameId.parse(g).value: dict(m) for g, m in data.get("games", {}).items()},
            dict(data.get("default", {})), base,
        )

    def entry(self, game: GameId | str, tile: str) -> str:
        """Lookup order: the segment's game, the shared map, then any other game.

        Blended segments may carry tiles of every game in the blend.
        """
        g = GameId.parse(game).value
        tile = str(tile)
        for table in (self.games.get(g, {}), self.default, *self.games.values()):
            if tile in table:
                return table[tile]
        raise TilesetError(f"tileset has no entry for tile {tile!r} ({g})")

    def patch(self, game: GameId | str, tile: str) -> np.ndarray:
        """(tile_size, tile_size, 3) uint8 block for ``tile``."""
        tile = str(tile)
        key = (GameId.parse(game).value, tile)
        if key not in self._cache:
            value = self.entry(game, tile)
            t = self.tile_size
            if value.startswith("#"):
                block = np.empty((t, t, 3), dtype=np.uint8)
                block[:] = _rgb(value)
            else:
                sprite_path = Path(value) if self.base_dir is None else self.base_dir / value
                with Image.open(sprite_path) as im:
                    block = np.asarray(im.convert("RGB").resize((t, t), Image.NEAREST), dtype=np.uint8)
            self._cache[key] = block
        return self._cache[key]


WHITE = (255, 255, 255)
RED = (220, 0, 0)


def image_size(level: Level, tileset: Tileset) -> tuple[int, int]:
    """(width, height) in pixels: tiles plus one border line between and around cells."""
    h, w, _, _, nr, nc = _extent(level)
    t, b = tileset.tile_size, tileset.border
    return nc * w * t + (nc + 1) * b, nr * h * t + (nr + 1) * b


def render_image(level: Level, tileset: Tileset | None = None) -> Image.Image:
    """RGB image: coloured tiles, white cell borders, red dashes centred on open sides."""
    ts = tileset or Tileset.load()
    h, w, r0, c0, nr, nc = _extent(level)
    t, b = ts.tile_size, ts.border
    width, height = image_size(level, ts)
    px = np.empty((height, width, 3), dtype=np.uint8)
    px[:] = _rgb(ts.background)
    cell_w, cell_h = w * t + b, h * t + b
    for i in range(nr + 1):
        px[i * cell_h:i * cell_h + b, :] = WHITE
    for j in range(nc + 1):
        px[:, j * cell_w:j * cell_w + b] = WHITE
    hs, he = _mark_span(w * t)
    vs, ve = _mark_span(h * t)
    for (r, c), seg in level.placements.items():
        y0, x0 = (r - r0) * cell_h + b, (c - c0) * cell_w + b
        tiles = seg.grid.as_array()
        for rr in range(h):
            for cc in range(w):
                px[y0 + rr * t:y0 + (rr + 1) * t, x0 + cc * t:x0 + (cc + 1) * t] = ts.patch(seg.game, tiles[rr, cc])
        if _side_open(level, (r, c), 0):
            px[y0 - b:y0, x0 + hs:x0 + he] = RED
        if _side_open(level, (r, c), 1):
            px[y0 + h * t:y0 + h * t + b, x0 + hs:x0 + he] = RED
        if _side_open(level, (r, c), 2):
            px[y0 + vs:y0 + ve, x0 - b:x0] = RED
        if _side_open(level, (r, c), 3):
            px[y0 + vs:y0 + ve, x0 + w * t:x0 + w * t + b] = RED
    return Image.fromarray(px, "RGB")


def save_image(image: Image.Image, path) -> None:
    """PNG without timestamp metadata, so identical levels give identical files."""
    image.save(path, format="PNG", optimize=False)
