"""Whole-level assembly: one conditioned sample per layout cell."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import AnnotatedSegment, GameId, Provenance, TileGrid, pad_zelda_room
from .cvae import ConditionLabel, ModelParams, generate
from .errors import AnnotationError, ShapeError
from .layout import Layout, Position, cell_condition_label

LEVEL_MAGIC = "# levelblend level v1"


@dataclass(frozen=True)
class GamePolicy:
    """Per-cell game-bit assignment: each bit is set independently with its probability."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValueError(f"game-bit probabilities must lie in [0, 1]: {self.probabilities}")

    @classmethod
    def uniform(cls, n: int) -> "GamePolicy":
        return cls((0.5,) * n)

    @classmethod
    def fixed(cls, bits: Sequence[int]) -> "GamePolicy":
        return cls(tuple(float(b) for b in bits))

    @property
    def width(self) -> int:
        return len(self.probabilities)

    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        u = rng.random(self.width)
        return tuple(int(x < p) for x, p in zip(u, self.probabilities))


@dataclass(frozen=True)
class CellProvenance:
    model: int
    game: GameId
    seed: int
    label: ConditionLabel


@dataclass
class Level:
    layout: Layout
    placements: dict[Position, AnnotatedSegment] = field(default_factory=dict)
    provenance: dict[Position, CellProvenance] = field(default_factory=dict)

    @property
    def segment_shape(self) -> tuple[int, int]:
        shapes = {s.grid.shape for s in self.placements.values()}
        if len(shapes) != 1:
            raise ShapeError(f"level placements have shapes {sorted(shapes)}")
        return shapes.pop()

    def check(self) -> None:
        """Every cell placed once, with directional bits equal to its open sides."""
        if set(self.placements) != set(self.layout.cells):
            raise ShapeError("placements do not cover the layout exactly")
        for pos, seg in self.placements.items():
            if tuple(seg.label) != tuple(self.layout.cells[pos].sides):
                raise ShapeError(f"cell {pos}: label {seg.label} differs from layout sides")


def _cell_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 63 - 1))


def assemble(
    layout: Layout,
    model: ModelParams,
    game_policy: GamePolicy | None = None,
    rng: np.random.Generator | None = None,
) -> Level:
    """Generate every cell of ``layout`` with ``model``.

    Blend models draw game bits per cell from ``game_policy`` (uniform 0.5 if
    omitted); single-game models take no policy.
    """
    rng = rng if rng is not None else np.random.default_rng()
    if model.n_game_bits and game_policy is None:
        game_policy = GamePolicy.uniform(model.n_game_bits)
    width = game_policy.width if game_policy else 0
    if 4 + width != model.label_width:
        raise ShapeError(
            f"game policy gives {4 + width}-bit labels but the model takes {model.label_width}"
        )
    level = Level(layout)
    for pos in layout.positions():
        bits = game_policy.draw(rng) if game_policy else ()
        label = cell_condition_label(layout.cells[pos], bits)
        seed = _cell_seed(rng)
        seg = generate(model, label, np.random.default_rng(seed), source="level")
        seg = replace(seg, provenance=Provenance("level", *pos))
        level.placements[pos] = seg
        level.provenance[pos] = CellProvenance(0, seg.game, seed, label)
    return level


def _target_shape(models: Sequence[ModelParams]) -> tuple[int, int]:
    shapes = {m.shape for m in models}
    if len(shapes) == 1:
        return shapes.pop()
    if shapes == {(11, 16), (15, 16)}:
        narrow = [m for m in models if m.shape == (11, 16)]
        if all(m.games == (GameId.ZELDA,) for m in narrow):
            return (15, 16)
    raise ShapeError(f"models have incompatible segment shapes {sorted(shapes)}")


def assemble_multi(
    layout: Layout,
    models: Sequence[ModelParams],
    probabilities: Sequence[float],
    rng: np.random.Generator | None = None,
) -> Level:
    """Take turns between single-game models, picking one per cell by probability.

    Zelda rooms are padded to 15x16 when mixed with 15x16 games.
    """
    rng = rng if rng is not None else np.random.default_rng()
    probs = np.asarray(probabilities, dtype=np.float64)
    if len(probs) != len(models) or not len(models):
        raise ValueError(f"need one probability per model ({len(models)}), got {len(probs)}")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities must be non-negative and sum to 1, got {list(probabilities)}")
    for m in models:
        if m.n_game_bits:
            raise ShapeError("multi-model assembly takes single-game models")
    target = _target_shape(models)
    cdf = np.cumsum(probs)
    level = Level(layout)
    for pos in layout.positions():
        k = min(int(np.searchsorted(cdf, rng.random(), side="right")), len(models) - 1)
        while probs[k] == 0.0:  # guard against landing on a zero-width bin at the top edge
            k -= 1
        model = models[k]
        label = cell_condition_label(layout.cells[pos])
        seed = _cell_seed(rng)
        seg = generate(model, label, np.random.default_rng(seed), source="level")
        grid = seg.grid
        if grid.shape != target:
            grid = pad_zelda_room(grid)
        level.placements[pos] = replace(seg, grid=grid, provenance=Provenance("level", *pos))
        level.provenance[pos] = CellProvenance(k, seg.game, seed, label)
    return level


# --- serialization ------------------------------------------------------------

def dumps_level(level: Level) -> str:
    out = [LEVEL_MAGIC, "@layout"]
    out.extend(level.layout.dumps().splitlines())
    for pos in level.layout.positions():
        seg = level.placements[pos]
        prov = level.provenance.get(pos)
        meta = f"model={prov.model} seed={prov.seed} label={prov.label}" if prov else f"label={seg.label}"
        out.append(
            f"@cell {pos[0]} {pos[1]} game={seg.game.value} shape={seg.grid.rows}x{seg.grid.cols} {meta}"
        )
        out.extend(seg.grid.lines())
    return "\n".join(out) + "\n"


def save_level(level: Level, path) -> None:
    Path(path).write_text(dumps_level(level), encoding="utf-8")


def loads_level(text: str) -> Level:
    lines = text.splitlines()
    if not lines or lines[0] != LEVEL_MAGIC:
        raise AnnotationError("missing level header")
    try:
        start = lines.index("@layout") + 1
    except ValueError:
        raise AnnotationError("level file has no @layout block") from None
    i = start
    while i < len(lines) and not lines[i].startswith("@cell"):
        i += 1
    level = Level(Layout.loads("\n".join(lines[start:i])))
    while i < len(lines):
        parts = lines[i].split()
        if not parts or parts[0] != "@cell":
            raise AnnotationError(f"line {i + 1}: expected @cell record")
        pos = (int(parts[1]), int(parts[2]))
        fields = dict(p.split("=", 1) for p in parts[3:])
        rows, cols = (int(v) for v in fields["shape"].split("x"))
        body = lines[i + 1:i + 1 + rows]
        if len(body) != rows or any(len(b) != cols for b in body):
            raise AnnotationError(f"line {i + 1}: cell body does not match {rows}x{cols}")
        label = ConditionLabel.parse(fields["label"])
        game = GameId.parse(fields["game"])
        level.placements[pos] = AnnotatedSegment(
            TileGrid(rows, cols, "".join(body)), label.directional, game,
            Provenance("level", *pos), label.game_bits,
        )
        if "seed" in fields:
            level.provenance[pos] = CellProvenance(int(fields["model"]), game, int(fields["seed"]), label)
        i += 1 + rows
    return level


def load_level(path) -> Level:
    return loads_level(Path(path).read_text(encoding="utf-8"))
