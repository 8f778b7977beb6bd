"""Random connected layouts of cells with open/closed sides.

Growth starts from one fully closed cell. Each step picks a closed side
uniformly among all closed sides of all cells, creates a closed neighbour
there if none exists, and opens both facing sides.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import DirectionalLabel
from .cvae import ConditionLabel
from .errors import AnnotationError

Position = tuple[int, int]

# side index in (Up, Down, Left, Right) order -> (row offset, col offset)
OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1))
OPPOSITE = (1, 0, 3, 2)
DEFAULT_STEPS = (6, 12)


@dataclass(frozen=True)
class LayoutCell:
    position: Position
    sides: DirectionalLabel = DirectionalLabel()


@dataclass
class Layout:
    cells: dict[Position, LayoutCell] = field(default_factory=dict)
    step_count: int = 0

    def neighbours(self, pos: Position) -> list[Position]:
        r, c = pos
        cell = self.cells[pos]
        return [(r + dr, c + dc) for bit, (dr, dc) in zip(cell.sides, OFFSETS) if bit]

    def bounds(self) -> tuple[int, int, int, int]:
        """(min_row, min_col, max_row, max_col) over all cells."""
        rows = [p[0] for p in self.cells]
        cols = [p[1] for p in self.cells]
        return min(rows), min(cols), max(rows), max(cols)

    def positions(self) -> list[Position]:
        return sorted(self.cells)

    def is_connected(self) -> bool:
        if not self.cells:
            return True
        start = next(iter(self.cells))
        seen = {start}
        queue = deque([start])
        while queue:
            pos = queue.popleft()
            for nb in self.neighbours(pos):
                if nb in self.cells and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        return len(seen) == len(self.cells)

    def is_symmetric(self) -> bool:
        """Every open side faces an existing cell whose facing side is open."""
        for (r, c), cell in self.cells.items():
            for side, bit in enumerate(cell.sides):
                dr, dc = OFFSETS[side]
                nb = self.cells.get((r + dr, c + dc))
                facing = nb.sides[OPPOSITE[side]] if nb else 0
                if bit != facing:
                    return False
        return True

    def dumps(self) -> str:
        lines = [f"# layout steps={self.step_count}"]
        for pos in self.positions():
            lines.append(f"{pos[0]} {pos[1]} " + " ".join(str(b) for b in self.cells[pos].sides))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Layout":
        layout = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if line.startswith("# layout"):
                for tok in line.split()[2:]:
                    key, _, value = tok.partition("=")
                    if key == "steps":
                        layout.step_count = int(value)
                continue
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 6:
                raise AnnotationError(f"layout line {n}: expected 'row col U D L R', got {raw!r}")
            r, c = int(parts[0]), int(parts[1])
            layout.cells[(r, c)] = LayoutCell((r, c), DirectionalLabel.parse(parts[2:]))
        return layout


def _open(cell: LayoutCell, side: int) -> LayoutCell:
    bits = list(cell.sides)
    bits[side] = 1
    return LayoutCell(cell.position, DirectionalLabel(*bits))


def generate_layout(
    min_steps: int = DEFAULT_STEPS[0],
    max_steps: int = DEFAULT_STEPS[1],
    rng: np.random.Generator | None = None,
) -> Layout:
    if not 0 < min_steps <= max_steps:
        raise ValueError(f"need 0 < min_steps <= max_steps, got {min_steps}, {max_steps}")
    rng = rng if rng is not None else np.random.default_rng()
    steps = int(rng.integers(min_steps, max_steps + 1))
    layout = Layout({(0, 0): LayoutCell((0, 0))}, steps)
    done = attempts = 0
    while done < steps and attempts < 100 * steps:
        attempts += 1
        closed = [(pos, side) for pos in sorted(layout.cells)
                  for side, bit in enumerate(layout.cells[pos].sides) if not bit]
        if not closed:
            continue
        (r, c), side = closed[int(rng.integers(len(closed)))]
        dr, dc = OFFSETS[side]
        nb = (r + dr, c + dc)
        neighbour = layout.cells.get(nb) or LayoutCell(nb)
        if neighbour.sides[OPPOSITE[side]]:
            continue
        layout.cells[(r, c)] = _open(layout.cells[(r, c)], side)
        layout.cells[nb] = _open(neighbour, OPPOSITE[side])
        done += 1
    return layout


def cell_condition_label(cell: LayoutCell, game_bits: Sequence[int] | None = None) -> ConditionLabel:
    return ConditionLabel(cell.sides, tuple(int(b) for b in game_bits) if game_bits else ())
