"""Seeded generator of small VGLC-format level sets.

Useful for tests and demos when the real corpus is not at hand. Each game has
a distinct tile style so game classifiers can separate them, and openings are
drawn on the segment borders so directional classifiers have something to
learn. Platformer screens come with ground-truth label sidecars.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .corpus import DirectionalLabel, save_annotations
from .layout import generate_layout

# Label classes present in each platformer set (up, down, left, right).
METROID_LABELS = [
    (0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0), (0, 1, 1, 1),
    (1, 0, 0, 1), (1, 0, 1, 0), (1, 0, 1, 1), (1, 1, 0, 0), (1, 1, 0, 1), (1, 1, 1, 0),
]
MEGAMAN_LABELS = [
    (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0),
    (1, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 1, 0),
]

DEFAULT_COUNTS = {"zelda": 5, "metroid": 80, "megaman": 60, "loderunner": 25}


def _grid(rows: int, cols: int, fill: str) -> np.ndarray:
    return np.full((rows, cols), fill, dtype="<U1")


def _text(a: np.ndarray) -> str:
    return "\n".join("".join(r) for r in a) + "\n"


# --- Zelda --------------------------------------------------------------------

def _zelda_interior(rng: np.random.Generator, stairs: bool) -> np.ndarray:
    inner = _grid(7, 12, "F")
    style = int(rng.integers(6))
    if style == 1:
        for r, c in ((1, 2), (1, 9), (5, 2), (5, 9)):
            inner[r, c] = "B"
    elif style == 2:
        inner[2:5, 4:8] = "B"
    elif style == 3:
        inner[1, 1:11] = "B"
        inner[5, 1:11] = "B"
    elif style == 4:
        inner[2:5, 1:3] = "P"
        inner[2:5, 9:11] = "P"
    elif style == 5:
        inner[1:6:2, 1:11:3] = "B"
    for _ in range(int(rng.integers(0, 4))):
        r, c = int(rng.integers(7)), int(rng.integers(12))
        if inner[r, c] == "F":
            inner[r, c] = "M"
    if stairs:
        inner[3, 5:7] = "S"
    return inner


def zelda_room(label, rng: np.random.Generator, stairs: bool = False) -> np.ndarray:
    up, down, left, right = label
    room = _grid(11, 16, "W")
    room[2:9, 2:14] = _zelda_interior(rng, stairs)
    if up:
        room[0:2, 7:9] = "D"
        room[2, 7:9] = "F"
    if down:
        room[9:11, 7:9] = "D"
        room[8, 7:9] = "F"
    if left:
        room[5, 0:2] = "D"
        room[5, 2] = "F"
    if right:
        room[5, 14:16] = "D"
        room[5, 13] = "F"
    return room


def zelda_dungeon(rng: np.random.Generator) -> str:
    """One dungeon on a room grid; empty slots are void. A door-less stair room sits in an extra column."""
    layout = generate_layout(6, 12, rng)
    rmin, cmin, rmax, cmax = layout.bounds()
    rows, cols = rmax - rmin + 1, cmax - cmin + 2
    level = _grid(rows * 11, cols * 16, "-")
    for (r, c), cell in layout.cells.items():
        rr, cc = (r - rmin) * 11, (c - cmin) * 16
        level[rr:rr + 11, cc:cc + 16] = zelda_room(cell.sides, rng)
    level[0:11, (cols - 1) * 16:cols * 16] = zelda_room((0, 0, 0, 0), rng, stairs=True)
    return _text(level)


# --- Metroid ------------------------------------------------------------------

def metroid_screen(label, rng: np.random.Generator) -> np.ndarray:
    up, down, left, right = label
    s = _grid(15, 16, "-")
    s[0, :] = s[14, :] = "#"
    s[:, 0] = s[:, 15] = "#"
    for r0, c0 in ((1, 1), (1, 13), (12, 1), (12, 13)):  # rock corners
        if rng.random() < 0.7:
            s[r0:r0 + 2, c0:c0 + 2] = "#"
    for _ in range(int(rng.integers(1, 4))):
        r = int(rng.integers(4, 12))
        c = int(rng.integers(2, 10))
        s[r, c:c + int(rng.integers(3, 6))] = "B" if rng.random() < 0.4 else "#"
    if rng.random() < 0.5:
        s[13, 2:14] = "^"
    if up:
        s[0:4, 6:10] = "-"
    if down:
        s[11:15, 6:10] = "-"
    door = "D" if rng.random() < 0.5 else "-"
    if left:
        s[10:13, 0] = door
        s[10:13, 1:3] = "-"
    if right:
        s[10:13, 15] = door
        s[10:13, 13:15] = "-"
    for _ in range(int(rng.integers(0, 3))):
        r, c = int(rng.integers(2, 12)), int(rng.integers(2, 14))
        if s[r, c] == "-":
            s[r, c] = "E"
    return s


# --- Mega Man -----------------------------------------------------------------

def megaman_screen(label, rng: np.random.Generator) -> np.ndarray:
    up, down, left, right = label
    s = _grid(15, 16, "-")
    s[13:15, :] = "#"
    if not left:
        s[:, 0] = "#"
    if not right:
        s[:, 15] = "#"
    if not up:
        s[0, :] = "#"
    for _ in range(int(rng.integers(1, 3))):
        r = int(rng.integers(5, 11))
        c = int(rng.integers(2, 11))
        s[r, c:c + int(rng.integers(2, 5))] = "M" if rng.random() < 0.3 else "#"
    if rng.random() < 0.4:
        s[12, int(rng.integers(3, 12))] = "t"
    if rng.random() < 0.5:
        s[int(rng.integers(3, 11)), int(rng.integers(2, 14))] = "C"
    if rng.random() < 0.3:
        s[12, 5:8] = "H"
    if up:
        s[0:13, 11] = "|"
    if down:
        s[13:15, 3:6] = "-"
        s[8:15, 4] = "|"
    if left:
        s[9:13, 0] = "-"
    if right:
        s[9:13, 15] = "-"
    return s


def platformer_level(game: str, n_screens: int, rng: np.random.Generator) -> tuple[str, list[DirectionalLabel]]:
    """A horizontal strip of screens; labels returned in slot order (filler slots get none)."""
    classes = METROID_LABELS if game == "metroid" else MEGAMAN_LABELS
    make = metroid_screen if game == "metroid" else megaman_screen
    screens, labels = [], []
    for _ in range(n_screens):
        if rng.random() < 0.1:
            screens.append(_grid(15, 16, "@"))
            labels.append(None)
            continue
        lab = classes[int(rng.integers(len(classes)))]
        screens.append(make(lab, rng))
        labels.append(DirectionalLabel(*lab))
    return _text(np.concatenate(screens, axis=1)), labels


# --- Lode Runner --------------------------------------------------------------

def loderunner_level(rng: np.random.Generator) -> str:
    s = _grid(22, 32, ".")
    s[21, :] = "B"
    floors = sorted(int(r) for r in rng.choice(np.arange(3, 20), size=5, replace=False))
    for r in floors:
        start = int(rng.integers(0, 8))
        end = int(rng.integers(24, 33))
        s[r, start:end] = "B" if rng.random() < 0.8 else "b"
        gap = int(rng.integers(start, end - 2))
        s[r, gap:gap + 2] = "."
    for _ in range(int(rng.integers(3, 7))):
        c = int(rng.integers(32))
        top = int(rng.integers(1, 15))
        s[top:top + int(rng.integers(4, 9)), c] = "#"
    for _ in range(int(rng.integers(1, 3))):
        r = int(rng.integers(1, 20))
        c = int(rng.integers(0, 24))
        s[r, c:c + int(rng.integers(4, 9))] = "-"
    for ch, k in (("G", int(rng.integers(3, 7))), ("E", int(rng.integers(1, 4))), ("M", 1)):
        placed = 0
        while placed < k:
            r, c = int(rng.integers(0, 21)), int(rng.integers(32))
            if s[r, c] == ".":
                s[r, c] = ch
                placed += 1
    return _text(s)


# --- driver -------------------------------------------------------------------

def write_fixtures(root, seed: int = 1, counts: dict[str, int] | None = None) -> dict[str, list[Path]]:
    """Write ``root/<game>/*.txt`` level files (plus ``labels.txt`` sidecars for platformers)."""
    counts = {**DEFAULT_COUNTS, **(counts or {})}
    root = Path(root)
    streams = dict(zip(sorted(counts), np.random.SeedSequence(seed).spawn(len(counts))))
    written: dict[str, list[Path]] = {}
    for game in sorted(counts):
        rng = np.random.default_rng(streams[game])
        out_dir = root / game
        out_dir.mkdir(parents=True, exist_ok=True)
        paths: list[Path] = []
        if game == "zelda":
            for i in range(counts[game]):
                paths.append(out_dir / f"dungeon_{i + 1:02d}.txt")
                paths[-1].write_text(zelda_dungeon(rng), encoding="utf-8")
        elif game == "loderunner":
            for i in range(counts[game]):
                paths.append(out_dir / f"level_{i + 1:03d}.txt")
                paths[-1].write_text(loderunner_level(rng), encoding="utf-8")
        else:
            remaining, sidecar, i = counts[game], {}, 0
            while remaining > 0:
                n = min(remaining, int(rng.integers(4, 9)))
                text, labels = platformer_level(game, n, rng)
                i += 1
                name = f"area_{i:02d}"
                paths.append(out_dir / f"{name}.txt")
                paths[-1].write_text(text, encoding="utf-8")
                for slot, lab in enumerate(labels):
                    if lab is not None:
                        sidecar[f"{name}:0:{slot * 16}"] = lab
                remaining -= n
            save_annotations(sidecar, out_dir / "labels.txt")
        written[game] = paths
    return written
