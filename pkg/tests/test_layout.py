import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levelblend.corpus import DirectionalLabel
from levelblend.cvae import ConditionLabel
from levelblend.errors import AnnotationError
from levelblend.layout import Layout, LayoutCell, cell_condition_label, generate_layout

STEP = {0: (-1, 0), 1: (1, 0), 2: (0, -1), 3: (0, 1)}


def oracle_check(layout: Layout) -> tuple[bool, bool]:
    """Union-find connectivity and pairwise door agreement, computed from raw cells."""
    parent = {p: p for p in layout.cells}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    agree = True
    for (r, c), cell in layout.cells.items():
        for side, bit in enumerate(cell.sides):
            dr, dc = STEP[side]
            other = layout.cells.get((r + dr, c + dc))
            back = other.sides[side ^ 1] if other else 0
            if bit != back:
                agree = False
            if bit and other:
                parent[find((r, c))] = find((r + dr, c + dc))
    roots = {find(p) for p in layout.cells}
    return len(roots) == 1, agree


def test_single_step_gives_two_joined_cells():
    layout = generate_layout(1, 1, np.random.default_rng(0))
    assert len(layout.cells) == 2
    opened = sum(sum(c.sides) for c in layout.cells.values())
    assert opened == 2 and layout.is_symmetric()


@pytest.mark.parametrize("lo,hi", [(0, 3), (5, 2), (-1, 1)])
def test_bad_step_range(lo, hi):
    with pytest.raises(ValueError):
        generate_layout(lo, hi, np.random.default_rng(0))


def test_thousand_layouts_against_oracle():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        steps = int(rng.integers(1, 20))
        layout = generate_layout(steps, steps, rng)
        connected, agree = oracle_check(layout)
        assert connected and agree
        assert layout.is_connected() and layout.is_symmetric()
        assert len(layout.cells) <= steps + 1


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 8))
def test_layout_properties(seed, lo, extra):
    layout = generate_layout(lo, lo + extra, np.random.default_rng(seed))
    assert layout.is_connected()
    assert layout.is_symmetric()
    assert lo <= layout.step_count <= lo + extra
    assert len(layout.cells) <= layout.step_count + 1


def test_layout_is_seeded():
    a = generate_layout(6, 12, np.random.default_rng(5))
    b = generate_layout(6, 12, np.random.default_rng(5))
    assert a.dumps() == b.dumps()


def test_checks_detect_broken_layouts():
    one_sided = Layout({
        (0, 0): LayoutCell((0, 0), DirectionalLabel(0, 0, 0, 1)),
        (0, 1): LayoutCell((0, 1), DirectionalLabel()),
    })
    assert not one_sided.is_symmetric()
    islands = Layout({
        (0, 0): LayoutCell((0, 0)),
        (5, 5): LayoutCell((5, 5)),
    })
    assert not islands.is_connected()


def test_dumps_round_trip():
    layout = generate_layout(6, 12, np.random.default_rng(3))
    again = Layout.loads(layout.dumps())
    assert again == layout


def test_loads_rejects_short_line():
    with pytest.raises(AnnotationError):
        Layout.loads("0 0 1 0 1\n")


def test_condition_labels():
    up_right = LayoutCell((0, 0), DirectionalLabel(1, 0, 0, 1))
    assert cell_condition_label(up_right) == ConditionLabel(DirectionalLabel(1, 0, 0, 1))
    assert tuple(cell_condition_label(LayoutCell((0, 0))).vector()) == (0, 0, 0, 0)
    down = LayoutCell((0, 0), DirectionalLabel(0, 1, 0, 0))
    assert tuple(cell_condition_label(down, (1, 0)).vector()) == (0, 1, 0, 0, 1, 0)
