"""
Board drawings. x_1 runs horizontally, x_2 vertically, origin bottom-left.
Boards of dimension d >= 3 are drawn as slices with x_3..x_d fixed.
"""
import itertools

import numpy as np

from .core import PreconditionError, require

QUEEN = 'Q'
EMPTY = '.'
CELL_PX = 20


def board(pl, fixed=()):
    """
    n x n array of the queens whose trailing coordinates equal fixed; row 0 is x_2 = 0
    :param pl: Placement, d >= 2
    :param fixed: values of x_3..x_d
    :return: numpy bool array indexed [x_2, x_1]
    """
    require(pl.d >= 2, 'rendering needs d >= 2, got {}'.format(pl.d))
    fixed = tuple(fixed)
    require(len(fixed) == pl.d - 2, 'a slice of Z_n^{} fixes {} coordinate(s), got {}'.format(pl.d, pl.d - 2, len(fixed)))
    require(all(0 <= c < pl.n for c in fixed), 'slice coordinates must lie in [0, {})'.format(pl.n))

    grid = np.zeros((pl.n, pl.n), dtype=bool)
    for q in pl.queens:
        if q[2:] == fixed:
            grid[q[1], q[0]] = True
    return grid


def _slices(pl, slice_at):
    if pl.d == 2:
        return [()]
    if slice_at is None:
        return list(itertools.product(range(pl.n), repeat=pl.d - 2))
    if isinstance(slice_at, int):
        slice_at = (slice_at,)
    return [tuple(slice_at)]


def _slice_title(pl, fixed):
    return ', '.join('x{} = {}'.format(i, c) for i, c in enumerate(fixed, start=3))


def render_text(pl, slice_at=None):
    """
    :param pl: Placement
    :param slice_at: x_3 (or the tuple x_3..x_d) to draw; None draws every slice
    :return: str
    """
    blocks = []
    for fixed in _slices(pl, slice_at):
        grid = board(pl, fixed)
        rows = [' '.join(QUEEN if cell else EMPTY for cell in grid[y]) for y in range(pl.n - 1, -1, -1)]
        if fixed:
            rows.insert(0, _slice_title(pl, fixed))
        blocks.append('\n'.join(rows))
    return '\n\n'.join(blocks) + '\n'


def render_svg(pl, slice_at=None, cell=CELL_PX):
    """
    Slices side by side, one board each
    :return: str, a standalone SVG document
    """
    slices = _slices(pl, slice_at)
    side = pl.n * cell
    gap = cell
    width = len(slices) * side + (len(slices) - 1) * gap
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">'.format(
            width, side, width, side),
    ]
    for s, fixed in enumerate(slices):
        left = s * (side + gap)
        grid = board(pl, fixed)
        parts.append('<g transform="translate({},0)">'.format(left))
        if fixed:
            parts.append('<title>{}</title>'.format(_slice_title(pl, fixed)))
        for x, y in itertools.product(range(pl.n), repeat=2):
            fill = '#b58863' if (x + y) % 2 == 0 else '#f0d9b5'
            top = (pl.n - 1 - y) * cell
            parts.append('<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>'.format(x * cell, top, cell, cell, fill))
            if grid[y, x]:
                parts.append('<circle cx="{}" cy="{}" r="{}" fill="#000000"/>'.format(
                    x * cell + cell // 2, top + cell // 2, cell * 3 // 8))
        parts.append('</g>')
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'


def render(pl, fmt='text', slice_at=None):
    if fmt == 'text':
        return render_text(pl, slice_at)
    if fmt == 'svg':
        return render_svg(pl, slice_at)
    raise PreconditionError('unknown render format {}'.format(fmt))
