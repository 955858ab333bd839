"""Parametric Naskh-style glyph engine.

Every letter form is drawn from primitives (teeth, loops, domes, bowls,
boats, wedges) on a shared baseline grid. The geometry is deliberate:
letter bodies cross the high-transition zone a couple of rows above the
baseline, joined letters connect through a two-row baseline band, bowls
and tails dip strictly below that band, and dots stay clear of the
junction columns. Rendering is pure integer raster work, so output is
bit-reproducible everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .shaping import FINAL, INITIAL, ISOLATED, MEDIAL


@dataclass(frozen=True)
class FontMetrics:
    """Pixel geometry for one font size (pt grid, 1 pt ~ 1 px)."""

    size: int

    @property
    def stroke(self) -> int:
        return 2

    @property
    def tooth(self) -> int:
        # minimum 4 keeps ring interiors open (hole = height - 3 rows)
        return max(4, round(0.33 * self.size))

    @property
    def ascender(self) -> int:
        return round(0.95 * self.size)

    @property
    def descender(self) -> int:
        return max(5, round(0.55 * self.size))

    @property
    def dome(self) -> int:
        return self.ascender // 2 + 2

    @property
    def wedge_height(self) -> int:
        return round(0.62 * self.ascender)

    @property
    def connector(self) -> int:
        return max(3, round(0.25 * self.size))

    @property
    def letter_gap(self) -> int:
        return 2  # thinning can widen this by ~2, still letter-scale

    @property
    def word_gap(self) -> int:
        return round(1.6 * self.size)

    @property
    def above_extent(self) -> int:
        return self.ascender + 5  # room for dots over tall letters

    @property
    def below_extent(self) -> int:
        return self.descender + 6  # room for dots under final cups

    @property
    def line_height(self) -> int:
        return self.above_extent + 1 + self.below_extent


def _fill(c: np.ndarray, r0: int, r1: int, c0: int, c1: int) -> None:
    c[r0 : r1 + 1, max(c0, 0) : c1 + 1] = 1


def _dot(c: np.ndarray, top: int, left: int) -> None:
    _fill(c, top, top + 1, left, left + 1)


def _dots_above(c: np.ndarray, support_top: int, cx: int, n: int) -> None:
    """Dot cluster above a body part; ``cx`` is the support's right column."""
    top = support_top - 4
    if n == 1:
        _dot(c, top, cx - 1)
    elif n == 2:
        _dot(c, top, cx - 3)
        _dot(c, top, cx)
    else:
        _dot(c, top, cx - 3)
        _dot(c, top, cx)
        _dot(c, top - 3, cx - 1)


class Pen:
    """Draws one word right-to-left onto a canvas."""

    def __init__(self, canvas: np.ndarray, baseline: int, m: FontMetrics):
        self.c = canvas
        self.B = baseline
        self.m = m

    # -- primitives -------------------------------------------------------

    def tooth(self, x: int, height: int | None = None) -> int:
        h = height if height is not None else self.m.tooth
        _fill(self.c, self.B - h, self.B, x - 1, x)
        return 2

    def baseline_bar(self, c0: int, c1: int) -> None:
        _fill(self.c, self.B - 1, self.B, c0, c1)

    def ring(self, x: int, width: int, height: int) -> int:
        """Closed loop sitting on the baseline; encloses a hole."""
        B = self.B
        _fill(self.c, B - height, B - height + 1, x - width + 1, x)  # top
        _fill(self.c, B - 1, B, x - width + 1, x)                    # bottom
        _fill(self.c, B - height, B, x - 1, x)                       # right
        _fill(self.c, B - height, B, x - width + 1, x - width + 2)   # left
        return width

    def dome(self, x: int, width: int, height: int) -> int:
        B = self.B
        _fill(self.c, B - height, B - height + 1, x - width + 1, x)
        _fill(self.c, B - height, B, x - 1, x)
        _fill(self.c, B - height, B, x - width + 1, x - width + 2)
        return width

    def bowl(self, x: int, width: int) -> int:
        """Tail cup: rises at the right, dips below, resurfaces left."""
        B, t = self.B, self.m.tooth
        _fill(self.c, B - t, B + 1, x - 1, x)                        # right rim
        _fill(self.c, B + 2, B + 3, x - width + 1, x)                # bottom, below band
        _fill(self.c, B - t + 1, B + 1, x - width + 1, x - width + 2)  # left rim
        return width

    def boat(self, x: int, length: int) -> int:
        """Final-position body: right bump, flat bottom, tall left riser."""
        B, t = self.B, self.m.tooth
        _fill(self.c, B - t, B, x - 1, x)                # bump crosses the LMT
        self.baseline_bar(x - length + 1, x)
        _fill(self.c, B - t - 1, B, x - length + 1, x - length + 2)  # riser
        return length

    def cup(self, x: int, width: int) -> int:
        """Fused final cup (both rims rise, bottom below the band)."""
        B, t = self.B, self.m.tooth
        _fill(self.c, B - t, B + 1, x - 1, x)
        _fill(self.c, B + 2, B + 3, x - width + 1, x)
        _fill(self.c, B - t + 1, B + 1, x - width + 1, x - width + 2)
        return width

    def tail(self, x_head_left: int, start_row: int) -> None:
        """Raa-style descender sweeping down-left, inside the glyph box."""
        B, m = self.B, self.m
        length = max(3, round(0.3 * m.size))
        for i in range(1, length + 1):
            row = min(start_row + i, B + m.descender - 1)
            _fill(self.c, row, row, x_head_left - i - 1, x_head_left - i)


# -- letter bodies ---------------------------------------------------------
# Each function takes (pen, x_right) and returns the width consumed.


def _alef(p: Pen, x: int) -> int:
    _fill(p.c, p.B - p.m.ascender, p.B, x - 1, x)
    return 2


def _tooth_letter(dots_above: int = 0, dots_below: int = 0, stacked_below: bool = False):
    def draw(p: Pen, x: int) -> int:
        w = p.tooth(x)
        if dots_above:
            _dots_above(p.c, p.B - p.m.tooth, x, dots_above)
        if dots_below:
            _dot(p.c, p.B + 2, x - 1)
            if stacked_below and dots_below == 2:
                _dot(p.c, p.B + 5, x - 1)
        return w

    return draw


def _boat_letter(dots_above: int = 0, dots_below: int = 0):
    def draw(p: Pen, x: int) -> int:
        length = max(10, round(0.9 * p.m.size))
        p.boat(x, length)
        # dots sit right of center so they never shadow the left riser
        cx = x - length // 2 + 2
        if dots_above:
            _dots_above(p.c, p.B - p.m.tooth, cx, dots_above)
        if dots_below:
            _dot(p.c, p.B + 2, cx - 1)
        return length

    return draw


def _dome_letter(dot_above: bool = False, dot_below: bool = False):
    def draw(p: Pen, x: int) -> int:
        width = max(6, round(0.5 * p.m.size))
        p.dome(x, width, p.m.dome)
        if dot_above:
            _dot(p.c, p.B - p.m.dome - 4, x - width // 2 - 1)
        if dot_below:
            _dot(p.c, p.B + 2, x - width // 2 - 1)
        return width

    return draw


def _wedge(dot_above: bool = False):
    def draw(p: Pen, x: int) -> int:
        B, h = p.B, p.m.wedge_height
        for i in range(h + 1):
            _fill(p.c, B - h + i, B - h + i, x - 1 - i, x - i)
        p.baseline_bar(x - h - 1, x)
        if dot_above:
            _dot(p.c, B - h - 4, x - 1)
        return h + 2

    return draw


def _raa(dot_above: bool = False):
    def draw(p: Pen, x: int) -> int:
        B, t = p.B, p.m.tooth
        _fill(p.c, B - t, B + 1, x - 1, x)
        p.tail(x - 1, B + 1)
        if dot_above:
            _dot(p.c, B - t - 4, x - 1)
        return max(3, round(0.3 * p.m.size)) + 2

    return draw


def _seen(sheen: bool, final: bool):
    def draw(p: Pen, x: int) -> int:
        if not final:
            pitch = 5  # tooth (2) + intra-letter gap (3)
            for k in range(3):
                p.tooth(x - k * pitch)
            p.baseline_bar(x - 2 * pitch - 1, x)
            if sheen:
                _dots_above(p.c, p.B - p.m.tooth, x - pitch, 3)
            return 2 * pitch + 2
        pitch = 6  # wider, so the dot cluster stays inside the middle span
        bw = max(6, round(0.55 * p.m.size))
        for k in range(2):
            p.tooth(x - k * pitch)
        p.baseline_bar(x - 2 * pitch + 1, x)
        p.bowl(x - 2 * pitch + 1, bw)
        if sheen:
            _dots_above(p.c, p.B - p.m.tooth, x - pitch, 3)
        return 2 * pitch - 1 + bw

    return draw


def _saad(dotted: bool, final: bool):
    def draw(p: Pen, x: int) -> int:
        lw = max(7, round(0.6 * p.m.size))
        p.ring(x, lw, p.m.tooth)
        if dotted:
            _dot(p.c, p.B - p.m.tooth - 4, x - lw // 2 - 1)
        p.baseline_bar(x - lw - 2, x)
        if not final:
            p.tooth(x - lw - 2)
            p.baseline_bar(x - lw - 3, x)
            return lw + 4
        bw = max(6, round(0.55 * p.m.size))
        p.bowl(x - lw - 2, bw)
        return lw + 2 + bw

    return draw


def _tah(dot_above: bool):
    def draw(p: Pen, x: int) -> int:
        lw = max(6, round(0.5 * p.m.size))
        p.ring(x, lw, p.m.tooth)
        _fill(p.c, p.B - p.m.ascender, p.B, x - 1, x)  # stem on the right wall
        if dot_above:
            _dot(p.c, p.B - p.m.tooth - 4, x - lw + 2)
        return lw

    return draw


def _ain(dot_above: bool):
    def draw(p: Pen, x: int) -> int:
        lw = max(6, round(0.5 * p.m.size))
        p.ring(x, lw, p.m.tooth + 1)
        if dot_above:
            _dot(p.c, p.B - p.m.tooth - 5, x - lw // 2 - 1)
        return lw

    return draw


def _faa(dots: int, final: bool):
    def draw(p: Pen, x: int) -> int:
        p.ring(x, 5, p.m.tooth)
        _dots_above(p.c, p.B - p.m.tooth, x - 2, dots)
        if not final:
            return 5
        if dots == 1:
            # faa: flat boat with a tall riser on the left
            bl = max(6, round(0.55 * p.m.size))
            p.baseline_bar(x - 4 - bl + 1, x)
            _fill(p.c, p.B - p.m.tooth - 1, p.B, x - 4 - bl + 1, x - 4 - bl + 2)
            return 5 + bl
        # qaf: deep cup fused under the loop
        bw = max(6, round(0.55 * p.m.size)) + 2
        _fill(p.c, p.B - p.m.tooth, p.B + 1, x - 4, x - 3)  # wall reaches the dip
        _fill(p.c, p.B + 2, p.B + 3, x - bw - 1, x - 1)
        _fill(p.c, p.B - p.m.tooth + 1, p.B + 1, x - bw - 1, x - bw)
        return bw + 2

    return draw


def _kaf(p: Pen, x: int) -> int:
    B, m = p.B, p.m
    length = round(0.7 * m.size)
    p.baseline_bar(x - length + 1, x)
    for i in range(m.ascender + 1):  # stem leans left as it rises
        shift = i // 3
        _fill(p.c, B - i, B - i, x - 1 - shift, x - shift)
    # identifying mark, kept above the transition zone of the teeth
    _dot(p.c, B - m.tooth - 3, x - length // 2 - 1)
    return length


def _lam(final: bool):
    def draw(p: Pen, x: int) -> int:
        B, m = p.B, p.m
        if not final:
            length = max(5, round(0.6 * m.size))
            p.baseline_bar(x - length + 1, x)
            _fill(p.c, B - m.ascender, B, x - 1, x)
            return length
        cw = max(5, round(0.45 * m.size))
        _fill(p.c, B - m.ascender, B + 1, x - 1, x)
        _fill(p.c, B + 2, B + 3, x - cw + 1, x)
        _fill(p.c, B - 1, B + 1, x - cw + 1, x - cw + 2)  # hook below the LMT
        return cw

    return draw


def _meem(final: bool):
    def draw(p: Pen, x: int) -> int:
        lw = 6
        p.ring(x, lw, p.m.tooth)
        if final:
            _fill(p.c, p.B + 1, p.B + p.m.descender - 1, x - lw + 1, x - lw + 2)
        return lw

    return draw


def _noon_final(p: Pen, x: int) -> int:
    cw = max(6, round(0.5 * p.m.size))
    p.cup(x, cw)
    _dot(p.c, p.B - p.m.tooth - 4, x - cw // 2 - 1)
    return cw


def _yaa_final(p: Pen, x: int) -> int:
    cw = max(6, round(0.5 * p.m.size))
    p.cup(x, cw)
    _dot(p.c, p.B + 5, x - cw // 2 - 1)
    _dot(p.c, p.B + 8, x - cw // 2 - 1)
    return cw


def _haa_loop(p: Pen, x: int) -> int:
    return p.ring(x, 5, p.m.tooth + 2)


def _waw(p: Pen, x: int) -> int:
    p.ring(x, 5, p.m.tooth)
    p.tail(x - 3, p.B)  # first tail pixel sits under the ring bottom
    return max(3, round(0.3 * p.m.size)) + 5


def _hamza(p: Pen, x: int) -> int:
    B = p.B
    _fill(p.c, B - 4, B - 4, x - 4, x)
    _fill(p.c, B - 1, B - 1, x - 4, x)
    _fill(p.c, B - 4, B - 1, x, x)
    _fill(p.c, B - 4, B - 1, x - 4, x - 4)
    return 5


def _lam_alef(p: Pen, x: int) -> int:
    """Optional lam-alef ligature: two crossed tall stems."""
    B, m = p.B, p.m
    _fill(p.c, B - m.ascender, B, x - 1, x)
    _fill(p.c, B - m.ascender, B, x - 5, x - 4)
    _fill(p.c, B - m.tooth, B - m.tooth + 1, x - 4, x - 1)  # crossbar
    return 6


def _joined_and_final(joined, final):
    return {INITIAL: joined, MEDIAL: joined, FINAL: final, ISOLATED: final}


def _uniform(draw):
    return {INITIAL: draw, MEDIAL: draw, FINAL: draw, ISOLATED: draw}


GLYPHS: dict[str, dict[str, object]] = {
    "ا": _uniform(_alef),
    "ب": _joined_and_final(_tooth_letter(dots_below=1), _boat_letter(dots_below=1)),
    "ت": _joined_and_final(_tooth_letter(dots_above=2), _boat_letter(dots_above=2)),
    "ث": _joined_and_final(_tooth_letter(dots_above=3), _boat_letter(dots_above=3)),
    "ج": _uniform(_dome_letter(dot_below=True)),
    "ح": _uniform(_dome_letter()),
    "خ": _uniform(_dome_letter(dot_above=True)),
    "د": _uniform(_wedge()),
    "ذ": _uniform(_wedge(dot_above=True)),
    "ر": _uniform(_raa()),
    "ز": _uniform(_raa(dot_above=True)),
    "س": _joined_and_final(_seen(False, False), _seen(False, True)),
    "ش": _joined_and_final(_seen(True, False), _seen(True, True)),
    "ص": _joined_and_final(_saad(False, False), _saad(False, True)),
    "ض": _joined_and_final(_saad(True, False), _saad(True, True)),
    "ط": _uniform(_tah(False)),
    "ظ": _uniform(_tah(True)),
    "ع": _uniform(_ain(False)),
    "غ": _uniform(_ain(True)),
    "ف": _joined_and_final(_faa(1, False), _faa(1, True)),
    "ق": _joined_and_final(_faa(2, False), _faa(2, True)),
    "ك": _uniform(_kaf),
    "ل": _joined_and_final(_lam(False), _lam(True)),
    "م": _joined_and_final(_meem(False), _meem(True)),
    "ن": _joined_and_final(_tooth_letter(dots_above=1), _noon_final),
    "ه": _uniform(_haa_loop),
    "و": _uniform(_waw),
    "ي": _joined_and_final(_tooth_letter(dots_below=2, stacked_below=True), _yaa_final),
    "ء": _uniform(_hamza),
    "لا": _uniform(_lam_alef),
}


def draw_glyph(canvas: np.ndarray, baseline: int, m: FontMetrics,
               unit: str, form: str, x_right: int) -> int:
    pen = Pen(canvas, baseline, m)
    return GLYPHS[unit][form](pen, x_right)
