"""Contextual form selection for Arabic letters.

A letter's rendered form depends on whether it connects to its neighbors:
dual-joining letters connect on both sides, right-joining letters
(alef, daal, thaal, raa, zay, waw) only to the preceding letter, and
hamza never joins. The lam-alef ligature can optionally render as one
glyph.
"""

from __future__ import annotations

ISOLATED = "isolated"
INITIAL = "initial"
MEDIAL = "medial"
FINAL = "final"

RIGHT_JOINING = set("ادذرزو")
NON_JOINING = {"ء"}
DUAL_JOINING = set("بتثجحخسشصضطظعغفقكلمنهي")

ALL_LETTERS = "ابتثجحخدذرزسشصضطظعغفقكلمنهوي" + "ء"

LAM = "ل"
ALEF = "ا"


def joins_left(letter: str) -> bool:
    """Can this letter connect to the following (left-side) letter?"""
    return letter in DUAL_JOINING


def joins_right(letter: str) -> bool:
    """Can this letter connect to the preceding (right-side) letter?"""
    return letter in DUAL_JOINING or letter in RIGHT_JOINING


def shape_word(word: str, lam_alef_ligature: bool = False) -> list[tuple[str, str]]:
    """(letter-or-ligature, form) pairs in reading order.

    With ``lam_alef_ligature`` enabled, a lam followed by alef collapses
    into the single pseudo-letter ``"لا"`` which behaves like a
    right-joining glyph.
    """
    letters: list[str] = []
    i = 0
    while i < len(word):
        if (lam_alef_ligature and word[i] == LAM and i + 1 < len(word)
                and word[i + 1] == ALEF):
            letters.append(LAM + ALEF)
            i += 2
        else:
            letters.append(word[i])
            i += 1

    def _joins_left(unit: str) -> bool:
        return len(unit) == 1 and joins_left(unit)

    def _joins_right(unit: str) -> bool:
        if len(unit) == 2:
            return True  # lam-alef connects to a preceding letter
        return joins_right(unit)

    shaped: list[tuple[str, str]] = []
    for k, unit in enumerate(letters):
        prev_connects = k > 0 and _joins_left(letters[k - 1]) and _joins_right(unit)
        next_connects = k + 1 < len(letters) and _joins_left(unit) and _joins_right(letters[k + 1])
        if prev_connects and next_connects:
            form = MEDIAL
        elif prev_connects:
            form = FINAL
        elif next_connects:
            form = INITIAL
        else:
            form = ISOLATED
        shaped.append((unit, form))
    return shaped


def connected(prev_unit: str, unit: str) -> bool:
    """Do these two adjacent units join through the baseline?"""
    prev_joins = joins_left(prev_unit) if len(prev_unit) == 1 else False
    cur_joins = joins_right(unit) if len(unit) == 1 else True
    return prev_joins and cur_joins
