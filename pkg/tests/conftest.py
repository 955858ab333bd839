"""Shared fixture-corpus helpers for the test suite."""

import json
from pathlib import Path

import numpy as np
import pytest

from aocr import image_io

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_stems(prefix: str) -> list[str]:
    return sorted(p.stem for p in (FIXTURES / "pages").glob(f"{prefix}_*.png"))


def load_gray(stem: str) -> np.ndarray:
    return image_io.read_gray(FIXTURES / "pages" / f"{stem}.png")


def load_truth(stem: str) -> str:
    return (FIXTURES / "truth" / f"{stem}.txt").read_text(encoding="utf-8")


def load_meta(stem: str) -> dict:
    return json.loads((FIXTURES / "meta" / f"{stem}.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixtures_present():
    if not (FIXTURES / "pages").is_dir():
        pytest.skip("fixture corpus not present")
    return FIXTURES
