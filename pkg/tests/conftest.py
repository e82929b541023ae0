"""
Pytest configuration and shared fixtures for the dslice test suite.

This module provides:
- Named Seifert matrices used across suites
- A seeded random corpus of valid Seifert matrices for property suites
- Paths into the bundled corpus
- Settings isolation between tests
"""

import random
import sys
from pathlib import Path
from typing import List

import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from dslice.config import CAP_ENV_VAR, CORPUS_DIR, reset_settings  # noqa: E402
from dslice.files import KnotLibrary  # noqa: E402
from dslice.knots import SeifertMatrix  # noqa: E402

# ==================== Named Matrices ====================

K946_ROWS = [[0, 2], [1, 0]]
TREFOIL_ROWS = [[-1, 1], [0, -1]]
FIGURE_EIGHT_ROWS = [[1, 1], [0, -1]]
STEVEDORE_ROWS = [[2, 1], [0, -1]]

CORPUS_QS = (2, 3, 4, 5, 7, 8, 9)
RANDOM_SEED = 20240917
RANDOM_CORPUS_SIZE = 60


def random_seifert(rng: random.Random, genus: int, spread: int = 2) -> SeifertMatrix:
    """
    Random valid Seifert matrix V = A + E with A symmetric and E the standard
    symplectic pattern, so V - V^T is unimodular by construction.
    """
    n = 2 * genus
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            value = rng.randint(-spread, spread)
            rows[i][j] = value
            rows[j][i] = value
    for i in range(genus):
        rows[2 * i][2 * i + 1] += 1
    return SeifertMatrix.from_rows(rows)


def build_random_corpus(seed: int = RANDOM_SEED, size: int = RANDOM_CORPUS_SIZE) -> List[SeifertMatrix]:
    rng = random.Random(seed)
    corpus = []
    for index in range(size):
        genus = 1 + index % 3
        corpus.append(random_seifert(rng, genus, spread=2 if genus < 3 else 1))
    return corpus


# ==================== Fixtures ====================


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Every test starts from default settings with no cap override."""
    monkeypatch.delenv(CAP_ENV_VAR, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture(scope="session")
def seifert_corpus() -> List[SeifertMatrix]:
    return build_random_corpus()


@pytest.fixture
def k946() -> SeifertMatrix:
    return SeifertMatrix.from_rows(K946_ROWS, "K946")


@pytest.fixture
def trefoil_matrix() -> SeifertMatrix:
    return SeifertMatrix.from_rows(TREFOIL_ROWS, "trefoil")


@pytest.fixture(scope="session")
def library() -> KnotLibrary:
    return KnotLibrary.load()


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture
def chh_records(corpus_dir) -> Path:
    return corpus_dir / "drecords" / "cochran-harvey-horn.json"
