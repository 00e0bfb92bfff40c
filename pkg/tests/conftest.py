"""
テスト共通設定
リポジトリのルートを import パスに追加し、よく使うグリッド・問題を用意する
"""
import os
import sys

import pytest

ROOT = os.path.join(os.path.dirname(__file__), '..')
sys.path.insert(0, os.path.abspath(ROOT))

from src.numerics.grid import Grid  # noqa: E402
from src.physics.mass_profiles import make_profile  # noqa: E402
from src.physics.pct_solver import make_problem  # noqa: E402

CONFIG_PATH = os.path.abspath(os.path.join(ROOT, 'config.json'))


def problem_for(reference: str, kind: str, gamma: float = 0.0):
    return make_problem(reference, make_profile(kind, gamma))


@pytest.fixture
def standard_grid() -> Grid:
    """[-10, 10] × 2001 点（刻み 0.01）"""
    return Grid(-10.0, 10.0, 2001)


@pytest.fixture
def fine_grid() -> Grid:
    """[-10, 10] × 4001 点"""
    return Grid(-10.0, 10.0, 4001)


@pytest.fixture
def config_path() -> str:
    return CONFIG_PATH
