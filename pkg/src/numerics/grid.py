#!/usr/bin/env python3
"""
一様グリッド・差分ステンシル・数値積分
他のすべてのモジュールはこの上で計算する
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.integrate import simpson

from src.utils.errors import GridMismatchError, InvalidArgumentError

# 4次ステンシル＋境界2行に必要な最小点数
MIN_POINTS = 9

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.x_min) or not np.isfinite(self.x_max):
            raise InvalidArgumentError("グリッド端点が有限ではありません")
        if not self.x_min < self.x_max:
            raise InvalidArgumentError(f"x_min < x_max が必要です: {self.x_min}, {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise InvalidArgumentError(f"n_points は {MIN_POINTS} 以上の整数: {self.n_points}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        nodes = np.linspace(self.x_min, self.x_max, self.n_points)
        nodes.flags.writeable = False
        return nodes

    def nearest_index(self, position: float) -> int:
        """position に最も近いノードの添字"""
        if not self.x_min <= position <= self.x_max:
            raise InvalidArgumentError(f"{position} はグリッド範囲 [{self.x_min}, {self.x_max}] の外です")
        return int(round((position - self.x_min) / self.h))

    def sub_grid(self, start: int, stop: int) -> "Grid":
        """ノード start..stop（両端含む）からなる部分グリッド"""
        x = self.x
        return Grid(float(x[start]), float(x[stop]), stop - start + 1)

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return GridFunction(self, func(self.x))

    def constant(self, value: Scalar) -> "GridFunction":
        return GridFunction(self, np.full(self.n_points, value, dtype=complex))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """グリッド上の複素数値サンプル（波動関数など）"""
    grid: Grid
    values: np.ndarray = field(repr=False)

    # ndarray * GridFunction でも __rmul__ に回す
    __array_ufunc__ = None

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise InvalidArgumentError(
                f"値の長さ {values.shape} がグリッド点数 {self.grid.n_points} と一致しません"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("GridFunction に NaN/Inf が含まれています")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def _check_same_grid(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise GridMismatchError(f"グリッド不一致: {self.grid} / {other.grid}")

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, GridFunction):
            self._check_same_grid(other)
            return other.values
        return other

    def __add__(self, other) -> "GridFunction":
        return GridFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "GridFunction":
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other) -> "GridFunction":
        return GridFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other) -> "GridFunction":
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GridFunction":
        return GridFunction(self.grid, self.values / self._coerce(other))

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, np.conj(self.values))

    def restrict(self, start: int, stop: int) -> "GridFunction":
        return GridFunction(self.grid.sub_grid(start, stop), self.values[start:stop + 1])

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


# ---------------------------------------------------------------------------
# 差分ステンシル（内部は4次中心差分、両端2行は4次片側差分）
# ---------------------------------------------------------------------------

def diff1(y: np.ndarray, h: float) -> np.ndarray:
    """1階微分（配列版）"""
    y = np.asarray(y)
    d = np.empty_like(y, dtype=np.result_type(y, float))
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    return d


def diff1_extrapolated(y: np.ndarray, h: float) -> np.ndarray:
    """
    1階微分の Richardson 外挿 (16 D_h - D_2h)/15

    内部（両端4点を除く）で6次精度、両端は diff1 のまま
    """
    y = np.asarray(y)
    d = diff1(y, h)
    if y.shape[0] < 9:
        return d
    wide = (y[:-8] - 8.0 * y[2:-6] + 8.0 * y[6:-2] - y[8:]) / (24.0 * h)
    d[4:-4] = (16.0 * d[4:-4] - wide) / 15.0
    return d


def diff2(y: np.ndarray, h: float) -> np.ndarray:
    """2階微分（配列版）"""
    y = np.asarray(y)
    h2 = 12.0 * h * h
    d = np.empty_like(y, dtype=np.result_type(y, float))
    d[2:-2] = (-y[:-4] + 16.0 * y[1:-3] - 30.0 * y[2:-2] + 16.0 * y[3:-1] - y[4:]) / h2
    d[0] = (45.0 * y[0] - 154.0 * y[1] + 214.0 * y[2] - 156.0 * y[3] + 61.0 * y[4] - 10.0 * y[5]) / h2
    d[1] = (10.0 * y[0] - 15.0 * y[1] - 4.0 * y[2] + 14.0 * y[3] - 6.0 * y[4] + y[5]) / h2
    d[-1] = (45.0 * y[-1] - 154.0 * y[-2] + 214.0 * y[-3] - 156.0 * y[-4] + 61.0 * y[-5] - 10.0 * y[-6]) / h2
    d[-2] = (10.0 * y[-1] - 15.0 * y[-2] - 4.0 * y[-3] + 14.0 * y[-4] - 6.0 * y[-5] + y[-6]) / h2
    return d


def derivative(f: GridFunction, order: int = 1) -> GridFunction:
    """
    GridFunction の数値微分

    Args:
        f: 微分する関数
        order: 1 または 2

    Returns:
        GridFunction: 微分結果（多項式4次まで厳密）
    """
    if order not in (1, 2):
        raise InvalidArgumentError(f"order は 1 または 2: {order}")
    if f.grid.n_points < MIN_POINTS:
        raise InvalidArgumentError("グリッドが小さすぎます")
    stencil = diff1 if order == 1 else diff2
    return GridFunction(f.grid, stencil(f.values, f.grid.h))


# ---------------------------------------------------------------------------
# 数値積分（複合シンプソン則）
# ---------------------------------------------------------------------------

def simpson_array(y: np.ndarray, h: float) -> complex:
    """奇数点配列の複合シンプソン積分"""
    y = np.asarray(y)
    if y.shape[0] % 2 == 0:
        raise InvalidArgumentError(f"シンプソン則には奇数点が必要です: {y.shape[0]}")
    if np.iscomplexobj(y):
        return complex(simpson(y.real, dx=h), simpson(y.imag, dx=h))
    return complex(simpson(y, dx=h))


def integrate(f: GridFunction) -> complex:
    return simpson_array(f.values, f.grid.h)


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """⟨f, g⟩ = ∫ conj(f)·g dx（第1引数について共役線形）"""
    if f.grid != g.grid:
        raise GridMismatchError(f"グリッド不一致: {f.grid} / {g.grid}")
    return simpson_array(np.conj(f.values) * g.values, f.grid.h)


def l2_norm(f: GridFunction) -> float:
    return float(np.sqrt(max(simpson_array(np.abs(f.values) ** 2, f.grid.h).real, 0.0)))


def _cumulative_from_start(y: np.ndarray, h: float) -> np.ndarray:
    # 偶数番目はシンプソンの部分和、奇数番目は直前の偶数点から3次補間で1区間だけ足す
    n = y.shape[0]
    out = np.zeros(n, dtype=complex)
    if n == 1:
        return out
    if n == 2:
        out[1] = 0.5 * h * (y[0] + y[1])
        return out
    if n == 3:
        out[1] = h / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
        out[2] = h / 3.0 * (y[0] + 4.0 * y[1] + y[2])
        return out

    pairs = h / 3.0 * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(pairs)

    step = np.empty(n - 1, dtype=complex)
    step[1:-1] = h / 24.0 * (-y[:-3] + 13.0 * y[1:-2] + 13.0 * y[2:-1] - y[3:])
    step[0] = h / 24.0 * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3])
    step[-1] = h / 24.0 * (y[-4] - 5.0 * y[-3] + 19.0 * y[-2] + 9.0 * y[-1])
    out[1::2] = out[0:-1:2] + step[0::2]
    return out


def cumulative_integral(f: GridFunction, anchor: float = 0.0) -> GridFunction:
    """
    F(x) = ∫_anchor^x f dx' をグリッド上で返す

    Args:
        f: 被積分関数
        anchor: 積分の起点（最も近いノードで F = 0）

    Returns:
        GridFunction: 不定積分
    """
    idx = f.grid.nearest_index(anchor)
    h = f.grid.h
    y = f.values
    out = np.zeros_like(y)
    out[idx:] = _cumulative_from_start(y[idx:], h)
    out[:idx + 1] = -_cumulative_from_start(y[:idx + 1][::-1], h)[::-1]
    return GridFunction(f.grid, out)
