#!/usr/bin/env python3
"""
質量分布 m(x) とその導関数、写像 f(x) = ∫√m dx
半導体で使われる2種類の分布（有理型・cosh型）と一定質量、任意関数ラッパーを扱う
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from src.numerics.grid import Grid, GridFunction, cumulative_integral, diff1
from src.utils.errors import InvalidArgumentError, ProfileDomainError

# cosh型で sinh(γx)/γ を級数に切り替える閾値
SMALL_GAMMA = 1e-6
# 任意関数の導関数に使う内部ステップ
_NUMERIC_STEP = 1e-3


class ProfileKind(str, Enum):
    CONSTANT = "constant"
    CASE1 = "case1"
    CASE2 = "case2"
    CUSTOM = "custom"


@dataclass(frozen=True)
class MassProfile:
    """
    質量分布

    CASE1: m = (γ+x²)²/(1+x²)²,  f = x + (γ-1)·arctan x
    CASE2: m = cosh²(γx),         f = sinh(γx)/γ
    """
    kind: ProfileKind
    gamma: float = 0.0
    mass_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def is_analytic(self) -> bool:
        return self.kind is not ProfileKind.CUSTOM

    def m(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind is ProfileKind.CONSTANT:
            return np.ones_like(x)
        if self.kind is ProfileKind.CASE1:
            r = (self.gamma + x * x) / (1.0 + x * x)
            return r * r
        if self.kind is ProfileKind.CASE2:
            c = np.cosh(self.gamma * x)
            return c * c
        return np.asarray(self.mass_fn(x), dtype=float)

    def dm(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.gamma
        if self.kind is ProfileKind.CONSTANT:
            return np.zeros_like(x)
        if self.kind is ProfileKind.CASE1:
            r = (g + x * x) / (1.0 + x * x)
            dr = 2.0 * (1.0 - g) * x / (1.0 + x * x) ** 2
            return 2.0 * r * dr
        if self.kind is ProfileKind.CASE2:
            return g * np.sinh(2.0 * g * x)
        d = _NUMERIC_STEP
        m = self.m
        return (m(x - 2 * d) - 8.0 * m(x - d) + 8.0 * m(x + d) - m(x + 2 * d)) / (12.0 * d)

    def d2m(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.gamma
        if self.kind is ProfileKind.CONSTANT:
            return np.zeros_like(x)
        if self.kind is ProfileKind.CASE1:
            r = (g + x * x) / (1.0 + x * x)
            dr = 2.0 * (1.0 - g) * x / (1.0 + x * x) ** 2
            d2r = 2.0 * (1.0 - g) * (1.0 - 3.0 * x * x) / (1.0 + x * x) ** 3
            return 2.0 * (dr * dr + r * d2r)
        if self.kind is ProfileKind.CASE2:
            return 2.0 * g * g * np.cosh(2.0 * g * x)
        d = _NUMERIC_STEP
        m = self.m
        return (-m(x - 2 * d) + 16.0 * m(x - d) - 30.0 * m(x) + 16.0 * m(x + d) - m(x + 2 * d)) / (12.0 * d * d)

    def sqrt_m(self, x) -> np.ndarray:
        return np.sqrt(self.m(x))

    def f(self, x) -> np.ndarray:
        """写像 f(x) = ∫_0^x √m dx'（f(0) = 0）"""
        x = np.asarray(x, dtype=float)
        g = self.gamma
        if self.kind is ProfileKind.CONSTANT:
            return x.copy()
        if self.kind is ProfileKind.CASE1:
            return x + (g - 1.0) * np.arctan(x)
        if self.kind is ProfileKind.CASE2:
            if abs(g) < SMALL_GAMMA:
                gx2 = (g * x) ** 2
                return x * (1.0 + gx2 / 6.0 + gx2 * gx2 / 120.0)
            return np.sinh(g * x) / g
        integrand = lambda t: float(np.sqrt(self.mass_fn(np.asarray(t))))
        return np.vectorize(lambda b: quad(integrand, 0.0, b, epsabs=1e-13, epsrel=1e-12)[0])(x)

    def f_inverse(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.kind is ProfileKind.CONSTANT:
            return y.copy()
        if self.kind is ProfileKind.CASE2:
            if abs(self.gamma) < SMALL_GAMMA:
                return y.copy()
            return np.arcsinh(self.gamma * y) / self.gamma
        raise InvalidArgumentError(f"{self.kind.value} には f の逆関数の閉形式がありません")

    def min_sqrt_mass(self, grid: Optional[Grid] = None) -> float:
        """√m の下限（グリッド幅の決定に使う）"""
        if self.kind is ProfileKind.CONSTANT or self.kind is ProfileKind.CASE2:
            return 1.0
        if self.kind is ProfileKind.CASE1:
            return min(self.gamma, 1.0)
        x = grid.x if grid is not None else np.linspace(-10.0, 10.0, 2001)
        return float(np.min(self.sqrt_m(x)))

    def describe(self) -> dict:
        return {"kind": self.kind.value, "gamma": self.gamma}


def make_profile(kind, gamma: float = 0.0,
                 mass_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> MassProfile:
    """
    質量分布を生成

    Args:
        kind: "constant" / "case1" / "case2" / "custom"
        gamma: 分布パラメータ γ
        mass_fn: custom の場合の m(x)

    Returns:
        MassProfile
    """
    try:
        kind = ProfileKind(kind)
    except ValueError:
        raise InvalidArgumentError(f"不明な質量分布: {kind}")

    gamma = float(gamma)
    if kind is ProfileKind.CASE1 and not gamma > 0.0:
        raise ProfileDomainError(f"case1 には γ > 0 が必要です（m がゼロ・負になる）: {gamma}")
    if kind is ProfileKind.CASE2 and gamma < 0.0:
        raise ProfileDomainError(f"case2 には γ ≥ 0 が必要です: {gamma}")
    if kind is ProfileKind.CUSTOM and mass_fn is None:
        raise InvalidArgumentError("custom には mass_fn が必要です")
    if kind is ProfileKind.CONSTANT:
        gamma = 0.0
    return MassProfile(kind=kind, gamma=gamma, mass_fn=mass_fn)


def custom_profile(mass_fn: Callable[[np.ndarray], np.ndarray]) -> MassProfile:
    return make_profile(ProfileKind.CUSTOM, 0.0, mass_fn)


def numeric_mapping(profile: MassProfile, grid: Grid) -> GridFunction:
    """√m の累積積分で f をグリッド上に求める（x = 0 で f = 0）"""
    anchor = min(max(0.0, grid.x_min), grid.x_max)
    offset = 0.0 if anchor == 0.0 else float(profile.f(anchor))
    sqrt_m = grid.sample(profile.sqrt_m)
    return cumulative_integral(sqrt_m, anchor) + offset


@dataclass(frozen=True)
class ProfileDiagnostics:
    positive: bool
    min_mass: float
    mapping_residual: Optional[float]
    mass_derivative_residual: float
    monotone: bool

    @property
    def ok(self) -> bool:
        return self.positive and self.monotone


def verify_profile(profile: MassProfile, grid: Grid) -> ProfileDiagnostics:
    """
    質量分布の整合性チェック（違反は例外ではなく結果に記録）

    Returns:
        ProfileDiagnostics: m > 0、|f' - √m|、|m' - Dm| の各残差
    """
    x = grid.x
    h = grid.h
    with np.errstate(invalid="ignore"):
        m = profile.m(x)
    positive = bool(np.all(m > 0.0))
    dm_residual = float(np.max(np.abs(profile.dm(x) - diff1(m, h))))

    if not positive:
        return ProfileDiagnostics(
            positive=False,
            min_mass=float(np.min(m)),
            mapping_residual=None,
            mass_derivative_residual=dm_residual,
            monotone=False,
        )

    f = profile.f(x)
    mapping_residual = float(np.max(np.abs(diff1(f, h) - np.sqrt(m))))
    return ProfileDiagnostics(
        positive=True,
        min_mass=float(np.min(m)),
        mapping_residual=mapping_residual,
        mass_derivative_residual=dm_residual,
        monotone=bool(np.all(np.diff(f) > 0.0)),
    )
