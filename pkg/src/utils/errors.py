#!/usr/bin/env python3
"""
例外クラス定義
ライブラリ側は例外を送出し、CLI側でまとめて終了コードに変換する
"""


class PdmError(Exception):
    """本パッケージの例外の基底クラス"""


class InvalidArgumentError(PdmError, ValueError):
    """引数が前提条件を満たさない"""


class GridMismatchError(InvalidArgumentError):
    """異なるグリッド上の関数同士を演算しようとした"""


class ProfileDomainError(InvalidArgumentError):
    """質量分布のパラメータが m(x) > 0 を壊す"""


class UnsupportedQuantumNumberError(PdmError):
    """参照系が閉形式を持たない量子数"""


class UnsupportedReferenceError(PdmError):
    """参照系がこの操作に対応していない"""


class DivisionHazardError(PdmError):
    """ゼロ近傍の値で割り算しようとした"""


class DomainTooSmallError(PdmError):
    """状態がグリッド内に収まらない"""


class ConfigError(PdmError):
    """設定ファイル・コマンドライン引数の不備"""
