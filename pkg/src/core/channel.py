"""
信道与精灵参数数据模型

定义两用户高斯干扰信道参数、精灵噪声参数向量 κ、派生噪声方差以及界的计算结果
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError

# 边界比较容差
BOX_TOL = 1e-12


class ChannelKind(Enum):
    """信道类型"""
    REAL = "real"        # 实信道，每维 ½log
    COMPLEX = "complex"  # 复信道，log


class UpperBoundId(Enum):
    """和速率上界标识"""
    ETW = "etw"
    KRAMER_SYM = "kramer"
    THM3 = "thm3"
    THM4 = "thm4"
    THM4_SWAPPED = "thm4_swapped"
    THM5 = "thm5"
    THM5_SWAPPED = "thm5_swapped"
    THM6_SIMPLIFIED = "thm6"
    COR1_RBAR = "cor1_rbar"
    R_SYM_STAR = "r_sym_star"
    BEST_UPPER = "best_upper"
    # 容量域约束
    THM9 = "thm9"
    THM9_SWAPPED = "thm9_swapped"
    THM10 = "thm10"
    THM10_SWAPPED = "thm10_swapped"


def prelog(kind: ChannelKind) -> float:
    """实信道每个对数项带 ½，复信道不带"""
    return 0.5 if kind == ChannelKind.REAL else 1.0


@dataclass(frozen=True)
class ChannelParams:
    """
    两用户高斯干扰信道

    Y1 = X1 + h12·X2 + Z1, Y2 = h21·X1 + X2 + Z2，噪声方差为 1
    """
    p1: float
    p2: float
    h12: complex
    h21: complex
    kind: ChannelKind = ChannelKind.REAL

    def __post_init__(self):
        if not (self.p1 > 0 and self.p2 > 0):
            raise DomainError(f"发射功率必须为正: p1={self.p1}, p2={self.p2}")
        if not (math.isfinite(self.p1) and math.isfinite(self.p2)):
            raise DomainError("发射功率必须有限")

        for name in ("h12", "h21"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DomainError(f"交叉增益 {name} 必须有限")
            if self.kind == ChannelKind.REAL:
                if value.imag != 0.0:
                    raise DomainError(f"实信道的交叉增益 {name} 不能含虚部: {value}")
                object.__setattr__(self, name, float(value.real))
            else:
                object.__setattr__(self, name, value)

    @classmethod
    def symmetric(cls, power: float, g: float, kind: ChannelKind = ChannelKind.REAL) -> "ChannelParams":
        """对称信道: p1 = p2 = P, h12 = h21 = g"""
        return cls(p1=power, p2=power, h12=g, h21=g, kind=kind)

    @classmethod
    def from_g2(cls, power: float, g2: float, kind: ChannelKind = ChannelKind.REAL) -> "ChannelParams":
        """按 g² 构造对称实信道（取 g > 0）"""
        if g2 < 0:
            raise DomainError(f"g² 不能为负: {g2}")
        return cls.symmetric(power, math.sqrt(g2), kind)

    def swapped(self) -> "ChannelParams":
        """交换两用户下标"""
        return ChannelParams(p1=self.p2, p2=self.p1, h12=self.h21, h21=self.h12, kind=self.kind)

    @property
    def is_symmetric(self) -> bool:
        return self.p1 == self.p2 and self.h12 == self.h21

    @property
    def weak_interference(self) -> bool:
        return abs(self.h12) ** 2 <= 1.0 + BOX_TOL and abs(self.h21) ** 2 <= 1.0 + BOX_TOL

    @property
    def g2(self) -> float:
        """对称信道的 g²（非对称信道取 |h12|²）"""
        return abs(self.h12) ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p1": self.p1,
            "p2": self.p2,
            "h12": str(self.h12) if isinstance(self.h12, complex) else self.h12,
            "h21": str(self.h21) if isinstance(self.h21, complex) else self.h21,
            "kind": self.kind.value,
        }


# κ 向量的分量顺序
GENIE_FIELDS: Tuple[str, ...] = (
    "sigma_n1", "sigma_n2", "sigma_w1", "sigma_w2",
    "rho_n1", "rho_n2", "rho_w1", "rho_w2",
)


@dataclass(frozen=True)
class GenieParams:
    """
    精灵噪声参数 κ

    N_i 与 Z_i 相关（E[Z_i N_i*] = ρ_Ni σ_Ni），W_i 与 Z_i 相关（E[Z_i W_i*] = ρ_Wi σ_Wi）。
    各字段也可以是同形状的 numpy 数组，用于批量求值。
    """
    sigma_n1: Any = 1.0
    sigma_n2: Any = 1.0
    sigma_w1: Any = 1.0
    sigma_w2: Any = 1.0
    rho_n1: Any = 0.0
    rho_n2: Any = 0.0
    rho_w1: Any = 0.0
    rho_w2: Any = 0.0

    def __post_init__(self):
        for name in GENIE_FIELDS[:4]:
            sigma = np.asarray(getattr(self, name))
            if np.iscomplexobj(sigma) or np.any(sigma < -BOX_TOL) or np.any(sigma > 1.0 + BOX_TOL):
                raise DomainError(f"{name} 必须位于 [0, 1]: {getattr(self, name)}")
        for name in GENIE_FIELDS[4:]:
            rho = np.asarray(getattr(self, name))
            if np.any(np.abs(rho) > 1.0 + BOX_TOL):
                raise DomainError(f"{name} 的模必须不超过 1: {getattr(self, name)}")

    @classmethod
    def unit(cls) -> "GenieParams":
        """单位方差、不相关的精灵噪声"""
        return cls()

    @classmethod
    def from_vector(cls, vector) -> "GenieParams":
        values = list(vector)
        if len(values) != len(GENIE_FIELDS):
            raise DomainError(f"κ 向量长度必须为 8: {len(values)}")
        return cls(**dict(zip(GENIE_FIELDS, values)))

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in GENIE_FIELDS])

    def swapped(self) -> "GenieParams":
        """交换两用户下标"""
        return GenieParams(
            sigma_n1=self.sigma_n2, sigma_n2=self.sigma_n1,
            sigma_w1=self.sigma_w2, sigma_w2=self.sigma_w1,
            rho_n1=self.rho_n2, rho_n2=self.rho_n1,
            rho_w1=self.rho_w2, rho_w2=self.rho_w1,
        )

    def with_values(self, **values) -> "GenieParams":
        return replace(self, **values)

    def to_dict(self) -> Dict[str, Any]:
        result = {}
        for name in GENIE_FIELDS:
            value = getattr(self, name)
            result[name] = str(value) if isinstance(value, complex) else float(value)
        return result


@dataclass(frozen=True)
class DerivedNoise:
    """各界共用的条件方差"""
    var_v_n1: Any
    var_v_n2: Any
    var_v_w1: Any
    var_v_w2: Any
    var_z_minus_w1: Any
    var_z_minus_w2: Any
    var_z1_minus_hinv_n1: Any = None
    var_z2_minus_hinv_n2: Any = None


@dataclass
class BoundResult:
    """
    界的计算结果

    value 单位为 bit/信道使用；不可行时 value 为 +inf
    """
    value: float
    feasible: bool
    bound_id: UpperBoundId
    channel: ChannelParams
    achieving_params: Optional[GenieParams] = None
    violations: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.feasible and not math.isfinite(self.value):
            # 可行参数下出现发散值同样视为不可用
            self.feasible = False
            self.violations.append("界值不有限")
        if not self.feasible:
            self.value = math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bound_id": self.bound_id.value,
            "value": self.value,
            "feasible": self.feasible,
            "channel": self.channel.to_dict(),
            "achieving_params": self.achieving_params.to_dict() if self.achieving_params else None,
            "violations": list(self.violations),
            "details": dict(self.details),
        }
