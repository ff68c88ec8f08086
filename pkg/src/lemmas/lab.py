"""
信息不等式数值验证

在单字母 (n=1) 的可解析实例上检查条件最坏加性噪声引理、其推论以及由它导出的条件熵差不等式：
高斯实例给出等号（残差应为 0），混合分布实例给出方向（差值应非负）
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..core.channel import ChannelKind
from ..core.entropy import CovarianceTable, gaussian_entropy, gaussian_joint_entropy
from ..core.errors import DomainError
from ..utils.logger import get_logger
from .quadrature import MixtureSpec, QuadratureOptions, mixture_entropy, mixture_entropy_1d

logger = get_logger(__name__)

# 协方差半正定判据的特征值容差
PSD_TOL = -1e-10

# 混合探针允许的积分误差
PROBE_TOL = 1e-6


@dataclass(frozen=True)
class ProbeResult:
    """一次不等式探测：gap = 右端 − 左端"""
    gap: float
    left: float
    right: float
    converged: bool = True

    def holds(self, tol: float = PROBE_TOL) -> Optional[bool]:
        """积分未收敛时不下结论"""
        if not self.converged:
            return None
        return self.gap >= -tol


# ---------------------------------------------------------------------------
# 条件最坏加性噪声引理
# ---------------------------------------------------------------------------

@dataclass
class GaussianTriple:
    """(Z, X+Z, U) 的 3×3 协方差；Z 与 X、U 独立"""
    cov: np.ndarray

    def __post_init__(self):
        self.cov = np.asarray(self.cov, dtype=float)
        if self.cov.shape != (3, 3):
            raise DomainError(f"协方差必须为 3×3: {self.cov.shape}")
        if not np.allclose(self.cov, self.cov.T, atol=1e-12):
            raise DomainError("协方差必须对称")
        if np.min(np.linalg.eigvalsh(self.cov)) < PSD_TOL:
            raise DomainError("协方差必须半正定")
        var_z = self.cov[0, 0]
        if not var_z > 0:
            raise DomainError(f"要求 Var(Z) > 0: {var_z}")
        scale = max(1.0, float(np.max(np.abs(self.cov))))
        if abs(self.cov[0, 1] - var_z) > 1e-12 * scale or abs(self.cov[0, 2]) > 1e-12 * scale:
            raise DomainError("Z 必须与 X、U 独立：Cov(Z, X+Z) = Var(Z)，Cov(Z, U) = 0")

    @classmethod
    def from_parts(cls, var_x: float, var_z: float, var_u: float = 0.0, cov_xu: float = 0.0) -> "GaussianTriple":
        """由 Var(X)、Var(Z)、Var(U)、Cov(X,U) 构造"""
        return cls(np.array([
            [var_z, var_z, 0.0],
            [var_z, var_x + var_z, cov_xu],
            [0.0, cov_xu, var_u],
        ]))

    @property
    def var_z(self) -> float:
        return float(self.cov[0, 0])

    @property
    def var_x(self) -> float:
        return float(self.cov[1, 1] - self.cov[0, 0])

    @property
    def var_u(self) -> float:
        return float(self.cov[2, 2])

    @property
    def cov_xu(self) -> float:
        return float(self.cov[1, 2] - self.cov[0, 2])


def _cond_var(var_a: float, cov_ab: float, var_b: float) -> float:
    if var_b <= 0:
        return var_a
    return var_a - cov_ab ** 2 / var_b


def lemma1_gap(t: GaussianTriple) -> float:
    """
    高斯实例的等号残差

    右端 h(X_g|U_g) − h(X_g+Z|U_g) 用条件方差计算，左端按 −h(Z|U) + h(Z|X+Z,U) 用 log-det 计算；
    两者解析相等，返回数值残差。Var(U) = 0 时按无条件处理

    Args:
        t: 高斯三元组

    Returns:
        右端 − 左端（bit）
    """
    var_x_u = _cond_var(t.var_x, t.cov_xu, t.var_u)
    if not var_x_u > 1e-15 * max(1.0, t.var_x):
        raise DomainError("给定 U 时 X 退化，熵差无定义")
    right = gaussian_entropy(var_x_u) - gaussian_entropy(var_x_u + t.var_z)

    if t.var_u <= 0:
        k = t.cov[:2, :2]
        left = -gaussian_entropy(t.var_z) + gaussian_joint_entropy(k) - gaussian_entropy(k[1, 1])
    else:
        h_zu = gaussian_joint_entropy(t.cov[np.ix_([0, 2], [0, 2])])
        h_u = gaussian_entropy(t.var_u)
        h_all = gaussian_joint_entropy(t.cov)
        h_yu = gaussian_joint_entropy(t.cov[1:, 1:])
        left = -(h_zu - h_u) + (h_all - h_yu)
    return right - left


def lemma1_inequality_probe(
    x: MixtureSpec,
    coupling: float,
    u_noise_std: float,
    z_std: float,
    opts: Optional[QuadratureOptions] = None,
) -> ProbeResult:
    """
    混合分布 X 下的方向检查，U = coupling·X + N_U

    左端 h(X|U) − h(X+Z|U) = h(X,U) − h(X+Z,U) 由二维混合熵积分得到；
    右端取与 (Z, X+Z, U) 协方差相同的高斯实例

    Args:
        x: X 的一维混合
        coupling: U 对 X 的系数，0 表示 U 与 X 独立
        u_noise_std: N_U 标准差，coupling 非零时必须为正
        z_std: Z 标准差
        opts: 数值积分选项

    Returns:
        ProbeResult
    """
    if not z_std > 0:
        raise DomainError(f"要求 σ_Z > 0: {z_std}")
    if coupling != 0 and not u_noise_std > 0:
        raise DomainError("U 是 X 的确定函数时条件熵无定义")

    var_x = x.variance
    var_n = u_noise_std ** 2
    var_z = z_std ** 2

    if coupling == 0:
        h_x = mixture_entropy_1d(x, opts=opts)
        h_xz = mixture_entropy_1d(x, extra_var=var_z, opts=opts)
        left = h_x.value - h_xz.value
        converged = h_x.converged and h_xz.converged
        right = gaussian_entropy(var_x) - gaussian_entropy(var_x + var_z)
    else:
        means = np.stack([x.means, coupling * x.means], axis=1)
        s2 = x.stds ** 2
        covs = np.array([[[v, coupling * v], [coupling * v, coupling ** 2 * v + var_n]] for v in s2])
        covs_z = covs.copy()
        covs_z[:, 0, 0] += var_z
        h_xu = mixture_entropy(x.weights, means, covs, opts=opts)
        h_xzu = mixture_entropy(x.weights, means, covs_z, opts=opts)
        left = h_xu.value - h_xzu.value
        converged = h_xu.converged and h_xzu.converged
        triple = GaussianTriple.from_parts(
            var_x, var_z, coupling ** 2 * var_x + var_n, coupling * var_x
        )
        var_x_u = _cond_var(triple.var_x, triple.cov_xu, triple.var_u)
        right = gaussian_entropy(var_x_u) - gaussian_entropy(var_x_u + var_z)

    result = ProbeResult(gap=right - left, left=left, right=right, converged=converged)
    if not converged:
        logger.warning(f"引理探测积分未收敛，不做判断: gap={result.gap:.3e}")
    return result


def corollary7_gap(
    w_std: float,
    z_std: float,
    cov_wz: float,
    x: MixtureSpec,
    opts: Optional[QuadratureOptions] = None,
) -> ProbeResult:
    """
    h(X_g+W) − h(X_g+Z) − [h(X+W) − h(X+Z)]，要求 σ_Z² ≥ σ_W²

    Args:
        w_std: σ_W
        z_std: σ_Z
        cov_wz: Cov(W, Z)，仅用于检查联合协方差合法
        x: X 的一维混合
        opts: 数值积分选项

    Returns:
        ProbeResult
    """
    var_w, var_z = w_std ** 2, z_std ** 2
    if var_z < var_w:
        raise DomainError(f"要求 σ_Z² ≥ σ_W²: {var_z} < {var_w}")
    if cov_wz ** 2 > var_w * var_z * (1.0 + 1e-12):
        raise DomainError("Cov(W, Z) 超出 Cauchy-Schwarz 界")

    h_xw = mixture_entropy_1d(x, extra_var=var_w, opts=opts)
    h_xz = mixture_entropy_1d(x, extra_var=var_z, opts=opts)
    left = h_xw.value - h_xz.value
    right = gaussian_entropy(x.variance + var_w) - gaussian_entropy(x.variance + var_z)
    return ProbeResult(gap=right - left, left=left, right=right, converged=h_xw.converged and h_xz.converged)


# ---------------------------------------------------------------------------
# 条件熵差不等式
# ---------------------------------------------------------------------------

class _LemmaTable(CovarianceTable):
    """X、Y、Z、W 由四个独立单位基变量生成，V 与 Ṽ 各自独立"""

    BASIS = ("e_x", "e_y", "e_z", "e_w", "v", "v_tilde")


@dataclass
class Lemma2Instance:
    """高斯实例：X、Y 相关，Z、W 相关，V 独立"""
    x_std: float
    y_std: float
    z_std: float
    w_std: float
    v_std: float
    rho_xy: float = 0.0
    rho_zw: float = 0.0

    def __post_init__(self):
        for name in ("x_std", "y_std", "z_std", "w_std", "v_std"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} 不能为负")
        for name in ("rho_xy", "rho_zw"):
            if abs(getattr(self, name)) > 1:
                raise DomainError(f"{name} 超出 [-1, 1]")
        if self.tilde_v_var < -1e-12 * max(1.0, self.v_std ** 2):
            raise DomainError(f"要求 σ_V² ≥ σ²_(Z−W): {self.v_std ** 2} < {self.var_z_minus_w}")

    @property
    def var_z_minus_w(self) -> float:
        return self.z_std ** 2 + self.w_std ** 2 - 2.0 * self.rho_zw * self.z_std * self.w_std

    @property
    def tilde_v_var(self) -> float:
        return self.v_std ** 2 - self.var_z_minus_w

    def table(self, x_std: Optional[float] = None) -> CovarianceTable:
        sx = self.x_std if x_std is None else x_std
        e = dict(zip(_LemmaTable.BASIS, np.eye(len(_LemmaTable.BASIS))))
        signals = {
            "x": sx * e["e_x"],
            "y": self.y_std * (self.rho_xy * e["e_x"] + math.sqrt(1.0 - self.rho_xy ** 2) * e["e_y"]),
            "z": self.z_std * e["e_z"],
            "w": self.w_std * (self.rho_zw * e["e_z"] + math.sqrt(1.0 - self.rho_zw ** 2) * e["e_w"]),
            "v": e["v"],
            "v_tilde": e["v_tilde"],
        }
        basis_var = np.array([1.0, 1.0, 1.0, 1.0, self.v_std ** 2, max(self.tilde_v_var, 0.0)])
        return _LemmaTable({k: v.astype(complex) for k, v in signals.items()}, basis_var, ChannelKind.REAL)


def _lemma2_right(table: CovarianceTable) -> float:
    given = table.combo(y=1, w=1)
    return table.entropy(table.combo(x=1, y=1, z=1), given) - table.entropy(
        table.combo(x=1, y=1, z=1, v_tilde=1), given
    )


def lemma2_gap(inst: Lemma2Instance) -> ProbeResult:
    """
    h(X+Y+Z|Y+W) − h(X+V) 与其高斯上界之差（全高斯实例）

    Args:
        inst: 高斯实例

    Returns:
        ProbeResult；条件 σ_V² ≥ σ²_(Z−W) 不满足时构造实例即抛出 DomainError
    """
    table = inst.table()
    left = table.entropy(table.combo(x=1, y=1, z=1), table.combo(y=1, w=1)) - table.entropy(
        table.combo(x=1, v=1)
    )
    right = _lemma2_right(table)
    return ProbeResult(gap=right - left, left=left, right=right)


def lemma2_mixture_probe(
    x: MixtureSpec,
    inst: Lemma2Instance,
    opts: Optional[QuadratureOptions] = None,
) -> ProbeResult:
    """
    X 为混合分布、与 Y 独立时的方向检查；inst 的 x_std 与 rho_xy 被忽略

    Args:
        x: X 的一维混合
        inst: Y、Z、W、V 的高斯参数
        opts: 数值积分选项

    Returns:
        ProbeResult
    """
    var_y, var_z, var_w = inst.y_std ** 2, inst.z_std ** 2, inst.w_std ** 2
    var_g = var_y + var_z
    var_b = var_y + var_w
    cov_gb = var_y + inst.rho_zw * inst.z_std * inst.w_std
    s2 = x.stds ** 2

    if var_b > 0:
        means = np.stack([x.means, np.zeros_like(x.means)], axis=1)
        covs = np.array([[[v + var_g, cov_gb], [cov_gb, var_b]] for v in s2])
        h_ab = mixture_entropy(x.weights, means, covs, opts=opts)
        h_cond = h_ab.value - gaussian_entropy(var_b)
        converged = h_ab.converged
    else:
        h_a = mixture_entropy_1d(x, extra_var=var_g, opts=opts)
        h_cond = h_a.value
        converged = h_a.converged

    h_xv = mixture_entropy_1d(x, extra_var=inst.v_std ** 2, opts=opts)
    left = h_cond - h_xv.value
    gaussian = Lemma2Instance(
        x_std=math.sqrt(x.variance), y_std=inst.y_std, z_std=inst.z_std, w_std=inst.w_std,
        v_std=inst.v_std, rho_xy=0.0, rho_zw=inst.rho_zw,
    )
    right = _lemma2_right(gaussian.table())
    return ProbeResult(gap=right - left, left=left, right=right, converged=converged and h_xv.converged)


# ---------------------------------------------------------------------------
# 随机实例
# ---------------------------------------------------------------------------

def _instance_rng(seed: int, index: int) -> np.random.Generator:
    """每个实例独立的随机流，便于并行复现"""
    return np.random.default_rng([seed, index])


def random_mixture(rng: np.random.Generator) -> MixtureSpec:
    weight = rng.uniform(0.2, 0.8)
    means = rng.uniform(-3.0, 3.0, size=2)
    stds = rng.uniform(0.4, 1.5, size=2)
    return MixtureSpec(weights=(weight, 1.0 - weight), means=means, stds=stds)


def random_gaussian_triple(seed: int, index: int) -> GaussianTriple:
    rng = _instance_rng(seed, index)
    var_x = rng.uniform(0.1, 4.0)
    var_z = rng.uniform(0.05, 3.0)
    var_u = rng.uniform(0.1, 4.0)
    rho = rng.uniform(-0.95, 0.95)
    return GaussianTriple.from_parts(var_x, var_z, var_u, rho * math.sqrt(var_x * var_u))


def random_lemma2_instance(seed: int, index: int) -> Lemma2Instance:
    rng = _instance_rng(seed, index)
    x_std, y_std, z_std, w_std = rng.uniform(0.1, 2.0, size=4)
    rho_xy, rho_zw = rng.uniform(-0.95, 0.95, size=2)
    var_zw = z_std ** 2 + w_std ** 2 - 2.0 * rho_zw * z_std * w_std
    v_std = math.sqrt(var_zw + rng.uniform(0.0, 1.0))
    return Lemma2Instance(x_std, y_std, z_std, w_std, v_std, rho_xy=rho_xy, rho_zw=rho_zw)


def random_lemma1_probes(count: int, seed: int = 0, opts: Optional[QuadratureOptions] = None) -> List[ProbeResult]:
    results = []
    for index in range(count):
        rng = _instance_rng(seed, index)
        x = random_mixture(rng)
        coupling = float(rng.uniform(-1.5, 1.5))
        results.append(lemma1_inequality_probe(
            x, coupling, float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.2, 2.0)), opts
        ))
    return results


def random_lemma2_instances(count: int, seed: int = 0) -> List[ProbeResult]:
    return [lemma2_gap(random_lemma2_instance(seed, index)) for index in range(count)]


def random_lemma2_probes(count: int, seed: int = 0, opts: Optional[QuadratureOptions] = None) -> List[ProbeResult]:
    results = []
    for index in range(count):
        inst = random_lemma2_instance(seed, index)
        x = random_mixture(_instance_rng(seed + 1, index))
        results.append(lemma2_mixture_probe(x, inst, opts))
    return results


def random_corollary7_probes(count: int, seed: int = 0, opts: Optional[QuadratureOptions] = None) -> List[ProbeResult]:
    results = []
    for index in range(count):
        rng = _instance_rng(seed, index)
        x = random_mixture(rng)
        z_std = float(rng.uniform(0.2, 2.0))
        w_std = float(z_std * rng.uniform(0.0, 1.0))
        rho = float(rng.uniform(-1.0, 1.0))
        results.append(corollary7_gap(w_std, z_std, rho * w_std * z_std, x, opts))
    return results
