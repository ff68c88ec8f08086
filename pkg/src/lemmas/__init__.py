"""
引理数值验证模块

高斯混合熵的 Gauss-Hermite 积分与信息不等式的等号、方向检查
"""

from .quadrature import QuadratureOptions, QuadratureResult, MixtureSpec, mixture_entropy, mixture_entropy_1d
from .lab import (
    ProbeResult,
    GaussianTriple,
    Lemma2Instance,
    lemma1_gap,
    lemma1_inequality_probe,
    lemma2_gap,
    lemma2_mixture_probe,
    corollary7_gap,
    random_gaussian_triple,
    random_lemma2_instance,
    random_lemma1_probes,
    random_lemma2_instances,
    random_lemma2_probes,
    random_corollary7_probes,
)

__all__ = [
    "QuadratureOptions",
    "QuadratureResult",
    "MixtureSpec",
    "mixture_entropy",
    "mixture_entropy_1d",
    "ProbeResult",
    "GaussianTriple",
    "Lemma2Instance",
    "lemma1_gap",
    "lemma1_inequality_probe",
    "lemma2_gap",
    "lemma2_mixture_probe",
    "corollary7_gap",
    "random_gaussian_triple",
    "random_lemma2_instance",
    "random_lemma1_probes",
    "random_lemma2_instances",
    "random_lemma2_probes",
    "random_corollary7_probes",
]
