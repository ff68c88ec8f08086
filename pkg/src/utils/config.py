"""
配置管理模块

负责加载和管理配置：config.yaml、${ENV} 占位符替换以及 .env 文件
"""

import os
import re

import yaml
from typing import Any, Dict, Optional
from pathlib import Path

from dotenv import load_dotenv

from .logger import get_logger

logger = get_logger(__name__)

CONFIG_ENV_VAR = "GIC_BOUNDS_CONFIG"
THREADS_ENV_VAR = "GIC_BOUNDS_THREADS"

_PLACEHOLDER = re.compile(r"\$\{(\w+)\}")


def _expand_env(node: Any) -> Any:
    """整值为 ${VAR} 的字符串替换为环境变量，未设置时为 None"""
    if isinstance(node, dict):
        return {k: _expand_env(v) for k, v in node.items()}
    if isinstance(node, list):
        return [_expand_env(v) for v in node]
    if isinstance(node, str):
        match = _PLACEHOLDER.fullmatch(node)
        if match:
            return os.getenv(match.group(1))
    return node


def _merge_into(base: Dict[str, Any], extra: Dict[str, Any]):
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge_into(base[key], value)
        else:
            base[key] = value


class Config:
    """配置管理类"""

    def __init__(self, config_path: Optional[str] = None):
        load_dotenv()
        self.config_path = config_path or os.getenv(CONFIG_ENV_VAR) or "config.yaml"
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self):
        """加载配置文件"""
        try:
            config_file = Path(self.config_path)

            if not config_file.exists():
                logger.debug(f"配置文件不存在，使用默认配置: {self.config_path}")
                self._config = self._get_default_config()
                return

            with open(config_file, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}

            if not isinstance(loaded, dict):
                logger.error(f"配置文件顶层必须是映射，使用默认配置: {self.config_path}")
                self._config = self._get_default_config()
                return

            # 文件中缺失的节使用默认值
            self._config = self._get_default_config()
            _merge_into(self._config, _expand_env(loaded))

            logger.debug(f"配置文件加载成功: {self.config_path}")

        except yaml.YAMLError as e:
            logger.error(f"配置文件解析失败: {e}")
            self._config = self._get_default_config()

    def _get_default_config(self) -> Dict[str, Any]:
        """获取默认配置"""
        return {
            "system": {
                "name": "GIC Bounds",
                "version": "1.0.0",
                "debug": False,
                "log_level": "WARNING"
            },
            "channel": {
                "kind": "real"
            },
            "search": {
                "grid_points_per_dim": 9,
                "refine_iters": 200,
                "tol_bits": 1e-7,
                "seed": 0,
                "restarts": 8
            },
            "region": {
                "points": 400,
                "thm9_knots": 12,
                "search": {
                    "grid_points_per_dim": 7,
                    "refine_iters": 120,
                    "restarts": 3
                }
            },
            "sweep": {
                "threads": None,
                "default_bounds": "all",
                "float_digits": 12
            },
            "lemma_lab": {
                "quad_rel_tol": 1e-8,
                "quad_min_order": 32,
                "quad_max_order": 256
            },
            "verify": {
                "tolerance_scale": 1.0,
                "seed": 2024
            },
            "logging": {
                "level": "WARNING",
                "format": "<level>{level: <8}</level> | <cyan>{name}</cyan>:{line} - <level>{message}</level>",
                "file": None,
                "rotation": "1 day",
                "retention": "30 days"
            }
        }

    def _walk(self, key: str, create: bool = False):
        """沿点号键走到父节点，返回 (父节点, 末级键)；路径不存在时返回 (None, 末级键)"""
        *parents, leaf = key.split('.')
        node: Any = self._config
        for part in parents:
            if not isinstance(node, dict):
                return None, leaf
            if part not in node and create:
                node[part] = {}
            node = node.get(part)
        return (node if isinstance(node, dict) else None), leaf

    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置值

        Args:
            key: 配置键，支持点号分隔的嵌套键
            default: 默认值

        Returns:
            配置值
        """
        node, leaf = self._walk(key)
        if node is None or leaf not in node:
            return default
        return node[leaf]

    def set(self, key: str, value: Any):
        """设置配置值，缺失的中间节自动创建"""
        node, leaf = self._walk(key, create=True)
        if node is None:
            raise KeyError(f"配置路径被非字典值占用: {key}")
        node[leaf] = value

    def get_section(self, section: str) -> Dict[str, Any]:
        """获取配置节"""
        return dict(self.get(section, {}) or {})

    def has(self, key: str) -> bool:
        return self.get(key) is not None

    def to_dict(self) -> Dict[str, Any]:
        return self._config.copy()

    def update(self, other: Dict[str, Any]):
        """按节合并外部配置"""
        _merge_into(self._config, other)
        logger.debug("配置已更新")

    def validate(self) -> bool:
        """
        验证配置

        Returns:
            是否有效
        """
        required_keys = [
            "system.name",
            "search.grid_points_per_dim",
            "search.tol_bits",
            "region.points",
            "lemma_lab.quad_rel_tol",
            "verify.tolerance_scale",
        ]

        for key in required_keys:
            if not self.has(key):
                logger.error(f"缺少必需的配置项: {key}")
                return False

        if self.get("channel.kind") not in ("real", "complex"):
            logger.error(f"未知的信道类型: {self.get('channel.kind')}")
            return False

        if self.get("search.grid_points_per_dim") < 2:
            logger.error("search.grid_points_per_dim 必须不小于 2")
            return False

        threads = self.sweep_threads()
        if threads is not None and threads < 1:
            logger.error(f"扫描线程数必须为正: {threads}")
            return False

        logger.debug("配置验证通过")
        return True

    def sweep_threads(self) -> Optional[int]:
        """扫描线程上限：GIC_BOUNDS_THREADS 优先，其次 sweep.threads"""
        raw = os.getenv(THREADS_ENV_VAR) or self.get("sweep.threads")
        if raw in (None, ""):
            return None
        try:
            return int(raw)
        except (TypeError, ValueError):
            logger.warning(f"无法解析扫描线程数: {raw}")
            return None

    def __getitem__(self, key: str) -> Any:
        """支持字典式访问"""
        return self.get(key)

    def __setitem__(self, key: str, value: Any):
        """支持字典式设置"""
        self.set(key, value)

    def __contains__(self, key: str) -> bool:
        """支持 in 操作符"""
        return self.has(key)
