"""
GIC 容量界计算工具主程序

命令行入口：python main.py sweep|region|gap|verify ...
"""

import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.cli.app import main


if __name__ == "__main__":
    sys.exit(main())
