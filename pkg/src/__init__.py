# 两用户高斯干扰信道容量界
__version__ = "1.0.0"
__author__ = "GIC Bounds Team"
