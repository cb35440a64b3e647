# Hojman Integrals - 对称性与 Jacobi 乘子构造守恒量
"""
基于无穷小对称性与 Jacobi 乘子的首次积分构造与认证工具
符号表达式 + 随机数值判等 + RK4 轨迹漂移检验
"""

__version__ = "0.1.0"
