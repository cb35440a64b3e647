#!/usr/bin/env python3
"""
Hojman 守恒量工具 - 命令行入口

由无穷小对称与 Jacobi 乘子构造一阶 ODE 系统的守恒量，
并以随机数值判等与 RK4 轨线漂移进行认证。

使用方法：
    python hojman_cli.py <check|invariant|verify|lagrangian> <问题文件> [选项]

示例：
    python hojman_cli.py invariant problems/oscillator.json
    python hojman_cli.py verify problems/oscillator.json --json
    python hojman_cli.py lagrangian problems/caldirola_kanai.json --show multiplier
"""

import sys

from hojman.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
