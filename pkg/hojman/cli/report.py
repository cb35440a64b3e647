"""
认证报告
结论分为通过 / 不通过 / 输入错误，并映射到退出码 0 / 1 / 2
"""

import json
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from .. import __version__


class Verdict(Enum):
    """认证结论"""
    PASS = "pass"      # 全部检查通过
    FAIL = "fail"      # 前提或认证未通过（附反例点）
    ERROR = "error"    # 输入错误

    @property
    def exit_code(self) -> int:
        return {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.ERROR: 2}[self]


@dataclass
class Check:
    """单项检查"""
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "witness": self.witness,
        }


@dataclass
class Report:
    """
    一次命令的完整报告

    机器可读输出不含时间戳，同一输入、参数与种子得到逐字节相同的 JSON。
    """
    command: str
    verdict: Verdict = Verdict.PASS
    theorem: Optional[str] = None
    invariant: Optional[str] = None
    trivial: Optional[bool] = None
    constant_value: Optional[float] = None
    checks: List[Check] = field(default_factory=list)
    outputs: Dict[str, Any] = field(default_factory=dict)
    message: Optional[str] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def finalize(self) -> "Report":
        """由检查项决定结论（已是 ERROR 时保持不变）"""
        if self.verdict is Verdict.ERROR:
            return self
        self.verdict = Verdict.PASS if all(c.passed for c in self.checks) else Verdict.FAIL
        return self

    def fail(self, message: str, witness: Optional[Dict[str, float]] = None, name: str = "precondition") -> "Report":
        self.add(Check(name, False, {"message": message}, witness))
        self.verdict = Verdict.FAIL
        self.message = message
        return self

    def error(self, message: str) -> "Report":
        self.verdict = Verdict.ERROR
        self.message = message
        return self

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    @property
    def witness(self) -> Optional[Dict[str, float]]:
        for check in self.checks:
            if not check.passed and check.witness:
                return check.witness
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "verdict": self.verdict.value,
            "theorem": self.theorem,
            "invariant": self.invariant,
            "trivial": self.trivial,
            "constant_value": self.constant_value,
            "checks": [c.to_dict() for c in self.checks],
            "outputs": self.outputs,
            "message": self.message,
            "provenance": dict(self.provenance, tool_version=__version__),
        }

    def to_json(self) -> str:
        """单行 JSON（NDJSON），键排序"""
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    def to_text(self) -> str:
        """人类可读输出"""
        icon = {Verdict.PASS: "✅", Verdict.FAIL: "❌", Verdict.ERROR: "⚠️"}[self.verdict]
        lines = [
            "=" * 60,
            f"hojman {self.command}  ({datetime.now().strftime('%Y-%m-%d %H:%M:%S')})",
            "=" * 60,
        ]
        if self.theorem:
            lines.append(f"构造方式: {self.theorem}")
        if self.invariant is not None:
            suffix = f"  （常数 {self.constant_value:g}）" if self.trivial else ""
            lines.append(f"守恒量 I = {self.invariant}{suffix}")
        for key, value in self.outputs.items():
            lines.append(f"{key}: {value}")
        for check in self.checks:
            mark = "✓" if check.passed else "✗"
            line = f"  {mark} {check.name}"
            if check.witness:
                line += f"  反例点: {check.witness}"
            lines.append(line)
        if self.message:
            lines.append(f"说明: {self.message}")
        lines.append(f"{icon} 结论: {self.verdict.value}")
        return "\n".join(lines)
