"""
守恒量构造结果
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from ..expr import EqualityReport, Expr, SampleBox, render
from ..geometry import Multiplier, VectorField


class TheoremTag(Enum):
    """构造方式标签"""
    DIVFREE_SYMMETRY = "divfree_symmetry"                  # 无散场 + 对称：I = div Y
    MULTIPLIER_SYMMETRY = "multiplier_symmetry"            # 乘子 + 对称：I = div Y + Y(log R)
    NORMALIZER = "normalizer"                              # 正规化子：再加 h
    NONAUTONOMOUS_DIVFREE = "nonautonomous_divfree"        # (t, x) 上：div Y - X(Y^0)
    NONAUTONOMOUS_MULTIPLIER = "nonautonomous_multiplier"  # (t, x) 上：div Y + Y(log R) - X(Y^0)
    LAGRANGIAN_PROLONGED = "lagrangian_prolonged"          # 点变换延拓 + det W
    SODE_LIFTED = "sode_lifted"                            # 二阶系统提升场上的构造

    @property
    def uses_multiplier(self) -> bool:
        return self in (
            TheoremTag.MULTIPLIER_SYMMETRY,
            TheoremTag.NONAUTONOMOUS_MULTIPLIER,
            TheoremTag.LAGRANGIAN_PROLONGED,
        )


@dataclass
class InvariantResult:
    """
    守恒量 I 及其来源

    certification 为 𝓛_X I ≈ 0 的检验报告；constant_value 非空时 I 在采样盒上为常数（平凡守恒量）。
    """
    invariant: Expr
    theorem: TheoremTag
    X: VectorField
    Y: VectorField
    box: SampleBox
    rtol: float
    R: Optional[Multiplier] = None
    h: Optional[Expr] = None
    certification: Optional[EqualityReport] = None
    constant_value: Optional[float] = None
    preconditions: List[EqualityReport] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def trivial(self) -> bool:
        return self.constant_value is not None

    @property
    def text(self) -> str:
        return render(self.invariant)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "invariant": self.text,
            "theorem": self.theorem.value,
            "trivial": self.trivial,
            "constant_value": self.constant_value,
            "ingredients": {
                "X": [render(c) for c in self.X.components],
                "Y": [render(c) for c in self.Y.components],
                "R": render(self.R.R) if self.R is not None else None,
                "h": render(self.h) if self.h is not None else None,
            },
            "certification": self.certification.to_dict() if self.certification else None,
            "notes": list(self.notes),
        }
