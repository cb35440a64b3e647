"""
表达式解析器（递归下降）

文法:
    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := unary ("^" factor)?          右结合
    unary   := "-" unary | primary
    primary := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

不允许隐式乘法，空白无意义。
"""

import math
import re
from dataclasses import dataclass
from typing import List

from ..errors import ParseError, UnknownFunctionError
from .nodes import FUNCTIONS, Add, Const, Div, Expr, Func, Mul, Neg, Pow, Sub, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_PRIMARY_START = frozenset({"NUMBER", "IDENT", "(", "-"})


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER / IDENT / 运算符本身 / EOF
    text: str
    offset: int  # UTF-8 字节偏移


def tokenize(src: str) -> List[Token]:
    """切分记号，偏移量按 UTF-8 字节计"""
    tokens: List[Token] = []
    pos = 0
    while pos < len(src):
        match = _TOKEN.match(src, pos)
        byte_offset = len(src[:pos].encode("utf-8"))
        if match is None:
            raise ParseError(f"非法字符 {src[pos]!r}", byte_offset, _PRIMARY_START)
        kind = match.lastgroup
        text = match.group()
        if kind == "number":
            tokens.append(Token("NUMBER", text, byte_offset))
        elif kind == "ident":
            tokens.append(Token("IDENT", text, byte_offset))
        elif kind == "op":
            tokens.append(Token(text, text, byte_offset))
        pos = match.end()
    tokens.append(Token("EOF", "", len(src.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            self.fail(frozenset({kind}))
        return self.advance()

    def fail(self, expected):
        token = self.current
        found = "输入结束" if token.kind == "EOF" else repr(token.text)
        raise ParseError(f"意外的记号 {found}", token.offset, expected)

    def expr(self) -> Expr:
        node = self.term()
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            right = self.term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.current.kind in ("*", "/"):
            op = self.advance().kind
            right = self.factor()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def factor(self) -> Expr:
        base = self.unary()
        if self.current.kind == "^":
            self.advance()
            return Pow(base, self.factor())
        return base

    def unary(self) -> Expr:
        if self.current.kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "NUMBER":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise ParseError(f"数值溢出: {token.text}", token.offset)
            return Const(value)
        if token.kind == "IDENT":
            self.advance()
            if self.current.kind == "(":
                if token.text not in FUNCTIONS:
                    raise UnknownFunctionError(token.text, token.offset)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Func(token.text, arg)
            return Var(token.text)
        if token.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(_PRIMARY_START)


def parse_expr(src: str) -> Expr:
    """
    解析表达式文本

    Args:
        src: 文法中的表达式

    Returns:
        语法树

    Raises:
        ParseError: 语法错误（含字节偏移与期望记号）
        UnknownFunctionError: 函数名不在 sin/cos/tan/exp/log/sqrt/abs 中
    """
    parser = _Parser(tokenize(src))
    node = parser.expr()
    if parser.current.kind != "EOF":
        parser.fail(frozenset({"+", "-", "*", "/", "^", "EOF"}))
    return node
