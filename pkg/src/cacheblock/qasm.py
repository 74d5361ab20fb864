"""Reader and writer for a small OpenQASM 2.0 subset.

Accepted statements::

    OPENQASM 2.0;
    include "qelib1.inc";          (optional)
    qreg q[N];                     (exactly one)
    u1(l) q[i];  u2(p,l) q[i];  u3(t,p,l) q[i];
    cx q[c],q[t];  swap q[a],q[b];  barrier ...;

Parameters are arithmetic over decimal literals and ``pi`` and are folded
to floats while parsing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from . import circuit as ir
from .circuit import Circuit, Gate, GateKind
from .errors import ParseError, SourceSpan, UnsupportedGateError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<sym>->|[;,()\[\]+\-*/])
    """,
    re.VERBOSE,
)

_UNSUPPORTED = {"creg", "measure", "gate", "opaque", "if", "reset", "U", "CX"}
_ARITY = {"u1": (1, 1), "u2": (2, 1), "u3": (3, 1), "cx": (0, 2), "swap": (0, 2)}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        span = SourceSpan(line, pos - line_start + 1)
        if m is None:
            raise ParseError(span, f"unexpected character {source[pos]!r}", "lex")
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, pos - line_start + 1)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.reg_name: str | None = None
        self.n_qubits = 0
        self.gates: list[Gate] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def expect(self, text: str) -> Token:
        tok = self.tok
        if tok.text != text or tok.kind in ("string", "eof"):
            raise ParseError(tok.span, f"expected {text!r}, found {self.describe(tok)}")
        return self.advance()

    def expect_int(self) -> int:
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            raise ParseError(tok.span, f"expected an integer, found {self.describe(tok)}")
        self.advance()
        return int(tok.text)

    def parse(self) -> Circuit:
        head = self.tok
        if head.text != "OPENQASM":
            raise ParseError(head.span, f"missing 'OPENQASM 2.0;' header, found {self.describe(head)}")
        self.advance()
        version = self.tok
        if version.kind != "number" or float(version.text) != 2.0:
            raise ParseError(version.span, f"unsupported version {self.describe(version)}")
        self.advance()
        self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        if self.reg_name is None:
            raise ParseError(self.tok.span, "no qreg declared", "semantic")
        return Circuit(self.n_qubits, self.gates)

    def statement(self):
        tok = self.tok
        if tok.kind != "ident":
            raise ParseError(tok.span, f"expected a statement, found {self.describe(tok)}")
        word = tok.text
        if word == "include":
            self.advance()
            path = self.tok
            if path.kind != "string":
                raise ParseError(path.span, f"expected a file name, found {self.describe(path)}")
            if path.text != '"qelib1.inc"':
                raise ParseError(path.span, f"cannot include {path.text}", "semantic")
            self.advance()
            self.expect(";")
        elif word == "qreg":
            self.qreg()
        elif word == "barrier":
            self.advance()
            self.arguments(allow_register=True)
            self.expect(";")
        elif word in _ARITY:
            self.gate()
        elif word in _UNSUPPORTED:
            raise ParseError(tok.span, f"{word!r} is not supported; only pure-state gates are accepted",
                             "semantic")
        else:
            raise ParseError(tok.span, f"unknown gate or statement {word!r}")

    def qreg(self):
        tok = self.advance()
        if self.reg_name is not None:
            raise ParseError(tok.span, "only one qreg is supported", "semantic")
        name = self.tok
        if name.kind != "ident":
            raise ParseError(name.span, f"expected a register name, found {self.describe(name)}")
        self.advance()
        self.expect("[")
        size_tok = self.tok
        size = self.expect_int()
        if size < 1:
            raise ParseError(size_tok.span, "qreg size must be positive", "semantic")
        self.expect("]")
        self.expect(";")
        self.reg_name = name.text
        self.n_qubits = size

    def arguments(self, allow_register: bool = False) -> list[int]:
        args = [self.argument(allow_register)]
        while self.tok.text == ",":
            self.advance()
            args.append(self.argument(allow_register))
        return [a for a in args if a is not None]

    def argument(self, allow_register: bool) -> int | None:
        tok = self.tok
        if tok.kind != "ident":
            raise ParseError(tok.span, f"expected a qubit, found {self.describe(tok)}")
        if self.reg_name is None:
            raise ParseError(tok.span, "qubit used before qreg declaration", "semantic")
        if tok.text != self.reg_name:
            raise ParseError(tok.span, f"unknown register {tok.text!r}", "semantic")
        self.advance()
        if self.tok.text != "[":
            if allow_register:
                return None
            raise ParseError(tok.span, f"whole-register argument {tok.text!r} is not supported",
                             "semantic")
        self.advance()
        idx_tok = self.tok
        idx = self.expect_int()
        if idx >= self.n_qubits:
            raise ParseError(idx_tok.span,
                             f"qubit index {idx} out of range for {tok.text}[{self.n_qubits}]",
                             "semantic")
        self.expect("]")
        return idx

    def gate(self):
        tok = self.advance()
        name = tok.text
        n_params, n_qubits = _ARITY[name]
        params: list[float] = []
        if self.tok.text == "(":
            self.advance()
            if self.tok.text != ")":
                params.append(self.expr())
                while self.tok.text == ",":
                    self.advance()
                    params.append(self.expr())
            self.expect(")")
        if len(params) != n_params:
            raise ParseError(tok.span, f"{name!r} takes {n_params} parameter(s), got {len(params)}",
                             "semantic")
        qubits = self.arguments()
        if len(qubits) != n_qubits:
            raise ParseError(tok.span, f"{name!r} takes {n_qubits} qubit(s), got {len(qubits)}",
                             "semantic")
        if len(set(qubits)) != len(qubits):
            raise ParseError(tok.span, f"{name!r} repeats a qubit", "semantic")
        self.expect(";")
        try:
            self.gates.append(_build(name, params, qubits))
        except ValueError as exc:
            raise ParseError(tok.span, f"{name!r}: {exc}", "semantic") from None

    # expression grammar: sum := product (('+'|'-') product)*, etc.
    def expr(self) -> float:
        value = self.product()
        while self.tok.text in ("+", "-") and self.tok.kind == "sym":
            op = self.advance().text
            rhs = self.product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def product(self) -> float:
        value = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "sym":
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                value *= rhs
            elif rhs == 0:
                raise ParseError(op.span, "division by zero", "semantic")
            else:
                value /= rhs
        return value

    def unary(self) -> float:
        if self.tok.kind == "sym" and self.tok.text in ("+", "-"):
            sign = -1.0 if self.advance().text == "-" else 1.0
            return sign * self.unary()
        return self.primary()

    def primary(self) -> float:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(tok.span, f"literal {tok.text} overflows", "semantic")
            return value
        if tok.kind == "ident" and tok.text == "pi":
            self.advance()
            return math.pi
        if tok.text == "(" and tok.kind == "sym":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(tok.span, f"expected an expression, found {self.describe(tok)}")


def _build(name: str, params: list[float], qubits: list[int]) -> Gate:
    if name == "u1":
        return ir.u1(params[0], qubits[0])
    if name == "u2":
        return ir.u3(math.pi / 2, params[0], params[1], qubits[0])
    if name == "u3":
        return ir.u3(*params, qubits[0])
    if name == "cx":
        return ir.cx(qubits[0], qubits[1])
    return ir.swap(qubits[0], qubits[1])


def parse(source: str | bytes) -> Circuit:
    """Parse OpenQASM text. Any rejection is a :class:`ParseError`."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(SourceSpan(1, 1), f"input is not UTF-8: {exc.reason}", "lex") from None
    return _Parser(tokenize(source)).parse()


def parse_file(path) -> Circuit:
    with open(path, "rb") as fh:
        return parse(fh.read())


def emit(c: Circuit, reg: str = "q") -> str:
    """OpenQASM text that parses back to ``c`` gate for gate."""
    lines = ["OPENQASM 2.0;", f"qreg {reg}[{c.n_qubits}];"]
    for i, g in enumerate(c.gates):
        lines.append(_emit_gate(i, g, reg))
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit_gate(i: int, g: Gate, reg: str) -> str:
    if g.is_marker:
        raise UnsupportedGateError(i, f"{g.kind.value} is internal and has no OpenQASM form")
    q = [f"{reg}[{x}]" for x in g.qubits]
    if g.kind is GateKind.UNITARY1Q and g.name == "u3" and len(g.params) == 3:
        return f"u3({','.join(map(_fmt, g.params))}) {q[0]};"
    if g.kind is GateKind.DIAGONAL and g.name == "u1" and len(g.params) == 1:
        return f"u1({_fmt(g.params[0])}) {q[0]};"
    if g.kind is GateKind.UNITARY2Q and g.name == "cx":
        return f"cx {reg}[{g.control}],{reg}[{g.target}];"
    if g.kind is GateKind.SWAP:
        return f"swap {q[0]},{q[1]};"
    raise UnsupportedGateError(i, f"{g!r} has no retained u1/u3/cx/swap parameterization")


def annotate(c: Circuit) -> str:
    """Readable listing of a blocked circuit, markers included; not parseable."""
    out, depth = [], 0
    for i, g in enumerate(c.gates):
        if g.kind is GateKind.END_BLOCKING:
            depth = max(depth - 1, 0)
        params = "(" + ",".join(f"{p:.6g}" for p in g.params) + ")" if g.params else ""
        qubits = ",".join(str(x) for x in g.qubits)
        out.append(f"{i:5d}  {'  ' * depth}{g.name or g.kind.value}{params} {qubits}".rstrip())
        if g.kind is GateKind.BEGIN_BLOCKING:
            depth += 1
    return "\n".join(out) + ("\n" if out else "")
