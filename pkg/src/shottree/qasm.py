"""Reader and writer for a small OpenQASM 2.0 subset.

Supported: optional ``OPENQASM 2.0;`` header, ``include`` lines (ignored), a
single ``qreg``, at most one ``creg``, the gates listed in ``QASM_GATES``,
``barrier`` (dropped) and ``measure``.  Angles may be decimal literals or
arithmetic expressions over ``pi``.
"""
from __future__ import annotations

import ast
import math
import operator
import re

from .circuit import Circuit, Gate, GateKind

QASM_GATES: dict[str, str] = {
    "x": "X",
    "y": "Y",
    "z": "Z",
    "h": "H",
    "s": "S",
    "sdg": "SDG",
    "t": "T",
    "tdg": "TDG",
    "rx": "RX",
    "ry": "RY",
    "rz": "RZ",
    "u": "U",
    "u3": "U",
    "cx": "CX",
    "cz": "CZ",
    "swap": "SWAP",
    "cp": "CP",
}
_TAG_TO_QASM = {tag: name for name, tag in QASM_GATES.items() if name != "u3"}


class QasmError(ValueError):
    """Base class for parse failures; carries a 1-based source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(message + where)


class QasmSyntaxError(QasmError):
    pass


class UnsupportedGateError(QasmError):
    def __init__(self, name: str, line: int = 0, column: int = 0):
        self.gate = name
        super().__init__(f"unsupported gate {name!r}", line, column)


class QubitIndexError(QasmError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def eval_angle(text: str) -> float:
    """Evaluate an angle expression such as ``3*pi/4`` or ``-0.25``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"bad angle expression {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"bad angle expression {text!r}")

    try:
        return ev(tree)
    except ZeroDivisionError as exc:
        raise ValueError(f"division by zero in {text!r}") from exc


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_REG_DECL = re.compile(rf"^(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(
    rf"^measure\s+({_IDENT})(?:\s*\[\s*(\d+)\s*\])?\s*->\s*({_IDENT})(?:\s*\[\s*(\d+)\s*\])?$"
)
_GATE_CALL = re.compile(rf"^({_IDENT})\s*(?:\((.*)\))?\s*(.*)$", re.S)
_QARG = re.compile(rf"^({_IDENT})(?:\s*\[\s*(\d+)\s*\])?$")


def _statements(text: str):
    """Yield (statement, line, column) with comments stripped."""
    text = re.sub(r"//[^\n]*", lambda m: " " * len(m.group()), text)
    line, col = 1, 1
    start = None
    buf = []
    for ch in text:
        if ch == ";":
            stmt = "".join(buf).strip()
            if stmt:
                yield stmt, start[0], start[1]
            buf, start = [], None
        else:
            if start is None and not ch.isspace():
                start = (line, col)
            if start is not None:
                buf.append(ch)
        if ch == "\n":
            line, col = line + 1, 1
        else:
            col += 1
    rest = "".join(buf).strip()
    if rest:
        raise QasmSyntaxError("missing ';' at end of statement", *start)


def parse_qasm(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a :class:`Circuit`."""
    qreg: tuple[str, int] | None = None
    creg: tuple[str, int] | None = None
    gates: list[Gate] = []
    measured = False

    def qubit(arg: str, line: int, col: int) -> list[int]:
        m = _QARG.match(arg.strip())
        if not m:
            raise QasmSyntaxError(f"bad qubit argument {arg.strip()!r}", line, col)
        if qreg is None:
            raise QasmSyntaxError("gate before qreg declaration", line, col)
        name, idx = m.group(1), m.group(2)
        if name != qreg[0]:
            raise QasmSyntaxError(f"unknown register {name!r}", line, col)
        if idx is None:
            return list(range(qreg[1]))
        i = int(idx)
        if i >= qreg[1]:
            raise QubitIndexError(
                f"qubit {name}[{i}] out of range for register of size {qreg[1]}", line, col
            )
        return [i]

    for stmt, line, col in _statements(text):
        head = re.split(r"[\s(\[]", stmt, maxsplit=1)[0]
        if head == "OPENQASM":
            if not re.fullmatch(r"OPENQASM\s+2(\.0)?", stmt):
                raise QasmSyntaxError(f"unsupported header {stmt!r}", line, col)
            continue
        if head == "include":
            continue
        if head in ("qreg", "creg"):
            m = _REG_DECL.match(stmt)
            if not m:
                raise QasmSyntaxError(f"malformed register declaration {stmt!r}", line, col)
            size = int(m.group(3))
            if head == "qreg":
                if qreg is not None:
                    raise QasmSyntaxError("only one qreg is supported", line, col)
                if size < 1:
                    raise QasmSyntaxError("qreg must have at least one qubit", line, col)
                qreg = (m.group(2), size)
            else:
                if creg is not None:
                    raise QasmSyntaxError("only one creg is supported", line, col)
                creg = (m.group(2), size)
            continue
        if head == "gate" or head == "opaque":
            raise UnsupportedGateError(f"{head} definition", line, col)
        if head == "measure":
            m = _MEASURE.match(stmt)
            if not m:
                raise QasmSyntaxError(f"malformed measure {stmt!r}", line, col)
            arg = m.group(1) + (f"[{m.group(2)}]" if m.group(2) is not None else "")
            qubit(arg, line, col)
            measured = True
            continue
        if head == "barrier":
            for arg in stmt[len("barrier"):].split(","):
                if arg.strip():
                    qubit(arg, line, col)
            continue
        if head in ("if", "reset"):
            raise UnsupportedGateError(head, line, col)

        m = _GATE_CALL.match(stmt)
        if not m or not re.fullmatch(_IDENT, m.group(1)):
            raise QasmSyntaxError(f"cannot parse statement {stmt!r}", line, col)
        name, params_src, args_src = m.group(1), m.group(2), m.group(3)
        if name not in QASM_GATES:
            raise UnsupportedGateError(name, line, col)
        tag = QASM_GATES[name]
        params: list[float] = []
        if params_src is not None and params_src.strip():
            for piece in params_src.split(","):
                try:
                    params.append(eval_angle(piece))
                except ValueError as exc:
                    raise QasmSyntaxError(str(exc), line, col) from None
        try:
            kind = GateKind(tag, tuple(params))
        except ValueError as exc:
            raise QasmSyntaxError(str(exc), line, col) from None
        if not args_src.strip():
            raise QasmSyntaxError(f"{name} has no qubit arguments", line, col)
        args = [qubit(a, line, col) for a in args_src.split(",")]
        if len(args) != kind.num_qubits:
            raise QasmSyntaxError(
                f"{name} expects {kind.num_qubits} argument(s), got {len(args)}", line, col
            )
        if kind.num_qubits == 1:
            gates.extend(Gate(kind, (q,)) for q in args[0])
        else:
            if any(len(a) != 1 for a in args):
                raise QasmSyntaxError(f"register broadcast not supported for {name}", line, col)
            if args[0][0] == args[1][0]:
                raise QasmSyntaxError(f"{name} on a repeated qubit", line, col)
            gates.append(Gate(kind, (args[0][0], args[1][0])))

    if qreg is None:
        raise QasmSyntaxError("no qreg declared", 1, 1)
    return Circuit(qreg[1], tuple(gates), measured=measured)


def to_qasm(c: Circuit) -> str:
    """Serialize a circuit to OpenQASM 2.0 text that :func:`parse_qasm` reads back."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    if c.measured:
        lines.append(f"creg c[{c.n_qubits}];")
    for g in c.gates:
        name = _TAG_TO_QASM[g.tag]
        if g.kind.params:
            name += "(" + ",".join(repr(p) for p in g.kind.params) + ")"
        lines.append(f"{name} " + ",".join(f"q[{q}]" for q in g.qubits) + ";")
    if c.measured:
        lines.append("measure q -> c;")
    return "\n".join(lines) + "\n"
