"""The ``.irmia`` text format and DOT export.

Example::

    irmia Q
    inputs a, c
    outputs b
    states q0*, q1, PHI!
    must q0 ?a q1
    may q1 !b q0
    must q1 ?c PHI

Names that are not plain tokens (for instance the ``(p,q)`` pair names made by
the product operators) are written in double quotes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import DEFAULT_FAILURE, TAU, Edge, IrMia, Modality, validate

_PLAIN = re.compile(r'[^\s,"#*!?\\]+')


class ParseError(ValueError):
    """Syntax error, or ``violation`` set when the text parses but is not well formed."""

    def __init__(self, line: int, col: int, message: str, violation=None):
        self.line, self.col = line, col
        self.violation = violation
        super().__init__(f"line {line}, column {col}: {message}")


@dataclass
class _Cursor:
    text: str
    line: int
    pos: int = 0

    def error(self, message: str) -> ParseError:
        return ParseError(self.line, self.pos + 1, message)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def name(self) -> str:
        self.skip_ws()
        if self.peek() == '"':
            self.pos += 1
            buf = []
            while True:
                if self.pos >= len(self.text):
                    raise self.error("unterminated quoted name")
                ch = self.text[self.pos]
                self.pos += 1
                if ch == "\\" and self.pos < len(self.text):
                    buf.append(self.text[self.pos])
                    self.pos += 1
                elif ch == '"':
                    return "".join(buf)
                else:
                    buf.append(ch)
        m = _PLAIN.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group()


def _strip_comment(line: str) -> str:
    quoted = False
    for n, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return line[:n]
    return line


def _name_list(cur: _Cursor, markers: bool = False) -> list[tuple[str, str, int]]:
    items: list[tuple[str, str, int]] = []
    if cur.at_end():
        return items
    while True:
        col = cur.pos
        name = cur.name()
        mark = ""
        while markers and cur.peek() in ("*", "!") and cur.peek():
            mark += cur.text[cur.pos]
            cur.pos += 1
        items.append((name, mark, col))
        if cur.at_end():
            return items
        cur.expect(",")


def parse(text: str) -> IrMia:
    name = None
    inputs: list[str] = []
    outputs: list[str] = []
    states: list[str] = []
    declared_states = False
    initial = failure = None
    rows: list[tuple[Edge, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        cur = _Cursor(_strip_comment(raw), lineno)
        if cur.at_end():
            continue
        col = cur.pos
        m = re.compile(r"[a-z]+").match(cur.text, cur.pos)
        keyword = m.group() if m else ""
        cur.pos = m.end() if m else cur.pos
        if keyword == "irmia":
            if name is not None:
                raise ParseError(lineno, col + 1, "duplicate header")
            name = cur.name()
        elif keyword in ("inputs", "outputs"):
            target = inputs if keyword == "inputs" else outputs
            target.extend(n for n, _, _ in _name_list(cur))
        elif keyword == "states":
            declared_states = True
            for n, mark, c in _name_list(cur, markers=True):
                if "*" in mark:
                    if initial is not None:
                        raise ParseError(lineno, c + 1, "second initial state")
                    initial = n
                if "!" in mark:
                    if failure is not None:
                        raise ParseError(lineno, c + 1, "second failure state")
                    failure = n
                states.append(n)
        elif keyword in ("must", "may"):
            src = cur.name()
            cur.skip_ws()
            lcol = cur.pos
            sigil = cur.peek()
            if sigil in ("?", "!"):
                cur.pos += 1
                label = cur.name()
                wanted = inputs if sigil == "?" else outputs
                if label not in wanted:
                    kind = "input" if sigil == "?" else "output"
                    raise ParseError(lineno, lcol + 1, f"{label!r} is not a declared {kind}")
            else:
                label = cur.name()
                if label != TAU:
                    raise ParseError(lineno, lcol + 1, f"label {label!r} needs a ? or ! sigil")
            tgt = cur.name()
            if not cur.at_end():
                raise cur.error("trailing text")
            rows.append((Edge(src, label, tgt, Modality(keyword)), lineno))
        else:
            raise ParseError(lineno, col + 1, f"unknown line kind {keyword or cur.text.strip()!r}")
    if name is None:
        raise ParseError(1, 1, "missing 'irmia <name>' header")
    if failure is None:
        failure = DEFAULT_FAILURE
    if not declared_states:
        for e, _ in rows:
            states.extend((e.source, e.target))
    known = set(states) | {failure}
    for e, lineno in rows:
        for s in (e.source, e.target):
            if s not in known:
                raise ParseError(lineno, 1, f"undeclared state {s!r}")
    if initial is None:
        candidates = [s for s in states if s != failure]
        if not candidates:
            raise ParseError(1, 1, "no initial state")
        initial = candidates[0]
    if failure not in states:
        states.append(failure)
    aut = IrMia(name=name, inputs=tuple(inputs), outputs=tuple(outputs),
                states=tuple(states), initial=initial, failure=failure,
                edges=tuple(e for e, _ in rows))
    problems = validate(aut)
    if problems:
        v = problems[0]
        line = next((n for e, n in rows if v.edge is not None
                     and (e.source, e.label, e.target) == (v.edge.source, v.edge.label, v.edge.target)), 1)
        raise ParseError(line, 1, f"invalid automaton, clause {v.rule}: {v.message}", v)
    return aut


def _q(name: str) -> str:
    if _PLAIN.fullmatch(name) and name not in ("must", "may"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(aut: IrMia, label: str) -> str:
    if label == TAU:
        return TAU
    return ("?" if aut.is_input(label) else "!") + _q(label)


def serialize(aut: IrMia) -> str:
    lines = [f"irmia {_q(aut.name)}"]
    lines.append(("inputs " + ", ".join(_q(a) for a in aut.inputs)).rstrip())
    lines.append(("outputs " + ", ".join(_q(a) for a in aut.outputs)).rstrip())
    marked = []
    for s in aut.states:
        mark = ("*" if s == aut.initial else "") + ("!" if s == aut.failure else "")
        marked.append(_q(s) + mark)
    lines.append("states " + ", ".join(marked))
    for e in aut.edges:
        lines.append(f"{e.modality.value} {_q(e.source)} {_label(aut, e.label)} {_q(e.target)}")
    return "\n".join(lines) + "\n"


def _dq(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(aut: IrMia) -> str:
    lines = [f"digraph {_dq(aut.name)} {{", "  rankdir=LR;", "  node [shape=circle];",
             "  __start [shape=point, label=\"\"];", f"  __start -> {_dq(aut.initial)};"]
    for s in aut.states:
        shape = "doublecircle" if s == aut.failure else "circle"
        lines.append(f"  {_dq(s)} [shape={shape}];")
    for e in aut.edges:
        if e.label == TAU:
            text = "τ"
        else:
            text = ("?" if aut.is_input(e.label) else "!") + e.label
        style = "solid" if e.must else "dashed"
        lines.append(f"  {_dq(e.source)} -> {_dq(e.target)} [label={_dq(text)}, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load(path) -> IrMia:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(aut: IrMia, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(aut))
