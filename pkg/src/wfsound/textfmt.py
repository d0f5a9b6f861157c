"""Line-oriented text format for nets.

::

    place-line ::= "place" NAME ["initial" | "final"]
    trans-line ::= "trans" NAME ":" bag "->" bag
    bag        ::= /*empty*/ | item { "," item }
    item       ::= [NAT "*"] NAME

``#`` starts a comment, blank lines are ignored.  Weight-0 arcs are not
representable: an absent item means weight 0, and an explicit ``0*x`` is
rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .nets import NetError, PetriNet, WorkflowNet, validate_workflow

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NAT = re.compile(r"[0-9]+")


class ParseError(NetError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateIdentifier(ParseError):
    pass


class UnknownPlace(ParseError):
    pass


class BadWeight(ParseError):
    pass


class DuplicateDesignation(ParseError):
    pass


@dataclass(frozen=True)
class ParsedNet:
    net: PetriNet
    initial: str | None
    final: str | None

    def workflow(self) -> WorkflowNet:
        """Validate and return the designated workflow net."""
        if self.initial is None or self.final is None:
            raise NetError("net file lacks an initial or final designation")
        return validate_workflow(self.net, self.initial, self.final)


class _Line:
    def __init__(self, text: str, number: int):
        self.text = text
        self.number = number
        self.pos = 0

    def error(self, message, cls=ParseError):
        raise cls(message, self.number, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def name(self) -> str:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def nat(self) -> int:
        self.skip_ws()
        m = _NAT.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return int(m.group())


def _parse_bag(line: _Line, stop: str) -> dict:
    """Parse a possibly empty comma-separated bag up to ``stop``."""
    bag = {}
    line.skip_ws()
    if line.at_end() if stop == "" else line.text.startswith(stop, line.pos):
        return bag
    while True:
        line.skip_ws()
        start = line.pos
        ch = line.peek()
        if ch.isdigit():
            weight = line.nat()
            line.skip_ws()
            if line.peek() != "*":
                line.pos = start
                line.error("expected '*' after a weight", BadWeight)
            line.take("*")
            if weight == 0:
                line.pos = start
                line.error("arc weight 0 is not representable", BadWeight)
        else:
            weight = 1
        name = line.name()
        bag[name] = bag.get(name, 0) + weight
        line.skip_ws()
        if line.peek() == ",":
            line.take(",")
            continue
        break
    return bag


def parse_net(text: str) -> ParsedNet:
    """Parse a net document; places and transitions keep declaration order."""
    places = []
    seen = set()
    transitions = []
    initial = None
    final = None
    pending = []  # (line, name, pre, post) resolved after all places are known

    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        line = _Line(body, number)
        keyword = line.name()
        if keyword == "place":
            name = line.name()
            if name in seen:
                line.error(f"duplicate identifier {name!r}", DuplicateIdentifier)
            seen.add(name)
            places.append(name)
            if not line.at_end():
                tag = line.name()
                if tag == "initial":
                    if initial is not None:
                        line.error("more than one initial place", DuplicateDesignation)
                    initial = name
                elif tag == "final":
                    if final is not None:
                        line.error("more than one final place", DuplicateDesignation)
                    final = name
                else:
                    line.error(f"unexpected token {tag!r}")
            if not line.at_end():
                line.error("trailing input after place line")
        elif keyword == "trans":
            name = line.name()
            if name in seen:
                line.error(f"duplicate identifier {name!r}", DuplicateIdentifier)
            seen.add(name)
            line.take(":")
            pre = _parse_bag(line, "->")
            line.take("->")
            post = _parse_bag(line, "")
            if not line.at_end():
                line.error("trailing input after transition line")
            pending.append((line, name, pre, post))
        else:
            line.pos = 0
            line.error(f"expected 'place' or 'trans', got {keyword!r}")

    place_set = set(places)
    for line, name, pre, post in pending:
        for bag in (pre, post):
            for pname in bag:
                if pname not in place_set:
                    line.error(f"unknown place {pname!r}", UnknownPlace)
        transitions.append((name, pre, post))
    return ParsedNet(PetriNet(places, transitions), initial, final)


def _format_bag(net: PetriNet, items) -> str:
    parts = []
    for p, w in items:
        name = net.places[p]
        parts.append(name if w == 1 else f"{w}*{name}")
    return ", ".join(parts)


def serialize_net(
    net: PetriNet,
    initial: str | None = None,
    final: str | None = None,
    header: dict | None = None,
) -> str:
    """Render a net document that reparses to an identical net.

    ``header`` is echoed as a JSON comment on the first line, used by the
    generators to record instance parameters.
    """
    lines = []
    if header is not None:
        import json

        lines.append("# " + json.dumps(header, sort_keys=True))
    for p in net.places:
        tag = ""
        if p == initial:
            tag = " initial"
        elif p == final:
            tag = " final"
        lines.append(f"place {p}{tag}")
    for ti, t in enumerate(net.transitions):
        pre = _format_bag(net, net.pre[ti])
        post = _format_bag(net, net.post[ti])
        lines.append(f"trans {t} : {pre} -> {post}")
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_workflow(wf: WorkflowNet, header: dict | None = None) -> str:
    return serialize_net(wf.net, wf.initial, wf.final, header)
