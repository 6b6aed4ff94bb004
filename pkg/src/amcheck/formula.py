"""Alternating-time mu-calculus formulas.

Formulas are in negation normal form: negation only appears on atoms.  The
concrete syntax is

    true | false | p | ~p | f & g | f | g | [{1,2}] f | <{1,2}> f
         | X | mu X. f | nu X. f | (f)

where atoms start with a lowercase letter, variables with an uppercase one,
``&`` binds tighter than ``|``, and modalities and fixpoint binders extend
maximally to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FormulaError, ParseError


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class NegAtom:
    name: str


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Enforce:
    """[C] f: the coalition has a joint move forcing f everywhere."""

    coalition: tuple[int, ...]
    arg: "Formula"


@dataclass(frozen=True)
class Allows:
    """<C> f: the coalition cannot avoid f; every joint move allows it."""

    coalition: tuple[int, ...]
    arg: "Formula"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Mu:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Nu:
    var: str
    body: "Formula"


Formula = Top | Bot | Atom | NegAtom | And | Or | Enforce | Allows | Var | Mu | Nu

_PREFIX = (Enforce, Allows, Mu, Nu)


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Var):
        return frozenset((f.name,))
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Enforce, Allows)):
        return free_vars(f.arg)
    if isinstance(f, (Mu, Nu)):
        return free_vars(f.body) - {f.var}
    return frozenset()


def validate_formula(f: Formula) -> None:
    """Reject open or unclean formulas (every variable bound at most once)."""
    free = free_vars(f)
    if free:
        raise FormulaError(f"unbound variable {sorted(free)[0]}")
    seen: set[str] = set()

    def walk(t: Formula) -> None:
        if isinstance(t, (And, Or)):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, (Enforce, Allows)):
            if any(a < 1 for a in t.coalition):
                raise FormulaError(f"agent ids must be positive: {t.coalition}")
            if tuple(sorted(set(t.coalition))) != t.coalition:
                raise FormulaError(f"coalition not strictly ascending: {t.coalition}")
            walk(t.arg)
        elif isinstance(t, (Mu, Nu)):
            if t.var in seen:
                raise FormulaError(f"variable {t.var} bound twice")
            seen.add(t.var)
            walk(t.body)

    walk(f)


def connective_count(f: Formula) -> int:
    """Number of connectives; leaves contribute nothing."""
    if isinstance(f, (And, Or)):
        return 1 + connective_count(f.left) + connective_count(f.right)
    if isinstance(f, (Enforce, Allows)):
        return 1 + connective_count(f.arg)
    if isinstance(f, (Mu, Nu)):
        return 1 + connective_count(f.body)
    return 0


def syntactic_size(f: Formula) -> int:
    """Connectives plus leaves."""
    if isinstance(f, (And, Or)):
        return 1 + syntactic_size(f.left) + syntactic_size(f.right)
    if isinstance(f, (Enforce, Allows)):
        return 1 + syntactic_size(f.arg)
    if isinstance(f, (Mu, Nu)):
        return 1 + syntactic_size(f.body)
    return 1


def coalitions_in(f: Formula) -> set[tuple[int, ...]]:
    """All coalitions mentioned by modalities, for restricted conversion."""
    if isinstance(f, (And, Or)):
        return coalitions_in(f.left) | coalitions_in(f.right)
    if isinstance(f, (Enforce, Allows)):
        return {f.coalition} | coalitions_in(f.arg)
    if isinstance(f, (Mu, Nu)):
        return coalitions_in(f.body)
    return set()


def format_coalition(coalition: tuple[int, ...]) -> str:
    return "{" + ",".join(str(a) for a in coalition) + "}"


def format_formula(f: Formula) -> str:
    """Render text that parses back to the same tree.

    Binary nodes carry their own parentheses; a prefix form only needs them
    when it sits left of a binary operator, where it would otherwise swallow
    the rest of the line.
    """
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NegAtom):
        return "~" + f.name
    if isinstance(f, Var):
        return f.name
    if isinstance(f, (And, Or)):
        op = "&" if isinstance(f, And) else "|"
        left = format_formula(f.left)
        if isinstance(f.left, _PREFIX):
            left = "(" + left + ")"
        return f"({left} {op} {format_formula(f.right)})"
    if isinstance(f, Enforce):
        return f"[{format_coalition(f.coalition)}] {format_formula(f.arg)}"
    if isinstance(f, Allows):
        return f"<{format_coalition(f.coalition)}> {format_formula(f.arg)}"
    if isinstance(f, Mu):
        return f"mu {f.var}. {format_formula(f.body)}"
    return f"nu {f.var}. {format_formula(f.body)}"


_KEYWORDS = {"true", "false", "mu", "nu"}
_TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*|\d+|[&|~\[\]<>{}(),.]")
_SPACE = re.compile(r"[ \t\r\n]*")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, int]] = []  # (lexeme, offset)
        pos = 0
        while True:
            pos = _SPACE.match(text, pos).end()
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", *self._linecol(pos))
            self.tokens.append((m.group(), pos))
            pos = m.end()
        self.i = 0

    def _linecol(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def _fail(self, message: str) -> None:
        offset = self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)
        raise ParseError(message, *self._linecol(offset))

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self) -> str:
        if self.i >= len(self.tokens):
            self._fail("unexpected end of input")
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, lexeme: str) -> None:
        if self.peek() != lexeme:
            self._fail(f"expected {lexeme!r}")
        self.i += 1

    def formula(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "|":
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.prefixed()
        while self.peek() == "&":
            self.i += 1
            left = And(left, self.prefixed())
        return left

    def prefixed(self) -> Formula:
        tok = self.peek()
        if tok == "[":
            self.i += 1
            coalition = self.coalition()
            self.expect("]")
            return Enforce(coalition, self.formula())
        if tok == "<":
            self.i += 1
            coalition = self.coalition()
            self.expect(">")
            return Allows(coalition, self.formula())
        if tok in ("mu", "nu"):
            self.i += 1
            var = self.take()
            if not var[0].isupper():
                self._fail("fixpoint variable must start uppercase")
            self.expect(".")
            body = self.formula()
            return Mu(var, body) if tok == "mu" else Nu(var, body)
        return self.atomic()

    def atomic(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self._fail("unexpected end of input")
        if tok == "(":
            self.i += 1
            inner = self.formula()
            self.expect(")")
            return inner
        if tok == "~":
            self.i += 1
            name = self.take()
            if not name[0].islower() or name in _KEYWORDS:
                self._fail("negation applies to an atom")
            return NegAtom(name)
        if tok == "true":
            self.i += 1
            return Top()
        if tok == "false":
            self.i += 1
            return Bot()
        if tok[0].isupper():
            self.i += 1
            return Var(tok)
        if tok[0].islower() and tok not in _KEYWORDS:
            self.i += 1
            return Atom(tok)
        self._fail(f"unexpected token {tok!r}")

    def coalition(self) -> tuple[int, ...]:
        self.expect("{")
        agents: list[int] = []
        if self.peek() != "}":
            while True:
                tok = self.take()
                if not tok.isdigit():
                    self._fail("agent id expected")
                agents.append(int(tok))
                if self.peek() != ",":
                    break
                self.i += 1
        self.expect("}")
        return tuple(sorted(set(agents)))


def parse_formula(text: str) -> Formula:
    """Parse a closed, clean formula; raise ParseError/FormulaError otherwise."""
    parser = _Parser(text)
    f = parser.formula()
    if parser.i < len(parser.tokens):
        parser._fail("trailing input after formula")
    validate_formula(f)
    return f


def fixpoint_priorities(f: Formula) -> dict[str, int]:
    """Priority per binder: the least value of the right parity (even for nu,
    odd for mu) that dominates every fixpoint subformula still mentioning the
    binder's variable.  Cleanness makes the variable name a valid key."""
    priorities: dict[str, int] = {}

    def walk(t: Formula) -> tuple[frozenset[str], list[tuple[int, frozenset[str]]]]:
        if isinstance(t, Var):
            return frozenset((t.name,)), []
        if isinstance(t, (And, Or)):
            fl, dl = walk(t.left)
            fr, dr = walk(t.right)
            return fl | fr, dl + dr
        if isinstance(t, (Enforce, Allows)):
            return walk(t.arg)
        if isinstance(t, (Mu, Nu)):
            fb, db = walk(t.body)
            dominated = max((p for p, fv in db if t.var in fv), default=0)
            want_odd = isinstance(t, Mu)
            prio = dominated if dominated % 2 == int(want_odd) else dominated + 1
            priorities[t.var] = prio
            free = fb - {t.var}
            return free, db + [(prio, free)]
        return frozenset(), []

    walk(f)
    return priorities


@dataclass(frozen=True)
class ClosureNode:
    kind: str  # top bot atom negatom and or enforce allows mu nu
    atom: str | None
    coalition: tuple[int, ...] | None
    children: tuple[int, ...]
    priority: int
    label: str


@dataclass(frozen=True)
class ClosureGraph:
    """Closure members as a graph: the syntax tree with every variable
    occurrence replaced by an edge back to its binder, and identical
    non-binder subterms shared.  Node count never exceeds the syntactic
    size of the source formula."""

    nodes: tuple[ClosureNode, ...]
    root: int
    max_priority: int
    source: Formula

    def __len__(self) -> int:
        return len(self.nodes)

    def unfold(self, node_id: int) -> int:
        """Body of a fixpoint node; unfolding re-enters through the binder."""
        node = self.nodes[node_id]
        if node.kind not in ("mu", "nu"):
            raise FormulaError(f"node {node_id} ({node.label}) is not a fixpoint")
        return node.children[0]


def build_closure(f: Formula) -> ClosureGraph:
    validate_formula(f)
    priorities = fixpoint_priorities(f)
    records: list[list] = []  # kind, atom, coalition, children(list), priority, label
    shared: dict[tuple, int] = {}

    def leaf(kind: str, atom: str | None, label: str) -> int:
        return node(kind, atom, None, [], 0, label)

    def node(kind, atom, coalition, children, priority, label) -> int:
        key = (kind, atom, coalition, tuple(children))
        if key in shared:
            return shared[key]
        nid = len(records)
        records.append([kind, atom, coalition, children, priority, label])
        shared[key] = nid
        return nid

    def go(t: Formula, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Top):
            return leaf("top", None, "true")
        if isinstance(t, Bot):
            return leaf("bot", None, "false")
        if isinstance(t, Atom):
            return leaf("atom", t.name, t.name)
        if isinstance(t, NegAtom):
            return leaf("negatom", t.name, "~" + t.name)
        if isinstance(t, (And, Or)):
            kind = "and" if isinstance(t, And) else "or"
            left = go(t.left, env)
            right = go(t.right, env)
            return node(kind, None, None, [left, right], 0, format_formula(t))
        if isinstance(t, (Enforce, Allows)):
            kind = "enforce" if isinstance(t, Enforce) else "allows"
            child = go(t.arg, env)
            return node(kind, None, t.coalition, [child], 0, format_formula(t))
        # fixpoints are never shared: a clean formula binds each variable once
        kind = "mu" if isinstance(t, Mu) else "nu"
        nid = len(records)
        records.append([kind, None, None, [None], priorities[t.var], format_formula(t)])
        body = go(t.body, {**env, t.var: nid})
        records[nid][3][0] = body
        return nid

    root = go(f, {})
    assert len(records) <= syntactic_size(f)
    nodes = tuple(
        ClosureNode(kind, atom, coalition, tuple(children), priority, label)
        for kind, atom, coalition, children, priority, label in records
    )
    return ClosureGraph(
        nodes=nodes,
        root=root,
        max_priority=max(n.priority for n in nodes),
        source=f,
    )
