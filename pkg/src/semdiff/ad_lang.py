"""Textual activity-diagram language: syntax tree, parser, printer, checks.

Diagrams declare typed variables (bool or small enums), control nodes, and
edges. ``start`` and ``end`` are reserved names for the implicit initial and
final nodes; extra final nodes can be declared with ``final name;``. Guards
are boolean expressions over the variables and may only label edges leaving
decision nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .lexer import EOF, IDENT, Diagnostic, ParseError, Token, TokenCursor, tokenize

BOOL_DOMAIN = ("false", "true")

START = "start"
END = "end"


class VarKind(Enum):
    INPUT = "input"
    LOCAL = "local"


class NodeKind(Enum):
    INITIAL = "initial"
    FINAL = "final"
    ACTION = "action"
    DECISION = "decision"
    MERGE = "merge"
    FORK = "fork"
    JOIN = "join"


@dataclass(frozen=True)
class VarDecl:
    name: str
    kind: VarKind
    domain: tuple[str, ...]
    initial: str | None = None  # locals only; resolved to a concrete value
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def is_bool(self) -> bool:
        return self.domain == BOOL_DOMAIN


# --- guards ---------------------------------------------------------------


@dataclass(frozen=True)
class GuardLit:
    value: bool


@dataclass(frozen=True)
class GuardVar:
    var: str


@dataclass(frozen=True)
class GuardCmp:
    var: str
    op: str  # "==" or "!="
    value: str


@dataclass(frozen=True)
class GuardNot:
    inner: "Guard"


@dataclass(frozen=True)
class GuardAnd:
    left: "Guard"
    right: "Guard"


@dataclass(frozen=True)
class GuardOr:
    left: "Guard"
    right: "Guard"


Guard = GuardLit | GuardVar | GuardCmp | GuardNot | GuardAnd | GuardOr


def eval_guard(guard: Guard, state: dict[str, str]) -> bool:
    if isinstance(guard, GuardLit):
        return guard.value
    if isinstance(guard, GuardVar):
        return state[guard.var] == "true"
    if isinstance(guard, GuardCmp):
        hit = state[guard.var] == guard.value
        return hit if guard.op == "==" else not hit
    if isinstance(guard, GuardNot):
        return not eval_guard(guard.inner, state)
    if isinstance(guard, GuardAnd):
        return eval_guard(guard.left, state) and eval_guard(guard.right, state)
    if isinstance(guard, GuardOr):
        return eval_guard(guard.left, state) or eval_guard(guard.right, state)
    raise TypeError(f"not a guard: {guard!r}")


_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def print_guard(guard: Guard, _parent: int = 0) -> str:
    if isinstance(guard, GuardLit):
        return "true" if guard.value else "false"
    if isinstance(guard, GuardVar):
        return guard.var
    if isinstance(guard, GuardCmp):
        return f"{guard.var} {guard.op} {guard.value}"
    if isinstance(guard, GuardNot):
        return f"!{print_guard(guard.inner, _PREC_NOT)}"
    if isinstance(guard, GuardAnd):
        text = f"{print_guard(guard.left, _PREC_AND)} && {print_guard(guard.right, _PREC_AND)}"
        return f"({text})" if _parent > _PREC_AND else text
    if isinstance(guard, GuardOr):
        text = f"{print_guard(guard.left, _PREC_OR)} || {print_guard(guard.right, _PREC_OR)}"
        return f"({text})" if _parent > _PREC_OR else text
    raise TypeError(f"not a guard: {guard!r}")


# --- nodes and edges --------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    source: str
    source_is_var: bool = False


@dataclass(frozen=True)
class Node:
    name: str
    kind: NodeKind
    assignments: tuple[Assign, ...] = ()
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    guard: Guard | None = None
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ActivityDiagram:
    name: str
    variables: tuple[VarDecl, ...]
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]

    def node(self, name: str) -> Node:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def action_names(self) -> frozenset[str]:
        return frozenset(n.name for n in self.nodes if n.kind is NodeKind.ACTION)

    def input_vars(self) -> tuple[VarDecl, ...]:
        return tuple(v for v in self.variables if v.kind is VarKind.INPUT)


_NODE_KEYWORDS = {
    "action": NodeKind.ACTION,
    "decision": NodeKind.DECISION,
    "merge": NodeKind.MERGE,
    "fork": NodeKind.FORK,
    "join": NodeKind.JOIN,
    "final": NodeKind.FINAL,
}


def parse_ad(text: str) -> ActivityDiagram:
    """Parse and validate activity-diagram text.

    Validation covers declarations, guard typing, node degree rules, and
    reachability; every problem is reported with its source position.
    """
    cur = TokenCursor(tokenize(text))
    cur.expect_keyword("activity")
    name = cur.expect_ident("an activity name").text
    cur.expect_sym("{")
    raw_vars: list[tuple[Token, VarKind, tuple[str, ...], Token | None]] = []
    raw_nodes: list[tuple[NodeKind, Token, list[tuple[Token, Token]]]] = []
    raw_edges: list[tuple[Token, Guard | None, Token]] = []
    while not cur.at_sym("}"):
        tok = cur.peek()
        if tok.kind == EOF:
            cur.fail("expected '}', found end of input")
        if tok.kind != IDENT:
            cur.fail(f"expected a declaration or an edge, found {tok.describe()}")
        if tok.text in ("input", "local") and cur.peek(1).kind == IDENT:
            raw_vars.append(_parse_vardecl(cur))
        elif tok.text in _NODE_KEYWORDS and cur.peek(1).kind == IDENT:
            raw_nodes.append(_parse_nodedecl(cur))
        else:
            raw_edges.append(_parse_edge(cur))
    cur.expect_sym("}")
    cur.expect_eof()
    return _resolve(name, raw_vars, raw_nodes, raw_edges)


def _parse_vardecl(cur: TokenCursor):
    kind = VarKind.INPUT if cur.advance().text == "input" else VarKind.LOCAL
    name_tok = cur.expect_ident("a variable name")
    cur.expect_sym(":")
    if cur.eat_ident("bool"):
        domain = BOOL_DOMAIN
    else:
        cur.expect_sym("{")
        values = [cur.expect_ident("a domain value").text]
        if not cur.at_sym(","):
            cur.fail("expected ',' (enum domains need at least two values)")
        while cur.eat_sym(","):
            values.append(cur.expect_ident("a domain value").text)
        cur.expect_sym("}")
        domain = tuple(values)
    initial_tok = None
    if cur.eat_sym("="):
        initial_tok = cur.expect_ident("an initial value")
    cur.expect_sym(";")
    return name_tok, kind, domain, initial_tok


def _parse_nodedecl(cur: TokenCursor):
    kind = _NODE_KEYWORDS[cur.advance().text]
    name_tok = cur.expect_ident("a node name")
    assigns: list[tuple[Token, Token]] = []
    if kind is NodeKind.ACTION and cur.eat_sym("/"):
        while True:
            target = cur.expect_ident("an assignment target")
            cur.expect_sym(":=")
            source = cur.expect_ident("a value or variable")
            assigns.append((target, source))
            if not cur.eat_sym(","):
                break
    cur.expect_sym(";")
    return kind, name_tok, assigns


def _parse_edge(cur: TokenCursor):
    src_tok = cur.expect_ident("a node name")
    guard = None
    if cur.eat_sym("-["):
        guard = _parse_guard(cur)
        cur.expect_sym("]->")
    else:
        cur.expect_sym("->")
    dst_tok = cur.expect_ident("a node name")
    cur.expect_sym(";")
    return src_tok, guard, dst_tok


def _parse_guard(cur: TokenCursor) -> Guard:
    left = _parse_guard_and(cur)
    while cur.eat_sym("||"):
        left = GuardOr(left, _parse_guard_and(cur))
    return left


def _parse_guard_and(cur: TokenCursor) -> Guard:
    left = _parse_guard_unary(cur)
    while cur.eat_sym("&&"):
        left = GuardAnd(left, _parse_guard_unary(cur))
    return left


def _parse_guard_unary(cur: TokenCursor) -> Guard:
    if cur.eat_sym("!"):
        return GuardNot(_parse_guard_unary(cur))
    if cur.eat_sym("("):
        inner = _parse_guard(cur)
        cur.expect_sym(")")
        return inner
    tok = cur.expect_ident("a guard term")
    if tok.text == "true":
        return GuardLit(True)
    if tok.text == "false":
        return GuardLit(False)
    if cur.at_sym("==") or cur.at_sym("!="):
        op = cur.advance().text
        value = cur.expect_ident("a value").text
        return GuardCmp(tok.text, op, value)
    return GuardVar(tok.text)


def _resolve(name, raw_vars, raw_nodes, raw_edges) -> ActivityDiagram:
    problems: list[Diagnostic] = []

    variables: list[VarDecl] = []
    var_table: dict[str, VarDecl] = {}
    for name_tok, kind, domain, initial_tok in raw_vars:
        pos = (name_tok.line, name_tok.col)
        if name_tok.text in var_table:
            problems.append(Diagnostic(*pos, f"duplicate variable '{name_tok.text}'"))
            continue
        if len(set(domain)) != len(domain):
            problems.append(Diagnostic(*pos, f"domain of '{name_tok.text}' repeats a value"))
        if domain != BOOL_DOMAIN and ("true" in domain or "false" in domain):
            problems.append(Diagnostic(
                *pos, f"domain of '{name_tok.text}' may not use the reserved values true/false"))
        initial = None
        if kind is VarKind.INPUT:
            if initial_tok is not None:
                problems.append(Diagnostic(
                    initial_tok.line, initial_tok.col,
                    f"input variable '{name_tok.text}' takes its value from the"
                    " environment and cannot be initialized"))
        else:
            # A local without an explicit initializer starts at the first
            # domain value (false for bool).
            initial = domain[0]
            if initial_tok is not None:
                if initial_tok.text not in domain:
                    problems.append(Diagnostic(
                        initial_tok.line, initial_tok.col,
                        f"initial value '{initial_tok.text}' is outside the domain"
                        f" of '{name_tok.text}'"))
                else:
                    initial = initial_tok.text
        decl = VarDecl(name_tok.text, kind, domain, initial, pos)
        variables.append(decl)
        var_table[decl.name] = decl

    nodes: list[Node] = []
    node_table: dict[str, Node] = {}
    for kind, name_tok, raw_assigns in raw_nodes:
        pos = (name_tok.line, name_tok.col)
        if name_tok.text in (START, END):
            problems.append(Diagnostic(*pos, f"'{name_tok.text}' is reserved and cannot be declared"))
            continue
        if name_tok.text in node_table:
            problems.append(Diagnostic(*pos, f"duplicate node name '{name_tok.text}'"))
            continue
        assigns = []
        for target_tok, source_tok in raw_assigns:
            assign = _resolve_assign(target_tok, source_tok, var_table, problems)
            if assign is not None:
                assigns.append(assign)
        node = Node(name_tok.text, kind, tuple(assigns), pos)
        nodes.append(node)
        node_table[node.name] = node

    edges: list[Edge] = []
    for src_tok, guard, dst_tok in raw_edges:
        pos = (src_tok.line, src_tok.col)
        for tok in (src_tok, dst_tok):
            if tok.text not in node_table and tok.text not in (START, END):
                problems.append(Diagnostic(tok.line, tok.col, f"unknown node '{tok.text}'"))
        for tok in (src_tok, dst_tok):
            if tok.text in (START, END) and tok.text not in node_table:
                kind = NodeKind.INITIAL if tok.text == START else NodeKind.FINAL
                node = Node(tok.text, kind, (), (tok.line, tok.col))
                nodes.append(node)
                node_table[tok.text] = node
        if guard is not None:
            _check_guard(guard, var_table, pos, problems)
        edges.append(Edge(src_tok.text, dst_tok.text, guard, pos))

    problems.extend(_check_structure(node_table, edges))
    if problems:
        raise ParseError(problems)
    return ActivityDiagram(name, tuple(variables), tuple(nodes), tuple(edges))


def _resolve_assign(target_tok, source_tok, var_table, problems) -> Assign | None:
    target = var_table.get(target_tok.text)
    if target is None:
        problems.append(Diagnostic(
            target_tok.line, target_tok.col,
            f"assignment to undeclared variable '{target_tok.text}'"))
        return None
    source = source_tok.text
    # A name that matches a declared variable is a variable read; anything
    # else must be a literal value of the target's domain.
    if source in var_table:
        if var_table[source].domain != target.domain:
            problems.append(Diagnostic(
                source_tok.line, source_tok.col,
                f"cannot assign '{source}' to '{target.name}': domains differ"))
            return None
        return Assign(target.name, source, source_is_var=True)
    if source not in target.domain:
        problems.append(Diagnostic(
            source_tok.line, source_tok.col,
            f"value '{source}' is outside the domain of '{target.name}'"))
        return None
    return Assign(target.name, source, source_is_var=False)


def _check_guard(guard: Guard, var_table, pos, problems) -> None:
    if isinstance(guard, GuardLit):
        return
    if isinstance(guard, GuardVar):
        decl = var_table.get(guard.var)
        if decl is None:
            problems.append(Diagnostic(*pos, f"guard references undeclared variable '{guard.var}'"))
        elif not decl.is_bool():
            problems.append(Diagnostic(
                *pos, f"guard uses non-bool variable '{guard.var}' as a condition"))
        return
    if isinstance(guard, GuardCmp):
        decl = var_table.get(guard.var)
        if decl is None:
            problems.append(Diagnostic(*pos, f"guard references undeclared variable '{guard.var}'"))
        elif guard.value not in decl.domain:
            problems.append(Diagnostic(
                *pos, f"guard compares '{guard.var}' with '{guard.value}',"
                      f" which is outside its domain"))
        return
    if isinstance(guard, GuardNot):
        _check_guard(guard.inner, var_table, pos, problems)
        return
    if isinstance(guard, (GuardAnd, GuardOr)):
        _check_guard(guard.left, var_table, pos, problems)
        _check_guard(guard.right, var_table, pos, problems)


def _check_structure(node_table: dict[str, Node], edges: list[Edge]) -> list[Diagnostic]:
    problems: list[Diagnostic] = []
    known_edges = [e for e in edges
                   if e.src in node_table and e.dst in node_table]
    outgoing: dict[str, list[Edge]] = {n: [] for n in node_table}
    incoming: dict[str, list[Edge]] = {n: [] for n in node_table}
    for e in known_edges:
        outgoing[e.src].append(e)
        incoming[e.dst].append(e)

    for e in known_edges:
        if e.guard is not None and node_table[e.src].kind is not NodeKind.DECISION:
            problems.append(Diagnostic(
                *e.pos, f"guard on an edge leaving non-decision node '{e.src}'"))

    if START not in node_table:
        problems.append(Diagnostic(1, 1, "no initial node: nothing connects to 'start'"))
    finals = [n for n in node_table.values() if n.kind is NodeKind.FINAL]
    if not finals:
        problems.append(Diagnostic(1, 1, "no final node: nothing reaches 'end' and no 'final' is declared"))

    for node in node_table.values():
        n_in = len(incoming[node.name])
        n_out = len(outgoing[node.name])
        kind = node.kind
        where = node.pos if node.pos != (0, 0) else (1, 1)
        if kind is NodeKind.INITIAL:
            if n_in != 0:
                problems.append(Diagnostic(*where, "'start' cannot have incoming edges"))
            if n_out != 1:
                problems.append(Diagnostic(*where, f"'start' must have exactly one outgoing edge, found {n_out}"))
        elif kind is NodeKind.FINAL:
            if n_out != 0:
                problems.append(Diagnostic(*where, f"final node '{node.name}' cannot have outgoing edges"))
            if n_in < 1:
                problems.append(Diagnostic(*where, f"final node '{node.name}' is never reached by an edge"))
        elif kind in (NodeKind.ACTION, NodeKind.MERGE):
            if n_out != 1:
                problems.append(Diagnostic(
                    *where, f"{kind.value} node '{node.name}' must have exactly one outgoing edge, found {n_out}"))
        elif kind is NodeKind.DECISION:
            if n_in != 1:
                problems.append(Diagnostic(
                    *where, f"decision node '{node.name}' must have exactly one incoming edge, found {n_in}"))
            if n_out < 2:
                problems.append(Diagnostic(
                    *where, f"decision node '{node.name}' needs at least two outgoing edges, found {n_out}"))
            for e in outgoing[node.name]:
                if e.guard is None:
                    problems.append(Diagnostic(*e.pos, f"unguarded edge leaving decision node '{node.name}'"))
        elif kind is NodeKind.FORK:
            if n_in != 1:
                problems.append(Diagnostic(
                    *where, f"fork node '{node.name}' must have exactly one incoming edge, found {n_in}"))
            if n_out < 2:
                problems.append(Diagnostic(
                    *where, f"fork node '{node.name}' needs at least two outgoing edges, found {n_out}"))
        elif kind is NodeKind.JOIN:
            if n_in < 2:
                problems.append(Diagnostic(
                    *where, f"join node '{node.name}' needs at least two incoming edges, found {n_in}"))
            if n_out != 1:
                problems.append(Diagnostic(
                    *where, f"join node '{node.name}' must have exactly one outgoing edge, found {n_out}"))

    if START in node_table:
        reached = {START}
        frontier = [START]
        while frontier:
            cur = frontier.pop()
            for e in outgoing[cur]:
                if e.dst not in reached:
                    reached.add(e.dst)
                    frontier.append(e.dst)
        for name in sorted(node_table):
            if name not in reached:
                node = node_table[name]
                where = node.pos if node.pos != (0, 0) else (1, 1)
                problems.append(Diagnostic(*where, f"node '{name}' is unreachable from 'start'"))
    return problems


def print_ad(ad: ActivityDiagram) -> str:
    """Serialize back to source text: variables, then nodes, then edges."""
    lines = [f"activity {ad.name} {{"]
    for v in ad.variables:
        dom = "bool" if v.is_bool() else "{" + ", ".join(v.domain) + "}"
        init = f" = {v.initial}" if v.kind is VarKind.LOCAL else ""
        lines.append(f"  {v.kind.value} {v.name}: {dom}{init};")
    for n in ad.nodes:
        if n.kind in (NodeKind.INITIAL, NodeKind.FINAL):
            if n.kind is NodeKind.FINAL and n.name != END:
                lines.append(f"  final {n.name};")
            continue
        suffix = ""
        if n.assignments:
            parts = ", ".join(f"{a.target} := {a.source}" for a in n.assignments)
            suffix = f" / {parts}"
        lines.append(f"  {n.kind.value} {n.name}{suffix};")
    for e in ad.edges:
        arrow = "->" if e.guard is None else f"-[{print_guard(e.guard)}]->"
        lines.append(f"  {e.src} {arrow} {e.dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"
