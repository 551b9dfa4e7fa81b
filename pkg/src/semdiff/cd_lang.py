"""Textual class-diagram language: syntax tree, parser, printer, well-formedness.

A diagram declares plain, abstract, or singleton classes, single inheritance
via ``extends``, and named binary associations whose ends carry multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .lexer import EOF, Diagnostic, ParseError, TokenCursor, tokenize

UNBOUNDED = None


class ClassModifier(Enum):
    CONCRETE = "concrete"
    ABSTRACT = "abstract"
    SINGLETON = "singleton"


@dataclass(frozen=True)
class Multiplicity:
    """An inclusive instance-count range; ``max=None`` means unbounded."""

    min: int
    max: int | None

    def admits(self, n: int) -> bool:
        return self.min <= n and (self.max is None or n <= self.max)

    def __str__(self) -> str:
        if self.min == 0 and self.max is None:
            return "*"
        if self.max is None:
            return f"{self.min}..*"
        if self.min == self.max:
            return str(self.min)
        return f"{self.min}..{self.max}"


MANY = Multiplicity(0, UNBOUNDED)


@dataclass(frozen=True)
class ClassDecl:
    name: str
    modifier: ClassModifier = ClassModifier.CONCRETE
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Association:
    """``association name [left_mult] left -- right [right_mult];``

    The multiplicity written at one end bounds how many objects of that end
    each object of the opposite end may link to.
    """

    name: str
    left_class: str
    left_mult: Multiplicity
    right_class: str
    right_mult: Multiplicity
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ClassDiagram:
    name: str
    classes: tuple[ClassDecl, ...]
    extends: tuple[tuple[str, str], ...]  # (child, parent) pairs
    associations: tuple[Association, ...]

    def class_names(self) -> frozenset[str]:
        return frozenset(c.name for c in self.classes)


def parse_cd(text: str) -> ClassDiagram:
    """Parse and validate class-diagram text.

    Raises ParseError with positioned diagnostics on the first syntax error
    or on any collection of validation problems.
    """
    cur = TokenCursor(tokenize(text))
    cur.expect_keyword("classdiagram")
    name = cur.expect_ident("a diagram name").text
    cur.expect_sym("{")
    classes: list[ClassDecl] = []
    extends: list[tuple[str, str]] = []
    extend_pos: dict[str, tuple[int, int]] = {}
    associations: list[Association] = []
    while not cur.at_sym("}"):
        if cur.peek().kind == EOF:
            cur.fail("expected '}', found end of input")
        if cur.at_ident("association"):
            associations.append(_parse_assoc(cur))
        else:
            decl, parent = _parse_classdecl(cur)
            classes.append(decl)
            if parent is not None:
                extends.append((decl.name, parent))
                extend_pos[decl.name] = decl.pos
    cur.expect_sym("}")
    cur.expect_eof()
    cd = ClassDiagram(name, tuple(classes), tuple(extends), tuple(associations))
    problems = _validate(cd, extend_pos)
    if problems:
        raise ParseError(problems)
    return cd


def _parse_classdecl(cur: TokenCursor) -> tuple[ClassDecl, str | None]:
    tok = cur.peek()
    modifier = ClassModifier.CONCRETE
    if cur.eat_ident("abstract"):
        modifier = ClassModifier.ABSTRACT
    elif cur.eat_ident("singleton"):
        modifier = ClassModifier.SINGLETON
    cur.expect_keyword("class")
    name = cur.expect_ident("a class name").text
    parent = None
    if cur.eat_ident("extends"):
        parent = cur.expect_ident("a parent class name").text
    cur.expect_sym(";")
    return ClassDecl(name, modifier, (tok.line, tok.col)), parent


def _parse_assoc(cur: TokenCursor) -> Association:
    tok = cur.expect_keyword("association")
    name = cur.expect_ident("an association name").text
    left_mult = _parse_mult(cur)
    left = cur.expect_ident("a class name").text
    cur.expect_sym("--")
    right = cur.expect_ident("a class name").text
    right_mult = _parse_mult(cur)
    cur.expect_sym(";")
    return Association(name, left, left_mult, right, right_mult, (tok.line, tok.col))


def _parse_mult(cur: TokenCursor) -> Multiplicity:
    # An omitted multiplicity reads as "*".
    if not cur.eat_sym("["):
        return MANY
    if cur.eat_sym("*"):
        cur.expect_sym("]")
        return MANY
    lo, lo_tok = cur.expect_nat()
    if not cur.eat_sym(".."):
        cur.expect_sym("]")
        return Multiplicity(lo, lo)
    if cur.eat_sym("*"):
        cur.expect_sym("]")
        return Multiplicity(lo, UNBOUNDED)
    hi, _ = cur.expect_nat()
    cur.expect_sym("]")
    if lo > hi:
        cur.fail(f"multiplicity {lo}..{hi} has min > max", lo_tok)
    return Multiplicity(lo, hi)


def _validate(cd: ClassDiagram, extend_pos: dict[str, tuple[int, int]]) -> list[Diagnostic]:
    problems: list[Diagnostic] = []
    seen: dict[str, ClassDecl] = {}
    for decl in cd.classes:
        if decl.name in seen:
            problems.append(_diag(decl.pos, f"duplicate class name '{decl.name}'"))
        else:
            seen[decl.name] = decl
    declared = set(seen)
    for child, parent in cd.extends:
        if parent not in declared:
            pos = extend_pos.get(child, (0, 0))
            problems.append(_diag(pos, f"'{child}' extends unknown class '{parent}'"))
    assoc_seen: set[str] = set()
    for a in cd.associations:
        if a.name in assoc_seen:
            problems.append(_diag(a.pos, f"duplicate association name '{a.name}'"))
        assoc_seen.add(a.name)
        for end in (a.left_class, a.right_class):
            if end not in declared:
                problems.append(_diag(a.pos, f"association '{a.name}' references unknown class '{end}'"))
    parents = dict(cd.extends)
    for name in sorted(declared):
        hop = parents.get(name)
        seen_chain = {name}
        while hop is not None:
            if hop == name:
                pos = extend_pos.get(name, seen[name].pos)
                problems.append(_diag(pos, f"inheritance cycle through '{name}'"))
                break
            if hop in seen_chain:
                break
            seen_chain.add(hop)
            hop = parents.get(hop)
    return problems


def _diag(pos: tuple[int, int], message: str) -> Diagnostic:
    return Diagnostic(pos[0], pos[1], message)


def print_cd(cd: ClassDiagram) -> str:
    """Serialize a diagram back to its textual form (multiplicities explicit)."""
    parents: dict[str, list[str]] = {}
    for child, parent in cd.extends:
        parents.setdefault(child, []).append(parent)
    lines = [f"classdiagram {cd.name} {{"]
    for decl in cd.classes:
        prefix = ""
        if decl.modifier is ClassModifier.ABSTRACT:
            prefix = "abstract "
        elif decl.modifier is ClassModifier.SINGLETON:
            prefix = "singleton "
        sup = parents.get(decl.name, [])
        if len(sup) > 1:
            raise ValueError(f"class '{decl.name}' has multiple parents; not printable")
        ext = f" extends {sup[0]}" if sup else ""
        lines.append(f"  {prefix}class {decl.name}{ext};")
    for a in cd.associations:
        lines.append(
            f"  association {a.name} [{a.left_mult}] {a.left_class}"
            f" -- {a.right_class} [{a.right_mult}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def closure_of(extends: tuple[tuple[str, str], ...], root: str) -> frozenset[str]:
    """Reflexive-transitive subclass closure of ``root`` under an extends relation."""
    children: dict[str, list[str]] = {}
    for child, parent in extends:
        children.setdefault(parent, []).append(child)
    out = {root}
    todo = [root]
    while todo:
        cur = todo.pop()
        for ch in children.get(cur, ()):
            if ch not in out:
                out.add(ch)
                todo.append(ch)
    return frozenset(out)


@lru_cache(maxsize=None)
def _closure_map(cd: ClassDiagram) -> dict[str, frozenset[str]]:
    return {c.name: closure_of(cd.extends, c.name) for c in cd.classes}


def subtype_set(cd: ClassDiagram, class_name: str) -> frozenset[str]:
    """All declared classes that are ``class_name`` or transitively extend it."""
    closures = _closure_map(cd)
    if class_name not in closures:
        raise ValueError(f"unknown class '{class_name}' in diagram '{cd.name}'")
    return closures[class_name]
