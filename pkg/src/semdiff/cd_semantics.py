"""Object models and the bounded semantics of class diagrams.

An object model is a set of typed, named objects plus directed links. It
counts as an instance of a diagram when every object's class is declared and
concrete, singleton counts hold, link ends respect the subclass closures of
the association ends, and link counts stay inside the multiplicities.

Object models live over a joint universe (the class and association names of
the diagrams under comparison), so an object of a class one diagram does not
declare simply falls outside that diagram's semantics.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Iterator

from .cd_lang import ClassDiagram, ClassModifier, closure_of, _closure_map
from .lexer import EOF, IDENT, Diagnostic, ParseError, TokenCursor, tokenize

Link = tuple[str, str, str]  # (association, source object, target object)


@dataclass
class ObjectModel:
    name: str
    objects: dict[str, str]  # object id -> class name
    links: frozenset[Link]


class ViolationKind(Enum):
    UNKNOWN_CLASS = "UNKNOWN_CLASS"
    ABSTRACT_INSTANTIATED = "ABSTRACT_INSTANTIATED"
    SINGLETON_COUNT = "SINGLETON_COUNT"
    UNKNOWN_ASSOCIATION = "UNKNOWN_ASSOCIATION"
    BAD_ENDPOINT = "BAD_ENDPOINT"
    MULTIPLICITY = "MULTIPLICITY"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.detail}"


def parse_om(text: str) -> ObjectModel:
    """Parse object-model text; raises ParseError on bad syntax or references."""
    cur = TokenCursor(tokenize(text))
    cur.expect_keyword("objectmodel")
    name = cur.expect_ident("an object model name").text
    cur.expect_sym("{")
    objects: dict[str, str] = {}
    links: list[tuple[Link, tuple[int, int]]] = []
    problems: list[Diagnostic] = []
    while not cur.at_sym("}"):
        if cur.peek().kind == EOF:
            cur.fail("expected '}', found end of input")
        tok = cur.peek()
        if tok.text == "link" and cur.peek(1).kind == IDENT:
            cur.advance()
            assoc = cur.expect_ident("an association name").text
            src = cur.expect_ident("an object id").text
            cur.expect_sym("--")
            dst = cur.expect_ident("an object id").text
            cur.expect_sym(";")
            links.append(((assoc, src, dst), (tok.line, tok.col)))
        else:
            oid = cur.expect_ident("an object id").text
            cur.expect_sym(":")
            cls = cur.expect_ident("a class name").text
            cur.expect_sym(";")
            if oid in objects:
                problems.append(Diagnostic(tok.line, tok.col, f"duplicate object id '{oid}'"))
            objects[oid] = cls
    cur.expect_sym("}")
    cur.expect_eof()
    for (assoc, src, dst), pos in links:
        for end in (src, dst):
            if end not in objects:
                problems.append(Diagnostic(pos[0], pos[1], f"link references unknown object '{end}'"))
    if problems:
        raise ParseError(problems)
    return ObjectModel(name, objects, frozenset(link for link, _ in links))


def print_om(om: ObjectModel) -> str:
    """Canonical text: objects sorted by id, links sorted by (assoc, src, dst)."""
    lines = [f"objectmodel {om.name} {{"]
    for oid in sorted(om.objects):
        lines.append(f"  {oid}: {om.objects[oid]};")
    for assoc, src, dst in sorted(om.links):
        lines.append(f"  link {assoc} {src} -- {dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def is_instance(om: ObjectModel, cd: ClassDiagram) -> tuple[bool, list[Violation]]:
    """Check membership of ``om`` in the semantics of ``cd``.

    Returns (ok, violations) where the violation list is exhaustive and
    deterministic, not just the first problem found.
    """
    violations: list[Violation] = []
    modifiers = {c.name: c.modifier for c in cd.classes}
    closures = _closure_map(cd)

    for oid in sorted(om.objects):
        cls = om.objects[oid]
        mod = modifiers.get(cls)
        if mod is None:
            violations.append(Violation(
                ViolationKind.UNKNOWN_CLASS, oid,
                f"object '{oid}' has class '{cls}' not declared in '{cd.name}'"))
        elif mod is ClassModifier.ABSTRACT:
            violations.append(Violation(
                ViolationKind.ABSTRACT_INSTANTIATED, oid,
                f"object '{oid}' instantiates abstract class '{cls}'"))

    class_counts = Counter(om.objects.values())
    for decl in cd.classes:
        if decl.modifier is not ClassModifier.SINGLETON:
            continue
        n = sum(class_counts[c] for c in closures[decl.name])
        if n != 1:
            violations.append(Violation(
                ViolationKind.SINGLETON_COUNT, decl.name,
                f"singleton class '{decl.name}' has {n} instances, expected exactly 1"))

    assocs = {a.name: a for a in cd.associations}
    for assoc, src, dst in sorted(om.links):
        a = assocs.get(assoc)
        if a is None:
            violations.append(Violation(
                ViolationKind.UNKNOWN_ASSOCIATION, assoc,
                f"link uses association '{assoc}' not declared in '{cd.name}'"))
            continue
        if om.objects[src] not in closures.get(a.left_class, frozenset()):
            violations.append(Violation(
                ViolationKind.BAD_ENDPOINT, src,
                f"'{src}' is not a '{a.left_class}' (or subclass), required at the"
                f" left end of '{assoc}'"))
        if om.objects[dst] not in closures.get(a.right_class, frozenset()):
            violations.append(Violation(
                ViolationKind.BAD_ENDPOINT, dst,
                f"'{dst}' is not a '{a.right_class}' (or subclass), required at the"
                f" right end of '{assoc}'"))

    out_counts = Counter((assoc, src) for assoc, src, _ in om.links)
    in_counts = Counter((assoc, dst) for assoc, _, dst in om.links)
    for a in sorted(cd.associations, key=lambda x: x.name):
        left_members = closures.get(a.left_class, frozenset())
        right_members = closures.get(a.right_class, frozenset())
        for oid in sorted(om.objects):
            cls = om.objects[oid]
            if cls in left_members:
                n = out_counts[(a.name, oid)]
                if not a.right_mult.admits(n):
                    violations.append(Violation(
                        ViolationKind.MULTIPLICITY, oid,
                        f"'{oid}' has {n} outgoing '{a.name}' links,"
                        f" allowed {a.right_mult}"))
            if cls in right_members:
                n = in_counts[(a.name, oid)]
                if not a.left_mult.admits(n):
                    violations.append(Violation(
                        ViolationKind.MULTIPLICITY, oid,
                        f"'{oid}' has {n} incoming '{a.name}' links,"
                        f" allowed {a.left_mult}"))

    return (not violations, violations)


@dataclass(frozen=True)
class Universe:
    """The joint vocabulary two diagrams are compared over.

    ``associations`` maps each association name to every endpoint declaration
    it has across the diagrams (the same name may connect different classes in
    different versions). Modifiers and multiplicities stay with each diagram;
    membership is always judged per diagram by is_instance.
    """

    classes: tuple[str, ...]
    extends: tuple[tuple[str, str], ...]
    associations: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]


def universe_of(*cds: ClassDiagram) -> Universe:
    classes: set[str] = set()
    extends: set[tuple[str, str]] = set()
    assoc_ends: dict[str, set[tuple[str, str]]] = {}
    for cd in cds:
        classes.update(c.name for c in cd.classes)
        extends.update(cd.extends)
        for a in cd.associations:
            assoc_ends.setdefault(a.name, set()).add((a.left_class, a.right_class))
    assocs = tuple(
        (name, tuple(sorted(assoc_ends[name]))) for name in sorted(assoc_ends)
    )
    return Universe(tuple(sorted(classes)), tuple(sorted(extends)), assocs)


def object_id_prefixes(classes: tuple[str, ...]) -> dict[str, str]:
    """Lowercased class names as object-id stems, falling back to the raw name
    when two classes collide case-insensitively."""
    lowered = Counter(c.lower() for c in classes)
    return {c: (c.lower() if lowered[c.lower()] == 1 else c) for c in classes}


@lru_cache(maxsize=None)
def _universe_closures(universe: Universe) -> dict[str, frozenset[str]]:
    return {c: closure_of(universe.extends, c) for c in universe.classes}


def compatible_pairs(universe: Universe, objects: dict[str, str]) -> list[Link]:
    """All links the universe can justify over the given objects, sorted.

    A pair fits an association if some declaration of that name covers both
    ends through the joint subclass closure.
    """
    closures = _universe_closures(universe)
    by_class: dict[str, list[str]] = {}
    for oid in sorted(objects):
        by_class.setdefault(objects[oid], []).append(oid)
    pairs: set[Link] = set()
    for name, decls in universe.associations:
        for left, right in decls:
            sources = [o for c in closures.get(left, frozenset()) for o in by_class.get(c, ())]
            targets = [o for c in closures.get(right, frozenset()) for o in by_class.get(c, ())]
            for s in sources:
                for t in targets:
                    pairs.add((name, s, t))
    return sorted(pairs)


def _count_vectors(caps: list[int], total: int) -> Iterator[tuple[int, ...]]:
    """All count tuples bounded by ``caps`` that sum to ``total``."""
    def rec(i: int, remaining: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
        if i == len(caps):
            if remaining == 0:
                yield tuple(acc)
            return
        if remaining > sum(caps[i:]):
            return
        for n in range(min(caps[i], remaining) + 1):
            acc.append(n)
            yield from rec(i + 1, remaining - n, acc)
            acc.pop()

    yield from rec(0, total, [])


def objects_for_counts(
    classes: tuple[str, ...], prefixes: dict[str, str], counts: tuple[int, ...]
) -> dict[str, str]:
    objects: dict[str, str] = {}
    for cls, n in zip(classes, counts):
        for i in range(1, n + 1):
            objects[f"{prefixes[cls]}{i}"] = cls
    return objects


def enumerate_object_models(universe: Universe, k: int, name: str = "om") -> Iterator[ObjectModel]:
    """Brute-force stream of every labeled object model within the bound.

    Each class contributes at most ``k`` objects named stem1..stemj (so the
    labeling is canonical), and links range over every subset of the pairs the
    universe can justify. Models arrive sorted by total object count and then
    by their canonical text. Complete up to isomorphism; isomorphic duplicates
    with distinct labelings do occur and are intentional.
    """
    if k < 0:
        raise ValueError("bound k must be >= 0")
    prefixes = object_id_prefixes(universe.classes)
    caps = [k] * len(universe.classes)
    for total in range(sum(caps) + 1):
        level: list[tuple[str, ObjectModel]] = []
        for counts in _count_vectors(caps, total):
            objects = objects_for_counts(universe.classes, prefixes, counts)
            pairs = compatible_pairs(universe, objects)
            for r in range(len(pairs) + 1):
                for chosen in combinations(pairs, r):
                    om = ObjectModel(name, dict(objects), frozenset(chosen))
                    level.append((print_om(om), om))
        level.sort(key=lambda item: item[0])
        for _, om in level:
            yield om
