"""Bounded semantic differencing of class diagrams.

The diff of two diagrams is the set of object models that instantiate the
first but not the second. The search is exhaustive up to a per-class instance
bound k: it walks canonical labeled models in the same order as the
brute-force enumerator, but only ever materializes candidates that already
satisfy the first diagram, so multiplicity caps prune the link space early.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .cd_lang import Association, ClassDiagram, ClassModifier, _closure_map
from .cd_semantics import (
    ObjectModel,
    Universe,
    is_instance,
    object_id_prefixes,
    objects_for_counts,
    print_om,
    universe_of,
    _count_vectors,
)

DEFAULT_BOUND = 3
DEFAULT_MAX_WITNESSES = 10


class VerdictValue(Enum):
    EQUIVALENT = "EQUIVALENT"
    LEFT_REFINES_RIGHT = "LEFT_REFINES_RIGHT"
    RIGHT_REFINES_LEFT = "RIGHT_REFINES_LEFT"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class Verdict:
    """Four-valued comparison outcome; ``bounded`` records whether it only
    holds up to a search bound (class diagrams) or exactly (activity
    diagrams)."""

    value: VerdictValue
    bounded: bool

    def __str__(self) -> str:
        return self.value.value


@dataclass
class CdDiffResult:
    witnesses: list[ObjectModel]
    exhausted: bool
    bound: int
    requested: int


def cddiff(
    cd1: ClassDiagram,
    cd2: ClassDiagram,
    k: int = DEFAULT_BOUND,
    max_witnesses: int = DEFAULT_MAX_WITNESSES,
) -> CdDiffResult:
    """Object models instantiating ``cd1`` but not ``cd2``, up to bound ``k``.

    Witnesses come back sorted by total object count, then canonical text,
    truncated at ``max_witnesses``. ``exhausted`` is only true when every
    canonical model within the bound was covered and nothing was cut off.
    """
    if k < 0:
        raise ValueError("bound k must be >= 0")
    if max_witnesses < 1:
        raise ValueError("max_witnesses must be >= 1")
    universe = universe_of(cd1, cd2)
    witnesses: list[ObjectModel] = []
    exhausted = True
    levels = _witness_levels(cd1, cd2, universe, k)
    for total, max_total, level in levels:
        witnesses.extend(level)
        if len(witnesses) >= max_witnesses and total < max_total:
            exhausted = False
            break
    if len(witnesses) > max_witnesses:
        witnesses = witnesses[:max_witnesses]
        exhausted = False
    for w in witnesses:
        ok1, _ = is_instance(w, cd1)
        ok2, _ = is_instance(w, cd2)
        if not ok1 or ok2:
            raise RuntimeError(f"diff search produced an unsound witness:\n{print_om(w)}")
    return CdDiffResult(witnesses, exhausted, k, max_witnesses)


def compare_cd(cd1: ClassDiagram, cd2: ClassDiagram, k: int = DEFAULT_BOUND) -> Verdict:
    """Relate two diagrams up to bound k by probing both diff directions."""
    forward = cddiff(cd1, cd2, k, 1).witnesses
    backward = cddiff(cd2, cd1, k, 1).witnesses
    return Verdict(_verdict_value(bool(forward), bool(backward)), bounded=True)


def _verdict_value(forward_nonempty: bool, backward_nonempty: bool) -> VerdictValue:
    if not forward_nonempty and not backward_nonempty:
        return VerdictValue.EQUIVALENT
    if not forward_nonempty:
        return VerdictValue.LEFT_REFINES_RIGHT
    if not backward_nonempty:
        return VerdictValue.RIGHT_REFINES_LEFT
    return VerdictValue.INCOMPARABLE


def _witness_levels(
    cd1: ClassDiagram, cd2: ClassDiagram, universe: Universe, k: int
) -> Iterator[tuple[int, int, list[ObjectModel]]]:
    """Yield (total, max_total, witnesses-at-total) in enumeration order."""
    prefixes = object_id_prefixes(universe.classes)
    decl1 = {c.name: c for c in cd1.classes}
    caps = [
        0 if decl1.get(c) is None or decl1[c].modifier is ClassModifier.ABSTRACT else k
        for c in universe.classes
    ]
    max_total = sum(caps)
    closures1 = _closure_map(cd1)
    assocs1 = sorted(cd1.associations, key=lambda a: a.name)
    for total in range(max_total + 1):
        level: list[tuple[str, ObjectModel]] = []
        for counts in _count_vectors(caps, total):
            objects = objects_for_counts(universe.classes, prefixes, counts)
            if not _object_level_ok(objects, cd1):
                continue
            # Once the object population alone rules out cd2, every link
            # configuration valid for cd1 is a witness; otherwise the full
            # checker decides per configuration.
            counts_rule_out_cd2 = not _object_level_ok(objects, cd2)
            choice_lists = []
            feasible = True
            for a in assocs1:
                choices = _assoc_link_sets(a, objects, closures1)
                if not choices:
                    feasible = False
                    break
                choice_lists.append(choices)
            if not feasible:
                continue
            for links in _combine(choice_lists):
                om = ObjectModel("om", dict(objects), links)
                if counts_rule_out_cd2 or not is_instance(om, cd2)[0]:
                    level.append((print_om(om), om))
        level.sort(key=lambda item: item[0])
        yield total, max_total, [om for _, om in level]


def _object_level_ok(objects: dict[str, str], cd: ClassDiagram) -> bool:
    """Object-population checks only: declared, concrete, singleton counts."""
    modifiers = {c.name: c.modifier for c in cd.classes}
    closures = _closure_map(cd)
    for cls in objects.values():
        mod = modifiers.get(cls)
        if mod is None or mod is ClassModifier.ABSTRACT:
            return False
    for decl in cd.classes:
        if decl.modifier is ClassModifier.SINGLETON:
            n = sum(1 for cls in objects.values() if cls in closures[decl.name])
            if n != 1:
                return False
    return True


def _assoc_link_sets(
    a: Association, objects: dict[str, str], closures: dict[str, frozenset[str]]
) -> list[tuple[tuple[str, str, str], ...]]:
    """Every link set for one association that satisfies the owning diagram.

    Sources and targets are the objects inside the end closures; out-counts
    must land in the right-end multiplicity and in-counts in the left-end one.
    Upper bounds prune during generation, lower bounds filter at the leaves.
    """
    left_members = closures.get(a.left_class, frozenset())
    right_members = closures.get(a.right_class, frozenset())
    sources = sorted(o for o, c in objects.items() if c in left_members)
    targets = sorted(o for o, c in objects.items() if c in right_members)
    pairs = [(s, t) for s in sources for t in targets]
    out_max = a.right_mult.max
    in_max = a.left_mult.max
    out_counts = {s: 0 for s in sources}
    in_counts = {t: 0 for t in targets}
    results: list[tuple[tuple[str, str, str], ...]] = []

    def rec(i: int, chosen: list[tuple[str, str, str]]) -> None:
        if i == len(pairs):
            if all(a.right_mult.admits(out_counts[s]) for s in sources) and all(
                a.left_mult.admits(in_counts[t]) for t in targets
            ):
                results.append(tuple(chosen))
            return
        s, t = pairs[i]
        rec(i + 1, chosen)
        if (out_max is None or out_counts[s] < out_max) and (
            in_max is None or in_counts[t] < in_max
        ):
            out_counts[s] += 1
            in_counts[t] += 1
            chosen.append((a.name, s, t))
            rec(i + 1, chosen)
            chosen.pop()
            out_counts[s] -= 1
            in_counts[t] -= 1

    rec(0, [])
    return results


def _combine(choice_lists: list[list[tuple[tuple[str, str, str], ...]]]) -> Iterator[frozenset]:
    if not choice_lists:
        yield frozenset()
        return

    def rec(i: int, acc: list) -> Iterator[frozenset]:
        if i == len(choice_lists):
            yield frozenset(acc)
            return
        for links in choice_lists[i]:
            yield from rec(i + 1, acc + list(links))

    yield from rec(0, [])
