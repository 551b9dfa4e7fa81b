"""Semantic differencing of activity diagrams.

For each input valuation the two diagrams compile to finite NFAs; the second
is determinized over the union alphabet, completed, and complemented, and its
product with the first accepts exactly the traces possible in the first
diagram but not the second. A breadth-first walk of that product yields the
shortest such traces, keeping only prefix-minimal ones. Unlike the bounded
class-diagram search this is exact: the state spaces are finite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .ad_lang import ActivityDiagram
from .ad_semantics import (
    EPSILON,
    Nfa,
    NfaRunner,
    Trace,
    accepts,
    build_config_nfa,
    input_valuations,
)
from .cd_diff import Verdict, _verdict_value

DEFAULT_MAX_WITNESSES = 10


@dataclass(frozen=True)
class Dfa:
    """A complete deterministic automaton.

    ``transitions[state][i]`` is the successor on ``alphabet[i]``; the table
    must be total and there are no silent moves by construction.
    """

    alphabet: tuple[str, ...]
    transitions: tuple[tuple[int, ...], ...]
    initial: int
    accepting: frozenset[int]

    def __post_init__(self):
        for row in self.transitions:
            if len(row) != len(self.alphabet):
                raise ValueError("transition table is not total")

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def complement(self) -> "Dfa":
        flipped = frozenset(range(self.n_states)) - self.accepting
        return Dfa(self.alphabet, self.transitions, self.initial, flipped)

    def accepts_word(self, word) -> bool:
        col = {a: i for i, a in enumerate(self.alphabet)}
        state = self.initial
        for letter in word:
            if letter not in col:
                return False
            state = self.transitions[state][col[letter]]
        return state in self.accepting


def determinize(nfa: Nfa, alphabet: frozenset[str] | None = None) -> Dfa:
    """Subset construction over ``alphabet`` (the NFA's own by default),
    completed with a sink so the result is total."""
    letters = tuple(sorted(alphabet if alphabet is not None else nfa.alphabet))
    runner = NfaRunner(nfa)
    initial = runner.closure({nfa.initial})
    index: dict[frozenset[int], int] = {initial: 0}
    order: list[frozenset[int]] = [initial]
    rows: list[list[int]] = []
    todo = deque([initial])
    while todo:
        states = todo.popleft()
        row = []
        for letter in letters:
            succ = runner.step(states, letter)
            succ_id = index.get(succ)
            if succ_id is None:
                succ_id = len(order)
                index[succ] = succ_id
                order.append(succ)
                todo.append(succ)
            row.append(succ_id)
        rows.append(row)
    accepting = frozenset(i for i, s in enumerate(order) if runner.is_accepting(s))
    return Dfa(letters, tuple(tuple(r) for r in rows), 0, accepting)


def difference_automaton(a: Nfa, b: Nfa) -> Nfa:
    """An NFA accepting L(a) minus L(b) over the union of both alphabets.

    ``b`` is determinized and complemented; ``a`` stays nondeterministic, its
    silent moves advancing only the ``a`` component of the product.
    """
    alphabet = frozenset(a.alphabet | b.alphabet)
    b_comp = determinize(b, alphabet).complement()
    letters = b_comp.alphabet
    col = {letter: i for i, letter in enumerate(letters)}

    a_eps: dict[int, list[int]] = {}
    a_step: dict[tuple[int, str], list[int]] = {}
    for src, label, dst in a.transitions:
        if label is EPSILON:
            a_eps.setdefault(src, []).append(dst)
        else:
            a_step.setdefault((src, label), []).append(dst)

    initial = (a.initial, b_comp.initial)
    index: dict[tuple[int, int], int] = {initial: 0}
    order: list[tuple[int, int]] = [initial]
    transitions: list[tuple[int, str | None, int]] = []
    todo = deque([initial])

    def intern(pair: tuple[int, int]) -> int:
        pid = index.get(pair)
        if pid is None:
            pid = len(order)
            index[pair] = pid
            order.append(pair)
            todo.append(pair)
        return pid

    while todo:
        pair = todo.popleft()
        pid = index[pair]
        qa, qb = pair
        for qa2 in a_eps.get(qa, ()):
            transitions.append((pid, EPSILON, intern((qa2, qb))))
        for letter in letters:
            for qa2 in a_step.get((qa, letter), ()):
                qb2 = b_comp.transitions[qb][col[letter]]
                transitions.append((pid, letter, intern((qa2, qb2))))
    accepting = frozenset(
        i for i, (qa, qb) in enumerate(order)
        if qa in a.accepting and qb in b_comp.accepting
    )
    return Nfa(
        n_states=len(order),
        alphabet=alphabet,
        transitions=tuple(transitions),
        initial=0,
        accepting=accepting,
    )


def prefix_minimal_words(
    nfa: Nfa, max_witnesses: int | None = None, max_len: int | None = None
) -> tuple[list[tuple[str, ...]], bool]:
    """Accepted words none of whose proper prefixes are accepted.

    BFS by length, lexicographic within a length. The walk runs on the
    determinized view of ``nfa``, never extends past an accepting state set
    (which is exactly the prefix-minimality cut), and skips state sets from
    which acceptance is unreachable, so it terminates whenever the language
    of prefix-minimal words is finite. Returns (words, exhausted); exhausted
    is False when the word list was cut off by either limit.
    """
    letters = sorted(nfa.alphabet)
    runner = NfaRunner(nfa)
    initial = runner.closure({nfa.initial})

    # Materialize the reachable determinized graph, trimmed at accepting sets.
    index: dict[frozenset[int], int] = {initial: 0}
    succs: list[list[int]] = []
    accepting: list[bool] = []
    order: list[frozenset[int]] = [initial]
    todo = deque([initial])
    while todo:
        states = todo.popleft()
        acc = runner.is_accepting(states)
        accepting.append(acc)
        row: list[int] = []
        if not acc:
            for letter in letters:
                succ = runner.step(states, letter)
                if not succ:
                    row.append(-1)
                    continue
                succ_id = index.get(succ)
                if succ_id is None:
                    succ_id = len(order)
                    index[succ] = succ_id
                    order.append(succ)
                    todo.append(succ)
                row.append(succ_id)
        succs.append(row)

    # Backward reachability to acceptance; dead branches are never walked.
    rev: dict[int, set[int]] = {}
    for sid, row in enumerate(succs):
        for tid in row:
            if tid >= 0:
                rev.setdefault(tid, set()).add(sid)
    live: set[int] = set()
    frontier = [sid for sid, acc in enumerate(accepting) if acc]
    live.update(frontier)
    while frontier:
        nxt: list[int] = []
        for sid in frontier:
            for back in rev.get(sid, ()):
                if back not in live:
                    live.add(back)
                    nxt.append(back)
        frontier = nxt

    words: list[tuple[str, ...]] = []
    if 0 not in live:
        return words, True
    queue: deque[tuple[tuple[str, ...], int]] = deque([((), 0)])
    truncated = False
    while queue:
        if max_witnesses is not None and len(words) >= max_witnesses:
            truncated = True
            break
        word, sid = queue.popleft()
        if accepting[sid]:
            words.append(word)
            continue
        if max_len is not None and len(word) >= max_len:
            truncated = True
            continue
        for i, letter in enumerate(letters):
            tid = succs[sid][i]
            if tid >= 0 and tid in live:
                queue.append((word + (letter,), tid))
    return words, not truncated and not queue


@dataclass
class AdDiffResult:
    witnesses: list[Trace]
    exhausted: bool
    requested: int
    max_len: int | None


def addiff(
    ad1: ActivityDiagram,
    ad2: ActivityDiagram,
    max_witnesses: int = DEFAULT_MAX_WITNESSES,
    max_len: int | None = None,
) -> AdDiffResult:
    """Prefix-minimal traces possible in ``ad1`` and impossible in ``ad2``.

    Valuations over the union of both input signatures are visited in order;
    within one valuation witnesses come shortest first, then lexicographic.
    ``exhausted`` is True only when every valuation's difference was fully
    enumerated with nothing cut off by ``max_witnesses`` or ``max_len``.
    """
    if max_witnesses < 1:
        raise ValueError("max_witnesses must be >= 1")
    if max_len is not None and max_len < 0:
        raise ValueError("max_len must be >= 0")
    valuations = input_valuations(ad1.input_vars(), ad2.input_vars())
    witnesses: list[Trace] = []
    exhausted = True
    for v in valuations:
        budget = max_witnesses - len(witnesses)
        if budget == 0:
            exhausted = False
            break
        diff = difference_automaton(build_config_nfa(ad1, v), build_config_nfa(ad2, v))
        words, done = prefix_minimal_words(diff, budget, max_len)
        witnesses.extend(Trace.make(v, w) for w in words)
        if not done:
            exhausted = False
    for t in witnesses:
        if not accepts(ad1, t) or accepts(ad2, t):
            raise RuntimeError(f"diff search produced an unsound witness: {t}")
    return AdDiffResult(witnesses, exhausted, max_witnesses, max_len)


def compare_ad(ad1: ActivityDiagram, ad2: ActivityDiagram) -> Verdict:
    """Relate two activity diagrams exactly by probing both diff directions."""
    forward = addiff(ad1, ad2, 1, None).witnesses
    backward = addiff(ad2, ad1, 1, None).witnesses
    return Verdict(_verdict_value(bool(forward), bool(backward)), bounded=False)
