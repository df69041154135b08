"""Words constrained by a fixed pair relation, and their reconfiguration.

A word is valid when every consecutive symbol pair lies in the relation.
Reconfiguration changes one character at a time through valid words only.
These solvers are the source-side ground truth for the word-to-constraint-
graph compiler.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from .core import LimitExceeded

DEFAULT_WORD_STATES = 1 << 20


@dataclass(frozen=True)
class HRelation:
    """Ordered alphabet plus the allowed consecutive-pair relation."""

    symbols: tuple[str, ...]
    allowed: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        known = set(self.symbols)
        for a, b in self.allowed:
            if a not in known or b not in known:
                raise ValueError(f"pair ({a},{b}) uses unknown symbols")

    def forbidden_pairs(self) -> list[tuple[str, str]]:
        return [
            (a, b)
            for a in self.symbols
            for b in self.symbols
            if (a, b) not in self.allowed
        ]


@dataclass(frozen=True)
class HWordInstance:
    """Start word plus either a goal word or a (position, symbol) target."""

    h: HRelation
    start: str
    goal: Optional[str] = None
    target: Optional[tuple[int, str]] = None

    def __post_init__(self) -> None:
        if (self.goal is None) == (self.target is None):
            raise ValueError("instance needs exactly one of goal/target")
        if not is_hword(self.h, self.start):
            raise ValueError(f"start {self.start!r} is not a valid word")
        if self.goal is not None:
            if len(self.goal) != len(self.start):
                raise ValueError("start and goal words must have equal length")
            if not is_hword(self.h, self.goal):
                raise ValueError(f"goal {self.goal!r} is not a valid word")
        if self.target is not None:
            pos, sym = self.target
            if not (0 <= pos < len(self.start)):
                raise ValueError(f"target position {pos} out of range")
            if sym not in self.h.symbols:
                raise ValueError(f"target symbol {sym!r} not in alphabet")


def is_hword(h: HRelation, word: str) -> bool:
    """True iff every character is known and every adjacent pair allowed."""
    known = set(h.symbols)
    if any(ch not in known for ch in word):
        return False
    return all((a, b) in h.allowed for a, b in zip(word, word[1:]))


def word_neighbors(h: HRelation, word: str) -> Iterator[str]:
    """Valid words differing in exactly one character, deterministic order."""
    for i in range(len(word)):
        for sym in h.symbols:
            if sym == word[i]:
                continue
            cand = word[:i] + sym + word[i + 1:]
            left_ok = i == 0 or (cand[i - 1], sym) in h.allowed
            right_ok = i == len(word) - 1 or (sym, cand[i + 1]) in h.allowed
            if left_ok and right_ok:
                yield cand


def _bfs_words(
    h: HRelation,
    start: str,
    stop,
    max_states: Optional[int],
) -> Optional[list[str]]:
    if stop(start):
        return [start]
    parents: dict[str, Optional[str]] = {start: None}
    q = deque([start])
    while q:
        word = q.popleft()
        for nb in word_neighbors(h, word):
            if nb in parents:
                continue
            parents[nb] = word
            if max_states is not None and len(parents) > max_states:
                raise LimitExceeded(f"visited more than {max_states} words")
            if stop(nb):
                path = [nb]
                while parents[path[-1]] is not None:
                    path.append(parents[path[-1]])
                path.reverse()
                return path
            q.append(nb)
    return None


def solve_hword_reconfig(
    h: HRelation,
    start: str,
    goal: str,
    max_states: Optional[int] = DEFAULT_WORD_STATES,
) -> Optional[list[str]]:
    """Shortest valid-word path from start to goal (inclusive), or None."""
    inst = HWordInstance(h=h, start=start, goal=goal)
    return _bfs_words(h, start, lambda w: w == goal, max_states)


def solve_hword_target(
    h: HRelation,
    start: str,
    pos: int,
    sym: str,
    max_states: Optional[int] = DEFAULT_WORD_STATES,
) -> Optional[list[str]]:
    """Shortest path to any word carrying ``sym`` at ``pos``, or None."""
    inst = HWordInstance(h=h, start=start, target=(pos, sym))
    return _bfs_words(h, start, lambda w: w[pos] == sym, max_states)


def all_hwords(h: HRelation, length: int) -> list[str]:
    """Every valid word of the given length, lexicographic by symbol order."""
    if length == 0:
        return [""]
    words: list[str] = []
    order = {s: i for i, s in enumerate(h.symbols)}
    for combo in itertools.product(h.symbols, repeat=length):
        word = "".join(combo)
        if is_hword(h, word):
            words.append(word)
    words.sort(key=lambda w: [order[c] for c in w])
    return words


def word_components(h: HRelation, length: int) -> dict[str, int]:
    """Connected reconfiguration classes over all valid words of a length."""
    comp: dict[str, int] = {}
    next_id = 0
    for word in all_hwords(h, length):
        if word in comp:
            continue
        comp[word] = next_id
        q = deque([word])
        while q:
            w = q.popleft()
            for nb in word_neighbors(h, w):
                if nb not in comp:
                    comp[nb] = next_id
                    q.append(nb)
        next_id += 1
    return comp
