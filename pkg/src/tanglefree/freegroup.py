"""Reduced words in the free group F_m on generators s_1, ..., s_m."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class ParseError(ValueError):
    """Raised when a word string does not follow the word grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class RankMismatch(ValueError):
    pass


class Letter(NamedTuple):
    generator: int  # 1-based
    sign: int  # +1 or -1

    def inverse(self) -> "Letter":
        return Letter(self.generator, -self.sign)


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for let in letters:
        if stack and stack[-1].generator == let.generator and stack[-1].sign == -let.sign:
            stack.pop()
        else:
            stack.append(let)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """A freely reduced word. Construction always reduces the given letters."""

    rank: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        letters = []
        for gen, sign in self.letters:
            if not 1 <= gen <= self.rank:
                raise ValueError(f"generator index {gen} outside 1..{self.rank}")
            if sign not in (1, -1):
                raise ValueError(f"letter sign must be +1 or -1, got {sign}")
            letters.append(Letter(int(gen), int(sign)))
        object.__setattr__(self, "letters", _free_reduce(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, t: int) -> "Word":
        if t < 0:
            return power(invert(self), -t)
        return power(self, t)

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls(rank)

    @classmethod
    def generator(cls, rank: int, index: int) -> "Word":
        return cls(rank, (Letter(index, 1),))


def reduce(letters: Sequence[tuple[int, int]], rank: int | None = None) -> Word:
    """Free reduction of a raw letter sequence.

    If ``rank`` is omitted the largest generator index occurring is used
    (rank 1 for the empty sequence).
    """
    if rank is None:
        rank = max((g for g, _ in letters), default=1)
    return Word(rank, tuple(Letter(g, s) for g, s in letters))


def word_length(w: Word) -> int:
    return len(w.letters)


def _check_ranks(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise RankMismatch(f"rank mismatch: {u.rank} vs {v.rank}")


def invert(w: Word) -> Word:
    return Word(w.rank, tuple(let.inverse() for let in reversed(w.letters)))


def concat(u: Word, v: Word) -> Word:
    _check_ranks(u, v)
    return Word(u.rank, u.letters + v.letters)


def power(w: Word, t: int) -> Word:
    if t < 0:
        raise ValueError("power exponent must be nonnegative")
    # Only the seam between consecutive copies can cancel, so strip the
    # longest prefix that cancels against the suffix once.
    letters = w.letters
    k = 0
    while 2 * k < len(letters) and letters[k] == letters[-1 - k].inverse():
        k += 1
    if t == 0:
        return Word(w.rank)
    prefix, core, suffix = letters[:k], letters[k:len(letters) - k], letters[len(letters) - k:]
    return Word(w.rank, prefix + core * t + suffix)


def commutator(u: Word, v: Word) -> Word:
    return concat(concat(u, v), concat(invert(u), invert(v)))


def distinct_powers_check(w1: Word, w2: Word) -> bool:
    """True iff w1, w2 are nontrivial and generate a free subgroup of rank 2.

    In a free group this holds exactly when the commutator is nontrivial,
    which is equivalent to all nontrivial powers of w1 and w2 being distinct.
    """
    _check_ranks(w1, w2)
    if not w1 or not w2:
        return False
    return bool(commutator(w1, w2))


_GK_TOKEN = re.compile(r"([gG])(\d+)")
_LETTER_TOKEN = re.compile(r"[a-zA-Z]+")


def parse_word(text: str, rank: int) -> Word:
    """Parse a word.

    Tokens are whitespace separated. Letter style: ``a``..``z`` are s_1..s_26 and
    upper case gives the inverse; a token may hold several letters (``aB``).
    Indexed style: ``g3`` is s_3 and ``G3`` its inverse. Styles cannot be mixed.
    """
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    letters: list[Letter] = []
    style = None
    for match in re.finditer(r"\S+", text):
        token, pos = match.group(), match.start()
        gk = _GK_TOKEN.fullmatch(token)
        if gk:
            token_style = "indexed"
            gen = int(gk.group(2))
            if gen < 1:
                raise ParseError("generator index must be >= 1", pos)
            new = [(gen, 1 if gk.group(1) == "g" else -1, pos)]
        elif _LETTER_TOKEN.fullmatch(token):
            token_style = "letter"
            new = []
            for i, ch in enumerate(token):
                gen = ord(ch.lower()) - ord("a") + 1
                new.append((gen, 1 if ch.islower() else -1, pos + i))
        else:
            if token[0] in "gG" and token[1:2].isdigit():
                bad = next(i for i in range(1, len(token)) if not token[i].isdigit())
            else:
                bad = next(i for i, ch in enumerate(token) if not ("a" <= ch.lower() <= "z"))
            raise ParseError(f"unexpected character {token[bad]!r}", pos + bad)
        if style is None:
            style = token_style
        elif style != token_style:
            raise ParseError("letter and gK token styles cannot be mixed", pos)
        for gen, sign, p in new:
            if gen > rank:
                raise ParseError(f"generator {gen} exceeds rank {rank}", p)
            letters.append(Letter(gen, sign))
    return Word(rank, tuple(letters))


def format_word(w: Word) -> str:
    """Canonical printer: letter style up to rank 26, ``gK`` tokens beyond."""
    if w.rank > 26:
        return " ".join(f"{'g' if s > 0 else 'G'}{g}" for g, s in w.letters)
    out = []
    for g, s in w.letters:
        ch = chr(ord("a") + g - 1)
        out.append(ch if s > 0 else ch.upper())
    return " ".join(out)


def random_word(rng: random.Random, rank: int, max_length: int, min_length: int = 1) -> Word:
    """Uniform reduced word whose length is uniform in [min_length, max_length]."""
    length = rng.randint(min_length, max_length)
    letters: list[Letter] = []
    while len(letters) < length:
        let = Letter(rng.randint(1, rank), rng.choice((1, -1)))
        if letters and letters[-1] == let.inverse():
            continue
        letters.append(let)
    return Word(rank, tuple(letters))
