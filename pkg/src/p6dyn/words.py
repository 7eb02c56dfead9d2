"""Words in the fundamental group of the thrice-punctured sphere and in the
rank-3 universal Coxeter group.

Loops are words in the generators g1, g2, g3 (with inverses) subject to the
single relation g1*g2*g3 = 1.  They embed into the index-two subgroup of even
elements of G = <s1, s2, s3 | si^2 = 1> via

    g1 -> s1 s2,   g2 -> s2 s3,   g3 -> s3 s1,

inverses mapping to the reversed pairs.  Because G is a free product of three
copies of Z/2Z, every element has a unique reduced word (no equal adjacent
letters), and conjugacy classes are classified by cyclic words.  All reduction
and classification operations below work through that normal form.

Everything in this module is a pure function on immutable values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "LoopWord",
    "CoxeterWord",
    "WordClass",
    "WordParseError",
    "parse_loop_word",
    "parse_coxeter_word",
    "parse_word",
    "loop_to_coxeter",
    "coxeter_to_loop",
    "free_reduce",
    "cyclic_reduce",
    "minimal_form",
    "classify",
    "invert",
    "concat",
    "is_analytically_stable",
]

# image of g1, g2, g3 under the embedding into G
_LOOP_IMAGE = {1: (1, 2), 2: (2, 3), 3: (3, 1)}
# inverse lookup: ordered Coxeter pair -> (loop index, sign)
_PAIR_TO_LOOP = {}
for _i, (_a, _b) in _LOOP_IMAGE.items():
    _PAIR_TO_LOOP[(_a, _b)] = (_i, +1)
    _PAIR_TO_LOOP[(_b, _a)] = (_i, -1)


@dataclass(frozen=True)
class LoopWord:
    """A word in g1, g2, g3: a sequence of (index, sign) with sign in {+1,-1}."""

    letters: tuple = ()

    def __post_init__(self):
        for idx, sign in self.letters:
            if idx not in (1, 2, 3) or sign not in (1, -1):
                raise ValueError(f"bad loop letter ({idx}, {sign})")

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "LoopWord":
        return LoopWord(tuple((i, -s) for i, s in reversed(self.letters)))

    def to_text(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"g{i}" if s > 0 else f"g{i}^-1" for i, s in self.letters)


@dataclass(frozen=True)
class CoxeterWord:
    """A word in the involutive generators s1, s2, s3."""

    letters: tuple = ()

    def __post_init__(self):
        for idx in self.letters:
            if idx not in (1, 2, 3):
                raise ValueError(f"bad Coxeter letter {idx}")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @property
    def is_reduced(self) -> bool:
        return all(a != b for a, b in zip(self.letters, self.letters[1:]))

    def to_text(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"s{i}" for i in self.letters)


# classification tags
TRIVIAL = "trivial"
ELEMENTARY = "elementary"
EIGHT_LOOP = "eight_loop"
COXETER_SQUARE = "coxeter_square"
GENERAL = "general_nonelementary"


@dataclass(frozen=True)
class WordClass:
    """Conjugacy-class tag of a word, with the exponent m for elementary ones."""

    tag: str
    exponent: int | None = None

    @property
    def is_elementary(self) -> bool:
        return self.tag in (TRIVIAL, ELEMENTARY)


class WordParseError(ValueError):
    """Raised on malformed word text; carries the 1-based column of the error."""

    def __init__(self, message, column):
        super().__init__(f"{message} (column {column})")
        self.column = column


_G_TOKEN = re.compile(r"^g([123])(?:\^(-?\d+))?$")
_S_TOKEN = re.compile(r"^s([123])(?:\^(-?\d+))?$")


def _tokens_with_columns(text):
    out = []
    pos = 0
    for tok in text.split():
        col = text.index(tok, pos) + 1
        pos = col - 1 + len(tok)
        out.append((tok, col))
    return out


def parse_loop_word(text: str) -> LoopWord:
    """Parse "g1 g2^-1 g3" style text.  Powers expand letter by letter."""
    letters = []
    for tok, col in _tokens_with_columns(text):
        if tok == "1":
            continue
        m = _G_TOKEN.match(tok)
        if not m:
            raise WordParseError(f"unrecognized loop token {tok!r}", col)
        idx = int(m.group(1))
        power = int(m.group(2)) if m.group(2) else 1
        sign = 1 if power > 0 else -1
        letters.extend((idx, sign) for _ in range(abs(power)))
    return LoopWord(tuple(letters))


def parse_coxeter_word(text: str) -> CoxeterWord:
    """Parse "s1 s2 s3" style text.  Powers are reduced mod 2 (s_i^2 = 1)."""
    letters = []
    for tok, col in _tokens_with_columns(text):
        if tok == "1":
            continue
        m = _S_TOKEN.match(tok)
        if not m:
            raise WordParseError(f"unrecognized Coxeter token {tok!r}", col)
        idx = int(m.group(1))
        power = int(m.group(2)) if m.group(2) else 1
        if power % 2:
            letters.append(idx)
    return CoxeterWord(tuple(letters))


def parse_word(text: str):
    """Parse text in either alphabet, detected from the first token."""
    toks = _tokens_with_columns(text)
    for tok, col in toks:
        if tok == "1":
            continue
        if tok.startswith("g"):
            return parse_loop_word(text)
        if tok.startswith("s"):
            return parse_coxeter_word(text)
        raise WordParseError(f"unrecognized token {tok!r}", col)
    return CoxeterWord(())


def free_reduce(w: CoxeterWord) -> CoxeterWord:
    """Unique reduced form: cancel equal adjacent letters until none remain."""
    stack = []
    for letter in w.letters:
        if stack and stack[-1] == letter:
            stack.pop()
        else:
            stack.append(letter)
    return CoxeterWord(tuple(stack))


def concat(*ws: CoxeterWord) -> CoxeterWord:
    letters = []
    for w in ws:
        letters.extend(w.letters)
    return free_reduce(CoxeterWord(tuple(letters)))


def invert(w: CoxeterWord) -> CoxeterWord:
    """Group inverse: letters reversed (each generator is an involution)."""
    return CoxeterWord(tuple(reversed(w.letters)))


def loop_to_coxeter(w: LoopWord) -> CoxeterWord:
    """Translate a loop word into G and freely reduce; the result is even."""
    letters = []
    for idx, sign in w.letters:
        a, b = _LOOP_IMAGE[idx]
        letters.extend((a, b) if sign > 0 else (b, a))
    return free_reduce(CoxeterWord(tuple(letters)))


def coxeter_to_loop(w: CoxeterWord) -> LoopWord:
    """Inverse of the embedding, defined on reduced even words."""
    red = free_reduce(w)
    if len(red) % 2:
        raise ValueError("odd-length word is not in the image of the loop group")
    letters = []
    for t in range(0, len(red), 2):
        pair = (red.letters[t], red.letters[t + 1])
        letters.append(_PAIR_TO_LOOP[pair])
    return LoopWord(tuple(letters))


def cyclic_reduce(w: CoxeterWord):
    """Strip matching end letters until first != last (or length <= 1).

    Returns (core, conjugator) with w = conjugator * core * conjugator^-1;
    the conjugator is the stripped prefix.  Length parity is preserved.
    """
    red = free_reduce(w)
    letters = list(red.letters)
    prefix = []
    while len(letters) >= 2 and letters[0] == letters[-1]:
        prefix.append(letters[0])
        letters = letters[1:-1]
    return CoxeterWord(tuple(letters)), CoxeterWord(tuple(prefix))


def is_analytically_stable(w: CoxeterWord) -> bool:
    """A reduced word acts stably on cohomology iff its end letters differ."""
    red = free_reduce(w)
    return len(red) >= 2 and red.letters[0] != red.letters[-1]


def minimal_form(w: CoxeterWord) -> CoxeterWord:
    """Canonical representative of the conjugacy class of w.

    Cyclic reduction followed by a deterministic tie-break: the
    lexicographically smallest cyclic rotation.  Every rotation of a
    cyclically reduced word is again reduced, so this is well defined.
    """
    core, _ = cyclic_reduce(w)
    letters = core.letters
    if len(letters) <= 1:
        return core
    rotations = [letters[r:] + letters[:r] for r in range(len(letters))]
    return CoxeterWord(min(rotations))


def _rotations(letters):
    return [letters[r:] + letters[:r] for r in range(len(letters))]


def classify(w) -> WordClass:
    """Classify the conjugacy class of a word (loop or Coxeter alphabet)."""
    if isinstance(w, LoopWord):
        w = loop_to_coxeter(w)
    core, _ = cyclic_reduce(w)
    letters = core.letters
    n = len(letters)
    if n == 0:
        return WordClass(TRIVIAL)
    distinct = set(letters)
    if len(distinct) <= 2:
        # cyclically reduced with <= 2 letters forces strict alternation
        m = n // 2 if n % 2 == 0 else None
        return WordClass(ELEMENTARY, exponent=m)
    if n == 4:
        for rot in _rotations(letters):
            a, b, c, d = rot
            if b == d and len({a, b, c}) == 3:
                return WordClass(EIGHT_LOOP)
    if n == 6:
        for rot in _rotations(letters):
            if rot[:3] == rot[3:] and len(set(rot[:3])) == 3:
                return WordClass(COXETER_SQUARE)
    return WordClass(GENERAL)
