"""Reduced words of the free group F_d on generators a_1, ..., a_d.

A letter is a nonzero integer: ``+i`` stands for a_i and ``-i`` for its
inverse.  :class:`Word` is a tuple subclass that is always freely reduced,
so words hash and compare like plain tuples and can key dictionaries.
"""

from __future__ import annotations

import string
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .errors import DomainError, InvalidLetterError, ResourceCapError

MAX_RANK = 16
DEFAULT_MAX_LENGTH = 20


class Word(tuple):
    """A freely reduced word.  ``Word()`` is the identity e."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = (), d: int | None = None):
        return tuple.__new__(cls, _reduce_letters(letters, d))

    @classmethod
    def _trusted(cls, letters) -> "Word":
        # caller guarantees `letters` is already reduced
        return tuple.__new__(cls, letters)

    def __mul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return multiply(Word(other), self)

    def __invert__(self) -> "Word":
        return invert(self)

    def __add__(self, other):
        raise TypeError("use * for the group product of words")

    def __repr__(self):
        return f"Word({list(self)})"

    def __str__(self):
        return format_word(self)


def _reduce_letters(letters: Iterable[int], d: int | None) -> tuple:
    out: list[int] = []
    for pos, x in enumerate(letters):
        if isinstance(x, bool) or not isinstance(x, int):
            try:
                if int(x) != x:
                    raise InvalidLetterError(x, d, pos)
                x = int(x)
            except (TypeError, ValueError):
                raise InvalidLetterError(x, d, pos) from None
        if x == 0 or (d is not None and abs(x) > d):
            raise InvalidLetterError(x, d, pos)
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def reduce(letters: Iterable[int], d: int | None = None) -> Word:
    """Freely reduce a raw letter sequence.

    Stack-based cancellation; the result does not depend on the order in
    which adjacent pairs are cancelled.  With ``d`` given, letters with
    ``abs(x) > d`` are rejected.
    """
    return Word(letters, d)


def cancellation_depth(s: tuple, t: tuple) -> int:
    """Number of letters cancelled when forming the product ``s t``."""
    n = min(len(s), len(t))
    j = 0
    ls = len(s)
    while j < n and s[ls - 1 - j] == -t[j]:
        j += 1
    return j


def _mul(s: tuple, t: tuple) -> tuple:
    j = cancellation_depth(s, t)
    if j == 0:
        return tuple.__add__(s, t)
    return s[: len(s) - j] + t[j:]


def multiply(s: tuple, t: tuple) -> Word:
    return Word._trusted(_mul(tuple(s), tuple(t)))


def invert(s: tuple) -> Word:
    return Word._trusted(tuple(-x for x in reversed(s)))


def cyclic_reduce(s: tuple) -> Word:
    """Shortest conjugate of ``s``: strip matching first/last letter pairs."""
    i, j = 0, len(s)
    while j - i >= 2 and s[i] == -s[j - 1]:
        i += 1
        j -= 1
    return Word._trusted(tuple(s[i:j]))


def is_cyclically_reduced(s: tuple) -> bool:
    return len(s) < 2 or s[0] != -s[-1]


def is_conjugate(s: tuple, t: tuple) -> bool:
    """Conjugacy test: cyclic reductions agree up to rotation."""
    a = cyclic_reduce(s)
    b = cyclic_reduce(t)
    if len(a) != len(b):
        return False
    if not a:
        return True
    return any(b[i:] + b[:i] == a for i in range(len(b)))


def letter_order(x: int) -> int:
    """Sort key giving 1 < -1 < 2 < -2 < ..."""
    return 2 * (abs(x) - 1) + (1 if x < 0 else 0)


@dataclass(frozen=True)
class GroupContext:
    """The free group F_d with an enumeration radius cap."""

    d: int
    max_length: int = DEFAULT_MAX_LENGTH

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, int):
            raise DomainError(f"rank d must be an integer, got {self.d!r}")
        if not 2 <= self.d <= MAX_RANK:
            raise DomainError(f"rank d must lie in [2, {MAX_RANK}], got {self.d}")
        if self.max_length < 0:
            raise DomainError("max_length must be non-negative")

    @property
    def letters(self) -> tuple[int, ...]:
        out = []
        for i in range(1, self.d + 1):
            out += [i, -i]
        return tuple(out)

    @property
    def branching(self) -> int:
        """2d - 1, the number of ways to extend a nonempty reduced word."""
        return 2 * self.d - 1

    def sphere_size(self, k: int) -> int:
        if k < 0:
            raise DomainError(f"sphere index must be >= 0, got {k}")
        if k == 0:
            return 1
        return 2 * self.d * (2 * self.d - 1) ** (k - 1)

    def ball_size(self, r: int) -> int:
        return sum(self.sphere_size(k) for k in range(r + 1))

    def word(self, letters: Iterable[int] = ()) -> Word:
        return Word(letters, self.d)

    def parse(self, text: str) -> Word:
        return parse_word(text, self.d)

    def check_radius(self, k: int) -> None:
        if k > self.max_length:
            raise ResourceCapError(
                f"radius {k} exceeds the enumeration cap {self.max_length} "
                f"(|W_k| grows like {2 * self.d - 1}^k)"
            )


def iter_sphere(ctx: GroupContext, k: int) -> Iterator[Word]:
    """Yield W_k in lexicographic order (1 < -1 < 2 < -2 < ...)."""
    if k < 0:
        raise DomainError(f"sphere index must be >= 0, got {k}")
    ctx.check_radius(k)
    if k == 0:
        yield Word._trusted(())
        return
    alphabet = ctx.letters
    prefix: list[int] = []

    def extend(depth: int):
        for x in alphabet:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            if depth + 1 == k:
                yield Word._trusted(tuple(prefix))
            else:
                yield from extend(depth + 1)
            prefix.pop()

    yield from extend(0)


def enumerate_sphere(ctx: GroupContext, k: int) -> list[Word]:
    return list(iter_sphere(ctx, k))


def enumerate_ball(ctx: GroupContext, radius: int) -> list[Word]:
    """All words of length <= radius, shortest first."""
    out: list[Word] = []
    for k in range(radius + 1):
        out.extend(iter_sphere(ctx, k))
    return out


def conjugacy_sphere_count(ctx: GroupContext, w: tuple, n: int) -> int:
    """Exact size of {s : |s| = |w| + 2n, s conjugate to w}.

    ``w`` must be a nontrivial cyclically reduced word, so ``|w|`` is the
    minimal length in its conjugacy class.
    """
    w = Word(w, ctx.d)
    if not w:
        raise DomainError("the trivial class {e} is excluded")
    if not is_cyclically_reduced(w):
        raise DomainError(f"{format_word(w)} is not cyclically reduced")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    k = len(w)
    rotations = {w[i:] + w[:i] for i in range(k)}
    count = 0
    for s in iter_sphere(ctx, k + 2 * n):
        if tuple(cyclic_reduce(s)) in rotations:
            count += 1
    return count


def format_word(s: tuple) -> str:
    """Text form: a, b, c, ... for generators, A, B, C, ... for inverses."""
    if not s:
        return "e"
    if max(abs(x) for x in s) > 26:
        return "[" + ",".join(str(x) for x in s) + "]"
    return "".join(
        string.ascii_lowercase[x - 1] if x > 0 else string.ascii_uppercase[-x - 1]
        for x in s
    )


def parse_word(text: str, d: int | None = None) -> Word:
    text = text.strip()
    if text in ("", "e"):
        return Word()
    letters = []
    for pos, ch in enumerate(text):
        if ch in string.ascii_lowercase:
            letters.append(string.ascii_lowercase.index(ch) + 1)
        elif ch in string.ascii_uppercase:
            letters.append(-(string.ascii_uppercase.index(ch) + 1))
        else:
            raise InvalidLetterError(ch, d, pos)
    return Word(letters, d)
