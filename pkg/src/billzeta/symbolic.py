"""Symbolic dynamics on r symbols with distinct consecutive labels.

Itineraries live in the subshift whose transition matrix has zeros on
the diagonal and ones elsewhere: symbol ``i`` may be followed by any
``j != i``.  Periodic itineraries are handled as cyclic words; each
class is represented by its lexicographically smallest rotation.
Symbols are 1-based everywhere in the public API.
"""

import numpy as np

from ._kernels import enum_canonical_words


def transition_matrix(r: int) -> np.ndarray:
    """0/1 transition matrix: ones off the diagonal."""
    A = np.ones((r, r), dtype=np.int64)
    np.fill_diagonal(A, 0)
    return A


def count_periodic_points(r: int, n: int) -> int:
    """Number of period-``n`` points, i.e. trace of the n-th matrix power.

    Closed form ``(r-1)^n + (r-1)(-1)^n`` from the eigenvalues ``r-1``
    (once) and ``-1`` (``r-1`` times).
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    return (r - 1) ** n + (r - 1) * (-1) ** n


def _mobius(m: int) -> int:
    if m == 1:
        return 1
    result = 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            result = -result
        d += 1
    if m > 1:
        result = -result
    return result


def primitive_class_count(r: int, n: int) -> int:
    """Number of primitive cyclic classes of length ``n`` (Moebius inversion)."""
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += _mobius(n // d) * count_periodic_points(r, d)
    assert total % n == 0
    return total // n


def rotate(word, s):
    n = len(word)
    return tuple(word[(i + s) % n] for i in range(n))


def canonical_rotation(word):
    """Return (canonical word, shift) with canonical = rotate(word, shift)."""
    word = tuple(word)
    best = word
    shift = 0
    for s in range(1, len(word)):
        cand = rotate(word, s)
        if cand < best:
            best = cand
            shift = s
    return best, shift


def primitive_root(word):
    """Smallest block whose repetition gives ``word``; returns (root, reps)."""
    word = tuple(word)
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d], n // d
    raise AssertionError("unreachable")


def is_primitive(word) -> bool:
    return primitive_root(word)[1] == 1


def is_cyclically_admissible(word) -> bool:
    word = tuple(word)
    n = len(word)
    if n < 2:
        return False
    return all(word[i] != word[(i + 1) % n] for i in range(n))


def reverse_class(word):
    """Canonical representative of the time-reversed cycle."""
    rev = tuple(reversed(tuple(word)))
    return canonical_rotation(rev)[0]


def enumerate_cycles(r: int, n_max: int):
    """All primitive cyclic classes of length 2..n_max, canonical words.

    Depth-first generation per length restricted to the alphabet above
    the leading symbol, keeping exactly the words that are strictly
    minimal among their rotations.  The row count is cross-checked
    against the Moebius count, so enumeration and the closed-form trace
    can never drift apart silently.  Returns a list of 1-based tuples
    sorted by (length, word).
    """
    if r < 3:
        raise ValueError("need at least 3 symbols")
    cycles = []
    for n in range(2, n_max + 1):
        cap = primitive_class_count(r, n)
        out = np.empty((cap, n), dtype=np.int64)
        end = 0
        for s0 in range(r):
            end = enum_canonical_words(r, n, s0, out, end)
        if end != cap:
            raise AssertionError(
                f"enumeration found {end} classes of length {n}, expected {cap}"
            )
        rows = out[np.lexsort(out.T[::-1])]
        for row in rows:
            cycles.append(tuple(int(v) + 1 for v in row))
    return cycles


def enumerate_words(r: int, length: int):
    """Admissible non-cyclic words of the given length (1-based symbols)."""
    if length < 1:
        return []
    words = [(s,) for s in range(1, r + 1)]
    for _ in range(length - 1):
        words = [w + (s,) for w in words for s in range(1, r + 1) if s != w[-1]]
    return words
