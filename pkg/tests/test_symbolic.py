import numpy as np
import pytest

from billzeta.symbolic import (
    canonical_rotation,
    count_periodic_points,
    enumerate_cycles,
    enumerate_words,
    is_cyclically_admissible,
    is_primitive,
    primitive_class_count,
    primitive_root,
    reverse_class,
    rotate,
    transition_matrix,
)


def test_transition_matrix_shape():
    A = transition_matrix(4)
    assert A.shape == (4, 4)
    assert np.all(np.diag(A) == 0)
    assert np.all(A + np.eye(4, dtype=A.dtype) == 1)


@pytest.mark.parametrize("r", [3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 6, 9])
def test_periodic_point_count_matches_trace(r, n):
    A = transition_matrix(r)
    tr = int(np.trace(np.linalg.matrix_power(A, n)))
    assert count_periodic_points(r, n) == tr
    assert count_periodic_points(r, n) == (r - 1) ** n + (r - 1) * (-1) ** n


def test_primitive_class_counts_for_three_symbols():
    # 0 fixed words, 3 two-cycles, 2 three-cycles, 9 six-cycles
    assert [primitive_class_count(3, n) for n in (1, 2, 3, 6)] == [0, 3, 2, 9]


@pytest.mark.parametrize("n", range(2, 9))
def test_enumeration_matches_moebius_count(n):
    words = [w for w in enumerate_cycles(3, 8) if len(w) == n]
    assert len(words) == primitive_class_count(3, n)


def test_enumerated_words_are_canonical_admissible_primitive():
    for w in enumerate_cycles(3, 7):
        canon, shift = canonical_rotation(w)
        assert canon == w
        assert shift == 0
        assert is_cyclically_admissible(w)
        assert is_primitive(w)


def test_enumerate_words_counts_paths():
    # linear admissible words: r (r-1)^(n-1)
    for n in (1, 2, 3, 4, 5):
        assert len(enumerate_words(3, n)) == 3 * 2 ** (n - 1)
    for w in enumerate_words(3, 4):
        assert all(a != b for a, b in zip(w, w[1:]))


def test_canonical_rotation_shift_convention():
    word = (2, 3, 1, 3)
    canon, shift = canonical_rotation(word)
    n = len(word)
    assert canon == min(rotate(word, s) for s in range(n))
    for i in range(n):
        assert canon[i] == word[(i + shift) % n]


def test_primitive_root_of_repeated_word():
    assert primitive_root((1, 2, 1, 2, 1, 2)) == ((1, 2), 3)
    assert primitive_root((1, 2, 3)) == ((1, 2, 3), 1)
    assert not is_primitive((1, 3, 1, 3))


def test_reverse_class():
    assert reverse_class((1, 2, 3)) == (1, 3, 2)
    assert reverse_class((1, 2)) == (1, 2)


def test_admissibility_checks_wraparound():
    assert not is_cyclically_admissible((1, 2, 2))
    assert not is_cyclically_admissible((1, 2, 3, 1))
    assert is_cyclically_admissible((1, 2, 3))
