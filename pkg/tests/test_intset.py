import numpy as np
import pytest

from apfree.intset import IntSet, IntSetFormatError, format_set, load_set, parse_set, save_set
from apfree.validation import DomainError, check_intset, check_k_D


def test_intset_behaves_like_a_sorted_tuple():
    s = IntSet([1, 4, 9])
    assert s == (1, 4, 9)
    assert 4 in s and 5 not in s
    assert s.diameter == 8
    assert IntSet().diameter == 0
    assert s.difference([4]) == (1, 9)
    with pytest.raises(ValueError):
        IntSet([2, 1])


def test_parse_and_format_round_trip(tmp_path):
    text = "# squares\n9\n\n1\n  4 \n"
    assert parse_set(text) == (1, 4, 9)
    path = tmp_path / "s.txt"
    save_set([9, 1, 4], path)
    assert path.read_text() == "1\n4\n9\n"
    assert load_set(path) == (1, 4, 9)
    assert format_set([]) == ""


@pytest.mark.parametrize("text, line", [("1\nx\n", 2), ("1\n2\n1\n", 3), ("1.5\n", 1)])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(IntSetFormatError) as err:
        parse_set(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_check_intset():
    assert check_intset(np.array([3, 1, 2])) == (1, 2, 3)
    assert check_intset([2.0, 1.0]) == (1, 2)
    with pytest.raises(DomainError):
        check_intset([1.5])
    with pytest.raises(DomainError):
        check_intset([1, 1])
    assert check_intset([1, 1], allow_duplicates=True) == (1,)


def test_check_k_D():
    assert check_k_D(3, 1) == (3, 1)
    with pytest.raises(DomainError):
        check_k_D(3, 2)
    with pytest.raises(DomainError):
        check_k_D(3, 0)
