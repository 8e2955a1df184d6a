from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuntzkit import sampling
from cuntzkit.parsing import ParseError, format_element, parse_element
from cuntzkit.words import AlgebraElement, canonicalize, close


def W(left, right, d=2, c=1.0):
    return AlgebraElement.word(left, right, d, c)


@pytest.mark.parametrize(
    "text, want",
    [
        ("s1", W((1,), ())),
        ("s12'", W((), (1, 2))),
        ("s1*s2'", W((1,), (2,))),
        ("s[1,2]*s[2]'", W((1, 2), (2,))),
        ("2*s1 - s2", W((1,), (), c=2) - W((2,), ())),
        ("(1,-2)*s1'", W((), (1,), c=1 - 2j)),
        ("I", AlgebraElement.unit(2)),
        ("0", AlgebraElement.zero(2)),
        ("s1'*s1", AlgebraElement.unit(2)),
        ("s1*s1' + s2*s2'", AlgebraElement.unit(2)),
        ("-0.5*s2*s1'", W((2,), (1,), c=-0.5)),
    ],
)
def test_parse_examples(text, want):
    assert close(parse_element(text, 2), want)


def test_format_examples():
    assert format_element(AlgebraElement.unit(2)) == "I"
    assert format_element(AlgebraElement.zero(2)) == "0"
    assert format_element(W((1,), (2,))) == "s1*s2'"
    assert format_element(W((1, 1), (1, 1)) + W((1, 2), (1, 2)), "compressed") == "s1*s1'"
    assert format_element(W((), (1,), d=11)) == "s[1]'"


@pytest.mark.parametrize("d", [2, 3, 12])
@pytest.mark.parametrize("mode", ["canonical", "compressed"])
def test_roundtrip(d, mode, rng):
    for _ in range(200 if d == 2 else 30):
        a = sampling.random_element(d, rng)
        text = format_element(a, mode)
        back = parse_element(text, d)
        assert close(back, a, 1e-12)
        assert format_element(back, mode) == text


def test_format_is_deterministic(rng):
    a = sampling.random_element(3, rng)
    reordered = AlgebraElement(3, dict(reversed(list(a.items()))))
    assert format_element(a) == format_element(reordered)
    assert canonicalize(parse_element(format_element(a), 3)).terms.keys() == canonicalize(a).terms.keys()


@pytest.mark.parametrize(
    "text, d, position",
    [
        ("s3", 2, 1),
        ("s1 + ", 2, 5),
        ("s1 ** s2", 2, 4),
        ("s[1,", 2, 4),
        ("(1,2", 2, 4),
        ("s1 s2", 2, 3),
        ("s12", 10, 0),
        ("x", 2, 0),
        ("s[1,5]", 3, 4),
    ],
)
def test_errors_carry_positions(text, d, position):
    with pytest.raises(ParseError) as info:
        parse_element(text, d)
    assert info.value.position == position
    assert "^" in str(info.value)


def test_rejects_bad_d_and_mode():
    with pytest.raises(ValueError):
        parse_element("s1", 1)
    with pytest.raises(ValueError):
        format_element(AlgebraElement.unit(2), "fancy")


_coef = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False).filter(
    lambda c: abs(c) > 1e-6
)


@st.composite
def elements(draw):
    d = draw(st.sampled_from([2, 3, 11]))
    index = st.lists(st.integers(1, d), max_size=3).map(tuple)
    terms = draw(st.dictionaries(st.tuples(index, index), _coef, max_size=4))
    return AlgebraElement(d, terms)


@given(elements())
def test_format_parse_roundtrip_property(a):
    text = format_element(a)
    assert close(parse_element(text, a.d), a, 1e-12)


def test_bracket_and_complex_examples():
    assert parse_element("s[1,2]' ", 12) == AlgebraElement.word((), (1, 2), 12)
    want = AlgebraElement.word((1,), (), 2, 1j) + AlgebraElement.word((2,), (2,), 2)
    assert close(parse_element("(0,1)*s1 + s2*s2'", 2), want)
    assert format_element(parse_element("s1*s1' + s2*s2'", 2), "compressed") == "I"
