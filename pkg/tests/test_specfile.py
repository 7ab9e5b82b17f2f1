import pytest

from helpers import corpus

from mouldkit.scalars import Scalar
from mouldkit.specfile import SpecError, dump_spec, parse_spec, parse_spec_text

VALID = """{
  "nu": 2,
  "multipliers": ["2", "1/2"],
  "h": [
    {"component": 1, "exponent": [2, 1], "coefficient": "3/4"},
    {"component": 2, "exponent": [0, 2], "coefficient": "-1+2i"}
  ],
  "truncation": 5
}
"""


def test_valid_spec():
    f = parse_spec_text(VALID)
    assert f.nu == 2 and f.N == 5
    assert f.mu == (Scalar(2), Scalar(1) / 2)
    assert f.h[0].coeffs == {(2, 1): Scalar(3) / 4}
    assert f.h[1].coeffs == {(0, 2): Scalar(-1, 2)}


def test_degree_override_and_default():
    assert parse_spec_text(VALID, degree=3).N == 3
    text = '{"nu": 1, "multipliers": ["2"], "h": []}'
    assert parse_spec_text(text).N == 6


@pytest.mark.parametrize("name,f", corpus(4), ids=[n for n, _ in corpus(4)])
def test_roundtrip(name, f):
    assert parse_spec_text(dump_spec(f)) == f


def bad(text, line, fragment):
    with pytest.raises(SpecError) as info:
        parse_spec_text(text, "s.json")
    msg = str(info.value)
    assert msg.startswith(f"s.json:{line}:"), msg
    assert fragment in msg


def test_zero_multiplier():
    bad('{\n"nu": 1,\n"multipliers": ["0"]\n}', 3, "zero")


def test_low_degree_terms():
    head = '{\n"nu": 2,\n"multipliers": ["2", "3"],\n"h": [\n'
    bad(head + '{"component": 1, "exponent": [1, 0], "coefficient": "1"}\n]}', 5, "multipliers")
    bad(head + '{"component": 1, "exponent": [0, 1], "coefficient": "1"}\n]}', 5, "off-diagonal")
    bad(head + '{"component": 1, "exponent": [0, 0], "coefficient": "1"}\n]}', 5, "constant")


def test_line_of_later_term():
    text = (
        '{\n"nu": 1,\n"multipliers": ["2"],\n"h": [\n'
        '{"component": 1, "exponent": [2], "coefficient": "1"},\n'
        '{"component": 1, "exponent": [1], "coefficient": "1"}\n]}'
    )
    bad(text, 6, "degree 1")


def test_other_rejections():
    bad('{"nu": 1, "multipliers": [0.5]}', 1, "exact")
    bad('{"nu": 1, "multipliers": ["2"], "extra": 1}', 1, "unknown field")
    bad('{"nu": 1, "multipliers": ["2"], "h": [{"component": 2, "exponent": [2], "coefficient": "1"}]}', 1, "component")
    bad('{"nu": 1,\n "multipliers": ["2"],,}', 2, "malformed JSON")


def test_missing_file(tmp_path):
    with pytest.raises(SpecError):
        parse_spec(tmp_path / "absent.json")
