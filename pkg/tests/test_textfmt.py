"""Text format: grammar, errors, round-trips."""

import pytest

from wfsound import ParseError, parse_net, serialize_net, serialize_workflow
from wfsound import fig1_examples, random_workflow
from wfsound.textfmt import (
    BadWeight,
    DuplicateDesignation,
    DuplicateIdentifier,
    UnknownPlace,
)

MIDDLE = """\
place i initial
place q1
place q2
place o final
trans t1 : i -> q1
trans t2 : q1 -> q2
trans t3 : q2 -> q1
trans t4 : q1, q2 -> 2*o
"""


def test_parse_middle_net():
    parsed = parse_net(MIDDLE)
    net = parsed.net
    assert len(net.places) == 4 and len(net.transitions) == 4
    assert net.pre_dict("t4") == {"q1": 1, "q2": 1}
    assert net.post_dict("t4") == {"o": 2}
    assert parsed.initial == "i" and parsed.final == "o"
    wf = parsed.workflow()
    assert wf.initial == "i"


def test_parse_empty_and_comments():
    parsed = parse_net("")
    assert parsed.net.places == () and parsed.net.transitions == ()
    parsed = parse_net("# only a comment\n\n   \n")
    assert parsed.net.places == ()


def test_unknown_place_error():
    with pytest.raises(UnknownPlace):
        parse_net("place b\ntrans t : a -> b\n")


def test_duplicate_identifier():
    with pytest.raises(DuplicateIdentifier):
        parse_net("place a\nplace a\n")
    with pytest.raises(DuplicateIdentifier):
        parse_net("place a\ntrans a : -> a\n")


def test_weight_errors():
    with pytest.raises(BadWeight):
        parse_net("place a\ntrans t : 0*a -> a\n")
    with pytest.raises(ParseError):
        parse_net("place a\ntrans t : 2 -> a\n")


def test_duplicate_designation():
    with pytest.raises(DuplicateDesignation):
        parse_net("place a initial\nplace b initial\n")
    with pytest.raises(DuplicateDesignation):
        parse_net("place a final\nplace b final\n")


def test_syntax_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_net("place a\nbogus line\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_net("trans t a -> b\n")  # missing colon


def test_empty_bags():
    parsed = parse_net("place a\ntrans t : -> a\ntrans u : a ->\n")
    assert parsed.net.pre_dict("t") == {}
    assert parsed.net.post_dict("u") == {}


def test_repeated_items_accumulate():
    parsed = parse_net("place a\nplace b\ntrans t : a, a -> 2*b, b\n")
    assert parsed.net.pre_dict("t") == {"a": 2}
    assert parsed.net.post_dict("t") == {"b": 3}


def test_roundtrip_fig1():
    for wf in fig1_examples():
        text = serialize_workflow(wf)
        parsed = parse_net(text)
        assert parsed.net == wf.net
        assert parsed.initial == wf.initial and parsed.final == wf.final
        # canonical documents are a fixpoint of parse . serialize
        assert serialize_net(parsed.net, parsed.initial, parsed.final) == text


def test_roundtrip_random_nets():
    for seed in range(25):
        wf = random_workflow(seed, places=5, transitions=5, max_weight=3)
        parsed = parse_net(serialize_workflow(wf))
        assert parsed.net == wf.net


def test_weighted_arc_rendering():
    net = parse_net("place a\nplace b\ntrans t : a -> 2*b\n").net
    assert "2*b" in serialize_net(net)


def test_empty_net_serializes_to_empty_document():
    net = parse_net("").net
    assert serialize_net(net) == ""


def test_header_comment_roundtrip():
    net = parse_net(MIDDLE).net
    text = serialize_net(net, header={"generator": "fig1"})
    assert text.startswith("# {")
    assert parse_net(text).net == net


def test_primed_names_roundtrip():
    text = "place i' initial\nplace o' final\ntrans t_in : i' -> o'\n"
    parsed = parse_net(text)
    assert parsed.net.places == ("i'", "o'")
    assert serialize_net(parsed.net, parsed.initial, parsed.final) == text
