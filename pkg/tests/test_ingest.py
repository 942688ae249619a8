from __future__ import annotations

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osbop.core import parse_bucket_order, to_matrix, validate_pair_order_matrix
from osbop.errors import InvalidMatrix, PreflibParseError
from osbop.ingest import Profile, build_matrix, parse_preflib, read_matrix, read_preflib, write_matrix
from osbop.reference import DATASET_4_2, FOOD


def preflib(n: int, body: str) -> str:
    return f"# FILE NAME: test.toi\n# NUMBER ALTERNATIVES: {n}\n" + body


def tally(n: int, votes: list[tuple[int, list[list[int]]]]) -> np.ndarray:
    """Independent per-pair count straight from rank positions."""
    c = np.full((n, n), 0.5)
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u == v:
                continue
            num = den = 0.0
            for mult, groups in votes:
                level = {x: i for i, g in enumerate(groups) for x in g}
                if u in level and v in level:
                    den += mult
                    if level[u] < level[v]:
                        num += mult
                    elif level[u] == level[v]:
                        num += mult / 2
            if den:
                c[u - 1, v - 1] = num / den
    return c


def as_profile(n, votes):
    return Profile(n, [(m, tuple(frozenset(g) for g in groups)) for m, groups in votes])


votes_strategy = st.integers(2, 5).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.tuples(
                st.integers(1, 9),
                st.permutations(range(1, n + 1)).flatmap(
                    lambda perm: st.tuples(st.just(perm), st.integers(1, len(perm)),
                                           st.lists(st.booleans(), min_size=len(perm), max_size=len(perm)))
                ),
            ),
            min_size=1,
            max_size=8,
        ),
    )
)


def decode_votes(raw):
    """Turn (perm, kept prefix, tie flags) draws into tie-grouped incomplete votes."""
    n, items = raw
    votes = []
    for mult, (perm, keep, ties) in items:
        groups: list[list[int]] = []
        for x, tie in zip(perm[:keep], ties):
            if groups and tie:
                groups[-1].append(x)
            else:
                groups.append([x])
        votes.append((mult, groups))
    return n, votes


# -- parsing --------------------------------------------------------------


def test_parse_tie_group():
    prof = parse_preflib(preflib(3, "3: 1,{2,3}\n"))
    assert prof.votes == [(3, (frozenset({1}), frozenset({2, 3})))]


def test_parse_strict_and_incomplete():
    prof = parse_preflib(preflib(3, "2: 3,1,2\n1: 2\n"))
    assert prof.votes[0] == (2, (frozenset({3}), frozenset({1}), frozenset({2})))
    assert prof.votes[1] == (1, (frozenset({2}),))
    assert prof.voters == 3


def test_parse_names_and_warning(caplog):
    text = preflib(2, "# ALTERNATIVE NAME 1: apple\n# ALTERNATIVE NAME 2: pear\n1: 1,2\n")
    with caplog.at_level(logging.WARNING, logger="osbop.ingest"):
        prof = parse_preflib(text, source="x.soc")
    assert prof.names == {1: "apple", 2: "pear"}
    assert prof.source == "x.soc"
    assert sum("FILE NAME" in r.message for r in caplog.records) == 1


@pytest.mark.parametrize(
    "body,line,match",
    [
        ("1: 1,2\n0: 2,1\n", 4, "multiplicity"),
        ("1: 1,4\n", 3, "outside"),
        ("1: 1,{2,1}\n", 3, "twice"),
        ("x: 1,2\n", 3, "multiplicity"),
        ("1 1,2\n", 3, "multiplicity: ranking"),
        ("1: 1,{2,3\n", 3, "unclosed"),
        ("1: 1,a\n", 3, "label"),
        ("1: 1,2,\n", 3, "trailing"),
    ],
)
def test_parse_errors_carry_line_numbers(body, line, match):
    with pytest.raises(PreflibParseError, match=match) as info:
        parse_preflib(preflib(3, body))
    assert info.value.line == line


def test_vote_before_header():
    with pytest.raises(PreflibParseError):
        parse_preflib("# TITLE: x\n1: 1,2\n# NUMBER ALTERNATIVES: 2\n")


def test_legacy_format():
    text = "3\n1,a\n2,b\n3,c\n6,6,2\n4,1,2,3\n2,3,{1,2}\n"
    prof = parse_preflib(text)
    assert prof.n == 3
    assert prof.names == {1: "a", 2: "b", 3: "c"}
    assert prof.votes[1] == (2, (frozenset({3}), frozenset({1, 2})))


def test_read_preflib_file(tmp_path):
    path = tmp_path / "food.toc"
    path.write_text(preflib(4, "60: {1,2},{3,4}\n40: {3,4},{1,2}\n"))
    prof = read_preflib(path)
    assert prof.source == "food.toc"
    assert np.array_equal(build_matrix(prof), FOOD)


# -- matrix construction --------------------------------------------------


def test_food_profile_gives_food_matrix():
    prof = parse_preflib(preflib(4, "60: {1,2},{3,4}\n40: {3,4},{1,2}\n"))
    assert np.array_equal(build_matrix(prof), FOOD)


def test_single_strict_vote():
    prof = parse_preflib(preflib(3, "1: 1,2,3\n"))
    assert np.array_equal(build_matrix(prof), to_matrix(parse_bucket_order("1|2|3")))


def test_unobserved_pair_defaults_to_half():
    prof = parse_preflib(preflib(3, "1: 1,2\n"))
    c = build_matrix(prof)
    assert c[0, 2] == c[2, 0] == c[1, 2] == 0.5
    assert c[0, 1] == 1.0


def test_mixed_incomplete_votes_match_tally():
    votes = [(3, [[1], [2, 3]]), (2, [[3], [1], [2]]), (1, [[2]]), (4, [[2, 3]]), (1, [[3], [1]])]
    assert np.allclose(build_matrix(as_profile(3, votes)), tally(3, votes), atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(votes_strategy)
def test_build_matrix_properties(raw):
    n, votes = decode_votes(raw)
    c = build_matrix(as_profile(n, votes))
    validate_pair_order_matrix(c)
    assert np.allclose(c, tally(n, votes), atol=1e-12)
    doubled = [(2 * m, g) for m, g in votes]
    assert np.allclose(build_matrix(as_profile(n, doubled)), c, atol=1e-12)
    assert np.allclose(build_matrix(as_profile(n, votes[::-1])), c, atol=1e-12)
    reversed_votes = [(m, g[::-1]) for m, g in votes]
    assert np.allclose(build_matrix(as_profile(n, reversed_votes)), c.T, atol=1e-12)
    assert np.array_equal(read_matrix(write_matrix(c)), c)


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile(2, [(0, (frozenset({1}),))])
    with pytest.raises(ValueError):
        Profile(2, [(1, (frozenset({3}),))])


# -- matrix files ---------------------------------------------------------


def test_round_trip_dataset_4_2():
    text = write_matrix(DATASET_4_2)
    assert np.array_equal(read_matrix(text), DATASET_4_2)
    assert text.splitlines()[1] == "0.5,0.7046,0.4934"


def test_food_file_layout():
    lines = write_matrix(FOOD).splitlines()
    assert len(lines) == 5 and lines[0] == "4"


def test_all_half_is_valid():
    assert np.array_equal(read_matrix("2\n0.5,0.5\n0.5,0.5\n"), np.full((2, 2), 0.5))


def test_small_gap_is_symmetrized():
    c = read_matrix("2\n0.5,0.7000004\n0.3,0.5\n")
    assert c[0, 1] + c[1, 0] == pytest.approx(1.0, abs=1e-15)
    assert c[0, 1] == pytest.approx(0.7000002, abs=1e-12)


@pytest.mark.parametrize(
    "text,match",
    [
        ("2\n0.5,0.7\n0.4,0.5\n", "complementarity"),
        ("2\n0.5,0.7\n", "rows"),
        ("2\n0.5,0.7,0.1\n0.3,0.5\n", "entries"),
        ("2\n0.5,1.2\n-0.2,0.5\n", r"\[0, 1\]"),
        ("2\n0.6,0.5\n0.5,0.5\n", "diagonal"),
        ("x\n", "first line"),
        ("", "empty"),
        ("2\n0.5,abc\n0.3,0.5\n", "non-numeric"),
    ],
)
def test_read_matrix_errors(text, match):
    with pytest.raises(InvalidMatrix, match=match):
        read_matrix(text)
