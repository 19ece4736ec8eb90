import json

import numpy as np
import pytest
from hypothesis import given

from bipres.core import BigradedMatrix, Grade
from bipres.firepio import (
    ParseError,
    parse_betti,
    parse_firep,
    parse_hilbert,
    parse_presentation,
    read_distance_matrix,
    read_point_cloud,
    serialize_betti,
    serialize_firep,
    serialize_hilbert,
    serialize_presentation,
    write_point_cloud,
)
from bipres.oracle import random_firep
from bipres.presentation import BettiTable, FIRep, Presentation, run_pipeline

from conftest import firep_seeds
from mutants import mutants

RUNNING = """firep v1
p 2
sizes 0 1 2
d2
1 0 ; 0:1
0 1 ; 0:1
d1
0 0 ;
"""


def test_parse_running_example(running_example):
    fr = parse_firep(RUNNING)
    assert fr == running_example
    assert serialize_firep(fr) == RUNNING


def test_parse_empty_document():
    fr = parse_firep("firep v1\np 3\nsizes 0 0 0\nd2\nd1\n")
    assert fr.sizes == (0, 0, 0) and fr.field.p == 3


@pytest.mark.parametrize(
    "text, reason, line",
    [
        ("firep v2\np 2\nsizes 0 0 0\nd2\nd1\n", "bad header", 1),
        ("firep v1\np 4\nsizes 0 0 0\nd2\nd1\n", "bad header", 2),
        ("firep v1\np 2\nsizes 0 1\nd2\nd1\n", "bad header", 3),
        (RUNNING.replace("1 0 ; 0:1\n0 1 ; 0:1", "0 1 ; 0:1\n1 0 ; 0:1"), "grades not colex-sorted", 6),
        (RUNNING.replace("1 0 ; 0:1", "1 0 ; 1:1"), "row index out of range", 5),
        (RUNNING.replace("p 2", "p 3").replace("1 0 ; 0:1", "1 0 ; 0:3"), "coefficient out of field", 5),
        (RUNNING.replace("1 0 ; 0:1", "1 0 ; 0:0"), "coefficient out of field", 5),
        ("firep v1\np 2\nsizes 1 1 1\nd2\n0 0 ; 0:1\nd1\n0 0 ; 0:1\n", "chain condition violated", 4),
    ],
)
def test_parse_errors(text, reason, line):
    with pytest.raises(ParseError) as exc:
        parse_firep(text)
    assert exc.value.reason == reason
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_homogeneity_checked_against_d1_grades():
    text = "firep v1\np 2\nsizes 0 1 1\nd2\n0 0 ; 0:1\nd1\n1 0 ;\n"
    with pytest.raises(ParseError, match="homogeneity"):
        parse_firep(text)


@given(firep_seeds())
def test_firep_round_trip(rng):
    fr = random_firep(rng, primes=(2, 3, 5, 7, 65521))
    text = serialize_firep(fr)
    back = parse_firep(text)
    assert serialize_firep(back) == text
    assert back.d2 == fr.d2
    assert np.array_equal(back.d1.to_dense(), fr.d1.to_dense())
    assert np.array_equal(back.d1.col_grades, fr.d1.col_grades)


@given(firep_seeds())
def test_every_mutant_rejected(rng):
    fr = random_firep(rng)
    text = serialize_firep(fr)
    parse_firep(text)
    for kind, bad in mutants(text, rng):
        assert bad != text
        with pytest.raises(ParseError):
            parse_firep(bad)


def test_serialize_betti_examples():
    bt = BettiTable({(0, 0): 1}, {(1, 0): 1, (0, 1): 1}, {(1, 1): 1})
    assert serialize_betti(bt) == "betti v1\nbeta0 1\n0 0 1\nbeta1 2\n0 1 1\n1 0 1\nbeta2 1\n1 1 1\n"
    assert serialize_betti(BettiTable()) == "betti v1\nbeta0 0\nbeta1 0\nbeta2 0\n"
    obj = json.loads(serialize_betti(bt, "json"))
    assert obj["beta1"] == [[0, 1, 1], [1, 0, 1]]


def test_serialize_presentation_without_columns():
    P = Presentation.from_columns(2, [], np.zeros((0, 2)), [(0, 0), (1, 2)])
    text = serialize_presentation(P)
    assert text.splitlines()[3:] == ["rows=2 cols=0", "0 0", "1 2"]
    assert parse_presentation(text) == P


@given(firep_seeds())
def test_result_round_trips(rng):
    res = run_pipeline(random_firep(rng))
    for fmt in ("text", "json"):
        assert parse_betti(serialize_betti(res.betti, fmt)) == res.betti
        for P in (res.semi_minimal, res.minimal):
            assert parse_presentation(serialize_presentation(P, fmt)) == P
        hf = parse_hilbert(serialize_hilbert(res.hilbert, fmt))
        assert hf == res.hilbert and np.array_equal(hf.values, res.hilbert.values)


def test_point_cloud_and_distance_readers():
    pts = read_point_cloud("# two points\n0 0\n1.5, 2\n")
    assert pts.tolist() == [[0.0, 0.0], [1.5, 2.0]]
    X = np.random.default_rng(0).normal(size=(4, 3))
    assert np.array_equal(read_point_cloud(write_point_cloud(X)), X)
    D = read_distance_matrix("0 1 2\n1 0 3\n2 3 0\n")
    assert D[1, 2] == 3
    for bad in ["0 1\n2 0\n", "0 1\n", "1 0\n0 1\n", "0 x\nx 0\n", ""]:
        with pytest.raises(ParseError):
            read_distance_matrix(bad)
