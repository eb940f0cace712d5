import json

import numpy as np
import pytest
from hypothesis import given

from conichom.errors import ParameterError
from conichom.graph import VertexPairIndex, cycle, kneser, petersen
from conichom.homomorphisms import decide_hom, identity_witness
from conichom.io import (
    decision_to_dict, dumps_graph, dumps_matrix, graph_from_dict, load_graph, loads_graph,
    loads_matrix, matrix_from_dict, parse_generator, report_float, theta_to_dict,
    witness_from_dict, witness_to_dict,
)
from conichom.linalg import SymMatrix
from conichom.theta import ConeTag, theta
from oracles import graphs


@given(graphs(max_n=7))
def test_graph_round_trip(g):
    text = dumps_graph(g)
    assert loads_graph(text) == g
    assert dumps_graph(loads_graph(text)) == text


def test_graph_canonical_form():
    text = '{"n": 3, "edges": [[2, 1], [0, 1]]}'
    assert dumps_graph(loads_graph(text)) == '{"n":3,"edges":[[0,1],[1,2]]}'


@pytest.mark.parametrize("text", ['{"n": 2, "edges": [[0, 0]]}', '{"edges": []}', "[1, 2]",
                                  '{"n": "3"}', "not json", '{"n": 2, "edges": [[0, 1], [1, 0]]}'])
def test_graph_bad_input(text):
    with pytest.raises(ParameterError):
        loads_graph(text)


def test_generators():
    assert parse_generator("cycle:5") == cycle(5)
    assert parse_generator("petersen") == petersen()
    assert parse_generator("kneser:5:2") == kneser(5, 2)
    assert parse_generator("mystery") is None
    for bad in ("cycle", "cycle:x", "kneser:5", "cycle:2"):
        with pytest.raises(ParameterError):
            parse_generator(bad)


def test_load_graph_from_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"n": 4, "edges": [[0, 1], [2, 3]]}))
    assert load_graph(str(p)).num_edges == 2
    with pytest.raises(ParameterError):
        load_graph(str(tmp_path / "missing.json"))
    assert graph_from_dict({"n": 2}).num_edges == 0


def test_matrix_round_trip(rng):
    a = rng.standard_normal((6, 6))
    m = SymMatrix(a + a.T, VertexPairIndex(2, 3))
    back = loads_matrix(dumps_matrix(m))
    assert np.array_equal(back.data, m.data)
    assert back.labels == m.labels
    with pytest.raises(ParameterError):
        matrix_from_dict({"dim": 2, "rows": [[1.0]]})
    with pytest.raises(ParameterError):
        loads_matrix("{")


def test_witness_round_trip():
    w = identity_witness(cycle(5))
    back = witness_from_dict(json.loads(json.dumps(witness_to_dict(w))))
    assert back.x == w.x and back.y == w.y
    assert np.array_equal(back.h.data, w.h.data)
    assert back.valid()


def test_decision_and_theta_dicts():
    d = decision_to_dict(decide_hom(cycle(5), cycle(5), ConeTag.CP), include_matrix=True)
    assert d["verdict"] == "yes" and "witness" in d
    json.dumps(d)
    t = theta_to_dict(theta(cycle(5), ConeTag.SPLUS))
    assert t["value"] == 2.23606798
    assert report_float(1 / 3) == 0.333333333
