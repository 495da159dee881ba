import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_model
from monobayes.exceptions import DomainError, ModelError
from monobayes.model import (
    CPT,
    Edge,
    MonotoneSign,
    ParentConfigIndexer,
    QualitativeModel,
    Variable,
    config_of_index,
    index_config,
    star_model,
    validate_model,
)
from oracles import mixed_radix

cards_strategy = st.lists(st.integers(2, 5), min_size=0, max_size=4).map(tuple)


def test_indexer_last_parent_fastest():
    ix = ParentConfigIndexer((3, 3))
    assert ix.q == 9
    assert ix.index((1, 2)) == 5
    assert ix.config(5) == (1, 2)
    assert list(ix.strides) == [3, 1]


def test_indexer_without_parents_has_one_row():
    ix = ParentConfigIndexer(())
    assert ix.q == 1
    assert ix.index(()) == 0
    assert ix.config(0) == ()


@given(cards_strategy, st.data())
def test_indexer_is_a_bijection(cards, data):
    ix = ParentConfigIndexer(cards)
    codes = [ix.index(ix.config(j)) for j in range(ix.q)]
    assert codes == list(range(ix.q))
    values = tuple(data.draw(st.integers(0, c - 1)) for c in cards)
    assert ix.index(values) == mixed_radix(values, cards)
    assert index_config(ix, values) == ix.index(values)
    assert config_of_index(ix, ix.index(values)) == values


@given(cards_strategy.filter(len), st.data())
def test_index_array_matches_scalar_index(cards, data):
    ix = ParentConfigIndexer(cards)
    rows = data.draw(st.lists(st.tuples(*[st.integers(0, c - 1) for c in cards]),
                              min_size=1, max_size=10))
    np.testing.assert_array_equal(ix.index_array(np.array(rows)), [ix.index(r) for r in rows])


@pytest.mark.parametrize("values", [(3, 0), (0, -1), (0,)])
def test_indexer_rejects_bad_values(values):
    with pytest.raises(DomainError):
        ParentConfigIndexer((3, 3)).index(values)


def test_indexer_rejects_bad_index():
    with pytest.raises(DomainError):
        ParentConfigIndexer((2, 2)).config(4)


def test_sign_parsing():
    assert MonotoneSign.parse("Q+") is MonotoneSign.ISOTONE
    assert MonotoneSign.parse("q-") is MonotoneSign.ANTITONE
    assert not MonotoneSign.parse("none").annotated
    with pytest.raises(DomainError):
        MonotoneSign.parse("up")


def test_parents_follow_edge_declaration_order():
    m = make_model({"a": 2, "b": 3, "y": 2},
                   [("b", "y", "q+"), ("a", "y", "none")], "y")
    assert m.parents("y") == ("b", "a")
    assert m.indexer("y").cardinalities == (3, 2)
    assert m.annotated_parents("y") == ("b",)
    assert m.children("b") == ("y",)
    assert m.feature_names == ("a", "b")


def test_topological_order_puts_parents_first():
    m = make_model({"c": 2, "b": 2, "a": 2},
                   [("a", "b", "q+"), ("b", "c", "q+")], "c")
    order = m.topological_order()
    assert order.index("a") < order.index("b") < order.index("c")


@pytest.mark.parametrize("variables, edges, cls, fragment", [
    ([("a", 2), ("a", 2)], [], "a", "duplicate"),
    ([("a", 1), ("y", 2)], [], "y", "cardinality"),
    ([("a", 2)], [], "y", "class"),
    ([("a", 2), ("y", 2)], [("z", "y")], "y", "undeclared"),
    ([("a", 2), ("y", 2)], [("a", "a")], "y", "self"),
    ([("a", 2), ("y", 2)], [("a", "y"), ("a", "y")], "y", "duplicate"),
    ([("a", 2), ("y", 2)], [("a", "y"), ("y", "a")], "y", "cycle"),
])
def test_validation_reports_each_defect(variables, edges, cls, fragment):
    m = QualitativeModel(tuple(Variable(n, c) for n, c in variables),
                         tuple(Edge(p, c) for p, c in edges), cls)
    report = validate_model(m)
    assert not report.ok
    assert any(fragment in v.lower() for v in report.violations), report.violations
    with pytest.raises(ModelError):
        m.check()


def test_valid_model_passes_validation():
    m = make_model({"a": 2, "y": 2}, [("a", "y", "q+")], "y")
    assert validate_model(m).ok


def test_star_model_drops_knowledge_edges():
    m = make_model({"a": 3, "b": 2, "y": 2},
                   [("a", "y", "q+"), ("a", "b", "q-")], "y")
    s = star_model(m)
    assert set(s.parents("a")) == {"y"} and set(s.parents("b")) == {"y"}
    assert s.parents("y") == ()
    assert not any(e.sign.annotated for e in s.edges)


def test_with_cardinalities_rebinds_states():
    m = make_model({"a": 2, "y": 2}, [("a", "y", "q+")], "y")
    assert m.with_cardinalities({"a": 5}).cardinality("a") == 5


def test_cpt_validates_rows_and_is_read_only():
    cpt = CPT("y", np.array([[0.25, 0.75], [0.5, 0.5]]))
    assert (cpt.q, cpt.r) == (2, 2)
    with pytest.raises(ValueError):
        cpt.table[0, 0] = 1.0
    with pytest.raises(DomainError):
        CPT("y", np.array([[0.2, 0.7]]))
    with pytest.raises(DomainError):
        CPT("y", np.array([[1.2, -0.2]]))
