import math

import networkx as nx
import pytest

from core.dataset import Dataset
from core.domains import AttributeDomain
from core.errors import ConfigurationError, UnsupportedMechanismError
from core.loader import parse_framework
from core.query import evaluate_query
from graphs.quilts import MarkovQuilt, enumerate_quilts
from mechanisms.markov_quilt import apmqm, baseline_mqm, entry_choices, quilt_choices

from tests.test_bayes_net import random_net

LN_1_5 = math.log(1.5)
COPY = [[0.6, 0.4], [0.4, 0.6]]


def value_network(size, edges, cpts):
    nodes = [f"x[{k}]" for k in range(size)]
    doc = {
        "framework_id": f"entries{size}",
        "attributes": [{"name": "x", "domain": {"values": [0, 1]}}],
        "sensitive": [],
        "theta": {"variant": "value_network",
                  "nodes": [{"id": v, "support": [0, 1]} for v in nodes],
                  "edges": [[nodes[u], nodes[v]] for u, v in edges],
                  "members": [{"id": "theta", "cpts": {nodes[k]: c for k, c in enumerate(cpts)}}]},
        "query": {"kind": "column_sum", "attribute": "x"},
    }
    framework = parse_framework(doc)
    values = [k % 2 for k in range(size)]
    return framework, Dataset.from_columns({"x": values}, {"x": AttributeDomain.finite([0, 1])})


def names(quilts):
    return [(sorted(q.Q), sorted(q.N), sorted(q.R)) for q in quilts]


def trail_is_active(graph, trail, Q, descendants):
    for a, v, b in zip(trail, trail[1:], trail[2:]):
        if graph.has_edge(a, v) and graph.has_edge(b, v):
            if v not in Q and not (descendants[v] & Q):
                return False
        elif v in Q:
            return False
    return True


def separated_by_trails(graph, i, R, Q):
    """d-separation decided by enumerating every simple trail from i into R."""
    skeleton = graph.to_undirected()
    descendants = {v: nx.descendants(graph, v) for v in graph}
    return not any(trail_is_active(graph, trail, Q, descendants)
                   for r in R for trail in nx.all_simple_paths(skeleton, i, r))


class TestEnumeration:
    def test_example_network(self, bundled):
        fw, _ = bundled("student_height")
        net = fw.theta.members[0].net
        assert names(enumerate_quilts(net, "phi_i", 1)) == [(["phi_g"], ["phi_i", "phi_s"], ["phi_h", "phi_w"])]

    def test_empty_remote_sets_are_dropped(self, bundled):
        fw, _ = bundled("student_height")
        net = fw.theta.members[0].net
        assert enumerate_quilts(net, "phi_i", 0) == []
        for quilt in enumerate_quilts(net, "phi_i", 4):
            assert quilt.R

    def test_order_by_size_then_names(self, bundled):
        fw, _ = bundled("student_height")
        quilts = enumerate_quilts(fw.theta.members[0].net, "phi_i", 2)
        keys = [(len(q.Q), sorted(q.Q)) for q in quilts]
        assert keys == sorted(keys)

    def test_independent_nodes_need_no_quilt(self):
        fw, _ = value_network(3, [], ["uniform"] * 3)
        quilts = enumerate_quilts(fw.theta.members[0], "x[0]", 0)
        assert names(quilts) == [([], ["x[0]"], ["x[1]", "x[2]"])]

    def test_quilts_agree_with_trail_enumeration(self, rng):
        for _ in range(20):
            net = random_net(rng, int(rng.integers(2, 9)))
            graph = net.graph
            for i in net.nodes:
                for quilt in enumerate_quilts(net, i, 2):
                    assert separated_by_trails(graph, i, quilt.R, quilt.Q)
                    for v in quilt.N - {i}:
                        assert not separated_by_trails(graph, i, {v}, quilt.Q)

    def test_size_is_clamped(self):
        fw, _ = value_network(3, [], ["uniform"] * 3)
        assert len(enumerate_quilts(fw.theta.members[0], "x[0]", 10)) == 3

    def test_negative_size(self):
        fw, _ = value_network(2, [], ["uniform"] * 2)
        with pytest.raises(ConfigurationError):
            enumerate_quilts(fw.theta.members[0], "x[0]", -1)

    def test_overlapping_sets_are_rejected(self):
        with pytest.raises(ConfigurationError):
            MarkovQuilt("a", frozenset({"b"}), frozenset({"a", "b"}), frozenset({"c"}))


class TestApmqm:
    def test_count_outside_the_nearby_set_is_exact(self, bundled):
        fw, X = bundled("student_height")
        report = apmqm(X, fw.query, fw, epsilon=1.0, max_quilt_size=3, rng_seed=0)
        choice = report.choices[0]
        assert choice.attribute == "i"
        assert choice.chosen.quilt.Q == frozenset({"phi_g"})
        assert choice.chosen.influence == pytest.approx(LN_1_5)
        assert report.scale == 0
        assert report.exact
        assert report.output == evaluate_query(fw.query, X) == 5

    def test_count_touching_the_nearby_set_keeps_fallback(self, bundled):
        fw, X = bundled("student_height_sat")
        report = apmqm(X, fw.query, fw, epsilon=1.0, max_quilt_size=3, rng_seed=0)
        choice = report.choices[0]
        n = X.n
        assert choice.fallback == pytest.approx(n)
        assert choice.chosen is None
        assert report.scale == pytest.approx(n)
        first = choice.candidates[0]
        assert first.quilt.Q == frozenset({"phi_g"})
        assert first.quilt.N == frozenset({"phi_i", "phi_s"})
        assert first.quilt.R == frozenset({"phi_h", "phi_w"})
        assert first.scale == pytest.approx(n / (1 - LN_1_5))

    def test_small_epsilon_falls_back(self, bundled):
        fw, X = bundled("student_height")
        choice = quilt_choices(X, fw.query, fw, epsilon=0.3, max_quilt_size=3)[0]
        assert all(not c.admissible for c in choice.candidates)
        assert choice.scale == choice.fallback == pytest.approx(X.n / 0.3)

    def test_rejects_other_classes(self, bundled):
        fw, X = bundled("gaussian_weight_sat")
        with pytest.raises(UnsupportedMechanismError):
            apmqm(X, fw.query, fw, 1.0, 3, rng_seed=0)

    def test_report_document(self, bundled):
        fw, X = bundled("student_height_sat")
        doc = apmqm(X, fw.query, fw, 1.0, 3, rng_seed=0).to_document()
        assert doc["quilts"][0]["quilt"] is None
        assert "noise" not in doc
        inadmissible = [c for c in doc["quilts"][0]["candidates"] if not c["admissible"]]
        assert inadmissible and all(c["scale"] == "inf" for c in inadmissible)


class TestBaseline:
    def test_bundled_chain(self, bundled):
        fw, Y = bundled("value_chain")
        report = baseline_mqm(Y, fw.query, 1.0, fw, epsilon=1.0, rng_seed=0)
        scales = [c.scale for c in report.choices]
        assert scales[0] == pytest.approx(1 / (1 - LN_1_5))
        assert scales[1] == pytest.approx(2 / (1 - LN_1_5))
        assert scales[2] == pytest.approx(2 / (1 - LN_1_5))
        assert scales[3] == pytest.approx(1 / (1 - LN_1_5))
        assert report.scale == pytest.approx(2 / (1 - LN_1_5))
        assert report.extras["b_max"] == pytest.approx(2 / (1 - LN_1_5))

    def test_lipschitz_scales_the_noise(self, bundled):
        fw, Y = bundled("value_chain")
        report = baseline_mqm(Y, fw.query, 2.5, fw, epsilon=1.0, rng_seed=0)
        assert report.scale == pytest.approx(5 / (1 - LN_1_5))

    def test_independent_entries(self):
        fw, Y = value_network(3, [], ["uniform"] * 3)
        report = baseline_mqm(Y, fw.query, 1.0, fw, epsilon=0.5, rng_seed=0)
        assert all(c.scale == pytest.approx(2.0) for c in report.choices)
        assert report.scale == pytest.approx(2.0)

    def test_middle_of_short_chain_uses_the_trivial_quilt(self):
        fw, Y = value_network(3, [(0, 1), (1, 2)], ["uniform", COPY, COPY])
        choices = entry_choices(Y, fw, 1.0, 3)
        [only] = choices[1].candidates
        assert (only.quilt.Q, only.quilt.R) == (frozenset(), frozenset())
        assert only.quilt.N == frozenset({"x[0]", "x[1]", "x[2]"})
        assert only.influence == 0
        assert choices[1].scale == pytest.approx(3.0)
        report = baseline_mqm(Y, fw.query, 1.0, fw, epsilon=1.0, rng_seed=0)
        assert report.scale == pytest.approx(3.0)

    def test_two_entry_chain(self):
        fw, Y = value_network(2, [(0, 1)], ["uniform", COPY])
        report = baseline_mqm(Y, fw.query, 1.0, fw, epsilon=1.0, rng_seed=0)
        assert [c.scale for c in report.choices] == pytest.approx([2.0, 2.0])
        assert report.scale == pytest.approx(2.0)

    def test_trivial_quilt_bounds_every_entry(self, bundled):
        fw, Y = bundled("value_chain")
        for epsilon in (0.05, 0.3, 1.0):
            choices = entry_choices(Y, fw, epsilon, 3)
            assert all(c.scale <= 4 / epsilon + 1e-12 for c in choices)
            assert all(c.candidates[0].quilt.Q == frozenset() for c in choices)

    def test_zero_lipschitz_is_exact(self):
        fw, Y = value_network(3, [(0, 1), (1, 2)], ["uniform", COPY, COPY])
        report = baseline_mqm(Y, fw.query, 0.0, fw, epsilon=1.0, rng_seed=0)
        assert report.scale == 0
        assert report.output == evaluate_query(fw.query, Y)

    @pytest.mark.parametrize("L", [-1.0, math.inf])
    def test_invalid_lipschitz(self, bundled, L):
        fw, Y = bundled("value_chain")
        with pytest.raises(ConfigurationError):
            baseline_mqm(Y, fw.query, L, fw, epsilon=1.0, rng_seed=0)

    def test_entries_must_match_nodes(self, bundled):
        fw, _ = bundled("value_chain")
        Y = Dataset.from_columns({"x": [0, 1, 1]}, {"x": AttributeDomain.finite([0, 1])})
        with pytest.raises(ConfigurationError):
            baseline_mqm(Y, fw.query, 1.0, fw, epsilon=1.0, rng_seed=0)
