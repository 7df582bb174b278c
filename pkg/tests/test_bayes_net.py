import networkx as nx
import numpy as np
import pytest

from core.errors import ConfigurationError, DistributionError
from graphs import inference
from graphs.bayes_net import BayesNet, bernoulli_likelihoods
from graphs.dseparation import d_connected, d_separated
from graphs.inference import conditional_on, joint_table, marginal

BINARY = (0, 1)


def chain(p=0.6):
    """a -> b -> c over {0, 1}; each child copies its parent with probability p."""
    copy = [[p, 1 - p], [1 - p, p]]
    return BayesNet([("a", BINARY), ("b", BINARY), ("c", BINARY)], [("a", "b"), ("b", "c")],
                    {"a": [0.5, 0.5], "b": copy, "c": copy}, id="chain")


def random_net(rng, size):
    nodes = [(f"v{k}", tuple(range(int(rng.integers(2, 4))))) for k in range(size)]
    edges = [(f"v{u}", f"v{v}") for v in range(size) for u in range(v) if rng.random() < 0.5]
    net = BayesNet(nodes, edges, {name: "uniform" for name, _ in nodes})
    cpts = {}
    for name, support in nodes:
        rows = int(np.prod(net.parent_cards(name)))
        cpts[name] = rng.dirichlet(np.ones(len(support)), size=rows).tolist()
    return BayesNet(nodes, edges, cpts, id=f"random{size}")


class TestConstruction:
    def test_flat_and_nested_layouts_agree(self):
        nodes = [("a", BINARY), ("b", BINARY), ("c", (0, 1, 2))]
        edges = [("a", "c"), ("b", "c")]
        flat = [[0.2, 0.3, 0.5], [0.1, 0.1, 0.8], [0.3, 0.3, 0.4], [0.6, 0.2, 0.2]]
        nested = np.array(flat).reshape(2, 2, 3).tolist()
        roots = {"a": [0.4, 0.6], "b": [0.5, 0.5]}
        first = BayesNet(nodes, edges, {**roots, "c": flat})
        second = BayesNet(nodes, edges, {**roots, "c": nested})
        assert first.cpts["c"].shape == (2, 2, 3)
        np.testing.assert_array_equal(first.cpts["c"], second.cpts["c"])
        # parents in edge order: row (a=1, b=0) is the third flat row
        np.testing.assert_array_equal(first.cpts["c"][1, 0], [0.3, 0.3, 0.4])

    def test_uniform_shorthand(self):
        net = BayesNet([("a", (0, 1, 2, 3))], [], {"a": "uniform"})
        np.testing.assert_allclose(net.cpts["a"], 0.25)

    def test_unknown_shorthand(self):
        with pytest.raises(DistributionError):
            BayesNet([("a", BINARY)], [], {"a": "flat"})

    def test_cycle(self):
        with pytest.raises(ConfigurationError, match="cycle"):
            BayesNet([("a", BINARY), ("b", BINARY)], [("a", "b"), ("b", "a")], {"a": "uniform", "b": "uniform"})

    def test_unknown_edge_node(self):
        with pytest.raises(ConfigurationError):
            BayesNet([("a", BINARY)], [("a", "z")], {"a": "uniform"})

    def test_missing_cpt(self):
        with pytest.raises(DistributionError, match="no CPT"):
            BayesNet([("a", BINARY), ("b", BINARY)], [], {"a": "uniform"})

    def test_row_must_sum_to_one(self):
        with pytest.raises(DistributionError, match="sums to"):
            BayesNet([("a", BINARY)], [], {"a": [0.5, 0.6]})

    def test_wrong_row_count(self):
        with pytest.raises(DistributionError):
            BayesNet([("a", BINARY), ("b", BINARY)], [("a", "b")], {"a": "uniform", "b": [0.5, 0.5]})

    def test_index_of(self):
        net = chain()
        assert net.index_of("a", 1.0) == 1
        with pytest.raises(ConfigurationError):
            net.index_of("a", 2)

    def test_bernoulli_likelihoods(self):
        laws = bernoulli_likelihoods([0.2, 0.8])
        assert laws[1].probs.tolist() == pytest.approx([0.2, 0.8])
        with pytest.raises(DistributionError):
            bernoulli_likelihoods([1.2])


class TestInference:
    def test_chain_marginal(self):
        # P(c = a) = 0.6^2 + 0.4^2
        pair = marginal(chain(), ["a", "c"])
        assert pair[0, 0] + pair[1, 1] == pytest.approx(0.52)

    def test_joint_sums_to_one(self):
        assert joint_table(chain()).sum() == pytest.approx(1.0)

    def test_keep_order_is_respected(self):
        net = chain(0.9)
        np.testing.assert_allclose(marginal(net, ["c", "a"]), marginal(net, ["a", "c"]).T)

    def test_unknown_node(self):
        with pytest.raises(ConfigurationError):
            marginal(chain(), ["z"])

    def test_conditional_on(self):
        prior, cond = conditional_on(chain(), "a", ["b"])
        np.testing.assert_allclose(prior, [0.5, 0.5])
        np.testing.assert_allclose(cond, [[0.6, 0.4], [0.4, 0.6]])

    def test_zero_probability_rows_stay_zero(self):
        net = BayesNet([("a", BINARY), ("b", BINARY)], [("a", "b")],
                       {"a": [1.0, 0.0], "b": [[0.5, 0.5], [0.1, 0.9]]})
        prior, cond = conditional_on(net, "a", ["b"])
        assert prior[1] == 0
        np.testing.assert_array_equal(cond[1], [0.0, 0.0])

    def test_variable_elimination_matches_joint_table(self, rng, monkeypatch):
        for size in range(2, 7):
            net = random_net(rng, size)
            keeps = [[n] for n in net.nodes] + [net.nodes[:2], net.nodes[::-1][:3]]
            expected = [marginal(net, keep) for keep in keeps]
            monkeypatch.setattr(inference, "MAX_JOINT_BITS", 0)
            for keep, table in zip(keeps, expected):
                np.testing.assert_allclose(marginal(net, keep), table, atol=1e-12)
            monkeypatch.undo()


class TestDSeparation:
    example = nx.DiGraph([("phi_g", "phi_i"), ("phi_i", "phi_s"), ("phi_g", "phi_h"), ("phi_g", "phi_w")])

    def test_parent_separates_siblings(self):
        assert d_separated(self.example, "phi_i", {"phi_h", "phi_w"}, {"phi_g"})

    def test_common_cause_connects(self):
        assert not d_separated(self.example, "phi_i", {"phi_h"})

    def test_child_blocks_nothing_upstream(self):
        assert not d_separated(self.example, "phi_i", {"phi_h"}, {"phi_s"})

    def test_collider(self):
        graph = nx.DiGraph([("a", "c"), ("b", "c"), ("c", "d")])
        assert d_separated(graph, "a", {"b"})
        assert not d_separated(graph, "a", {"b"}, {"c"})
        assert not d_separated(graph, "a", {"b"}, {"d"})

    def test_d_connected(self):
        assert d_connected(self.example, "phi_i") == {"phi_g", "phi_s", "phi_h", "phi_w"}
        assert d_connected(self.example, "phi_i", {"phi_g"}) == {"phi_s"}
        assert d_connected(self.example, "phi_h", {"phi_g"}) == set()

    def test_observed_source(self):
        with pytest.raises(ConfigurationError):
            d_connected(self.example, "phi_i", {"phi_i"})

    def test_empty_remote_set(self):
        assert d_separated(self.example, "phi_i", set(), {"phi_g"})

    def test_protected_node_in_separator(self):
        with pytest.raises(ConfigurationError):
            d_separated(self.example, "phi_i", {"phi_h"}, {"phi_i"})

    def test_overlapping_sets(self):
        with pytest.raises(ConfigurationError):
            d_separated(self.example, "phi_i", {"phi_h"}, {"phi_h"})

    def test_unknown_node(self):
        with pytest.raises(ConfigurationError):
            d_separated(self.example, "phi_x", {"phi_h"})
