import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from core.errors import ConfigurationError, UnsupportedMechanismError, VacuousSecretError
from core.loader import parse_framework
from core.query import evaluate_query
from distributions.discrete import DiscreteDistribution
from distributions.record_models import (
    AffineMapping,
    BinaryDependenceModel,
    conditional_count_distribution,
    conditional_count_distribution_param,
)
from distributions.wasserstein import w_infinity
from mechanisms.wasserstein import pair_distances, secret_laws, wasserstein_mechanism
from reproduction.tables import DISTANCE_FRAMEWORKS, count_table, parameter_table

TABLE_ROW = [0.0256, 0.1536, 0.3456, 0.3456, 0.1296]


def bottleneck(mu, nu):
    """Smallest threshold t admitting a coupling supported on pairs at distance <= t."""
    gaps = np.abs(np.subtract.outer(mu.support, nu.support))
    thresholds = np.unique(gaps)

    def feasible(t):
        allowed = np.argwhere(gaps <= t + 1e-12)
        A = np.zeros((len(mu) + len(nu), len(allowed)))
        for k, (i, j) in enumerate(allowed):
            A[i, k] = 1.0
            A[len(mu) + j, k] = 1.0
        b = np.concatenate([mu.probs, nu.probs])
        result = linprog(np.zeros(len(allowed)), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        return result.status == 0

    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(thresholds[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(thresholds[lo])


def rational(rng, size):
    support = np.sort(rng.choice(np.arange(-10, 11), size=size, replace=False)).astype(float)
    weights = rng.integers(1, 9, size=size)
    return DiscreteDistribution(support, weights / weights.sum())


atoms = st.dictionaries(st.integers(-20, 20), st.integers(1, 10), min_size=1, max_size=6)


def law(raw):
    return DiscreteDistribution.from_atoms(raw.items(), normalize=True)


class TestWInfinity:
    def test_identical(self):
        p = DiscreteDistribution.binomial(4, 0.3)
        assert w_infinity(p, p) == 0

    def test_point_masses(self):
        assert w_infinity(DiscreteDistribution.point(1.0), DiscreteDistribution.point(3.5)) == 2.5

    def test_table_rows(self):
        assert w_infinity(DiscreteDistribution.binomial(4, 0.6), DiscreteDistribution.binomial(4, 0.4)) == 1.0

    def test_split_mass(self):
        mu = DiscreteDistribution.from_atoms([(0, 0.5), (10, 0.5)])
        nu = DiscreteDistribution.point(5.0)
        assert w_infinity(mu, nu) == 5.0

    def test_mass_rounding_above_one(self):
        mu = DiscreteDistribution(np.array([0.0, 1.0, 9.0]), np.array([0.5, 0.5 + 5e-10, 0.0]))
        nu = DiscreteDistribution(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
        assert w_infinity(mu, nu) == 0
        assert w_infinity(nu, mu) == 0

    def test_matches_bottleneck_coupling(self, rng):
        for _ in range(500):
            mu = rational(rng, int(rng.integers(1, 9)))
            nu = rational(rng, int(rng.integers(1, 9)))
            assert w_infinity(mu, nu) == pytest.approx(bottleneck(mu, nu), abs=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(atoms, atoms, atoms)
    def test_metric(self, a, b, c):
        mu, nu, rho = law(a), law(b), law(c)
        assert w_infinity(mu, mu) == 0
        assert w_infinity(mu, nu) == pytest.approx(w_infinity(nu, mu))
        assert w_infinity(mu, rho) <= w_infinity(mu, nu) + w_infinity(nu, rho) + 1e-9

    @settings(max_examples=200, deadline=None)
    @given(atoms, atoms, st.integers(-5, 5), st.integers(-30, 30))
    def test_affine_maps(self, a, b, k, shift):
        mu, nu = law(a), law(b)
        base = w_infinity(mu, nu)
        assert w_infinity(mu.affine(1.0, shift), nu.affine(1.0, shift)) == pytest.approx(base)
        if k != 0:
            assert w_infinity(mu.affine(k), nu.affine(k)) == pytest.approx(abs(k) * base)


class TestConditionalCounts:
    def test_count_table(self):
        table = count_table()
        assert table["g(X_2)=0"].probs.tolist() == pytest.approx(TABLE_ROW, abs=1e-12)
        assert table["g(X_2)=4"].probs.tolist() == pytest.approx(TABLE_ROW[::-1], abs=1e-12)

    def test_parameter_table(self):
        table = parameter_table()
        expected = [0.0983, 0.3091, 0.3643, 0.1908, 0.0375]
        assert table["phi_2=0.8"].probs.tolist() == pytest.approx(expected, abs=5e-5)
        assert table["phi_2=0.2"].probs.tolist() == pytest.approx(expected[::-1], abs=5e-5)

    def test_mapping_from_dependence(self):
        mapping = AffineMapping.from_dependence(0.4, 0.6)
        assert mapping(0.8) == pytest.approx(0.44)
        assert conditional_count_distribution_param(4, 0.8, mapping).probs == pytest.approx(
            parameter_table()["phi_2=0.8"].probs)

    def test_enumeration_over_records(self, rng):
        n = 4
        for _ in range(5):
            p1, p2 = rng.uniform(0, 1, 2)
            model = BinaryDependenceModel(n=n, p1=float(p1), p2=float(p2))
            for a in range(n + 1):
                x2 = [1] * a + [0] * (n - a)
                mass = np.zeros(n + 1)
                for x1 in product([0, 1], repeat=n):
                    p = 1.0
                    for one, flag in zip(x1, x2):
                        rate = p1 if flag else p2
                        p *= rate if one else 1 - rate
                    mass[sum(x1)] += p
                law_ = conditional_count_distribution(model, a)
                assert law_.probs == pytest.approx(mass[law_.support.astype(int)], abs=1e-12)

    def test_swapped_model_matches_enumeration(self, rng):
        n = 3
        for _ in range(5):
            p1, p2, q = (float(v) for v in rng.uniform(0.05, 0.95, 3))
            swapped = BinaryDependenceModel(n=n, p1=p1, p2=p2, q=q).swapped()
            # mass[sum of X1, sum of X2]
            mass = np.zeros((n + 1, n + 1))
            for records in product(product([0, 1], repeat=2), repeat=n):
                p = 1.0
                for x1, x2 in records:
                    rate = p1 if x2 else p2
                    p *= (q if x2 else 1 - q) * (rate if x1 else 1 - rate)
                mass[sum(r[0] for r in records), sum(r[1] for r in records)] += p
            for a in range(n + 1):
                expected = mass[a] / mass[a].sum()
                law_ = conditional_count_distribution(swapped, a)
                assert law_.probs == pytest.approx(expected[law_.support.astype(int)], abs=1e-12)

    def test_swapping_twice_is_the_identity(self):
        model = BinaryDependenceModel(n=2, p1=0.9, p2=0.2, q=0.3)
        back = model.swapped().swapped()
        assert (back.p1, back.p2, back.q) == pytest.approx((0.9, 0.2, 0.3))

    def test_swapped_conditionals(self):
        swapped = BinaryDependenceModel(p1=0.9, p2=0.2, q=0.3).swapped()
        assert swapped.q == pytest.approx(0.41)
        assert swapped.p1 == pytest.approx(0.27 / 0.41)
        assert swapped.p2 == pytest.approx(0.03 / 0.59)

    def test_secret_value_range(self):
        with pytest.raises(ConfigurationError):
            conditional_count_distribution(BinaryDependenceModel(n=4), 5)


def record_framework(events, members, query=None, secret="X2"):
    doc = {
        "framework_id": "records",
        "attributes": [{"name": "X1", "domain": {"values": [0, 1]}},
                       {"name": "X2", "domain": {"values": [0, 1]}}],
        "sensitive": [secret],
        "secrets": [{"attribute": secret, "function": "column_sum",
                     "events": [{"id": f"g={e}", "points": [e]} for e in events]}],
        "theta": {"variant": "discrete_record", "members": members},
        "query": query or {"kind": "column_sum", "attribute": "X1"},
    }
    return parse_framework(doc)


class TestPairDistances:
    @pytest.mark.parametrize("framework_id,expected", DISTANCE_FRAMEWORKS)
    def test_worst_case_distance(self, bundled, framework_id, expected):
        fw, X = bundled(framework_id)
        distances, skipped = pair_distances(fw, fw.query, X.n)
        assert max(d.distance for d in distances) == pytest.approx(expected)
        assert skipped == 0

    def test_wider_class_is_never_closer(self, bundled):
        W = []
        for framework_id in ("binary_pair_narrow", "binary_pair_mid", "binary_pair_full"):
            fw, X = bundled(framework_id)
            W.append(max(d.distance for d in pair_distances(fw, fw.query, X.n)[0]))
        assert W == sorted(W)

    def test_coarser_grid(self, bundled):
        fw, X = bundled("binary_pair_full", grid_step=0.5)
        assert len(fw.theta) == 9
        assert max(d.distance for d in pair_distances(fw, fw.query, X.n)[0]) == pytest.approx(4.0)

    def test_parameter_network_laws(self, bundled):
        fw, X = bundled("binary_pair_parameters")
        laws = secret_laws(fw, fw.query, X.n)
        assert laws[("X2", "phi2=0.8", "theta1")].probs == pytest.approx(parameter_table()["phi_2=0.8"].probs)

    def test_mean_query_shrinks_distances(self):
        members = [{"p1": 0.4, "p2": 0.6}]
        fw = record_framework([0, 4], members, {"kind": "column_mean", "attribute": "X1"})
        distances, _ = pair_distances(fw, fw.query, 4)
        assert distances[0].distance == pytest.approx(0.25)

    def test_count_of_zeros(self):
        members = [{"p1": 0.4, "p2": 0.6}]
        query = {"kind": "threshold_count", "predicates": [{"attribute": "X1", "op": "=", "value": 0}]}
        fw = record_framework([0, 4], members, query)
        assert pair_distances(fw, fw.query, 4)[0][0].distance == pytest.approx(1.0)

    def test_secret_on_the_first_column(self):
        members = [{"id": "t", "p1": 0.9, "p2": 0.2, "q": 0.3}]
        fw = record_framework([0, 1], members, {"kind": "column_sum", "attribute": "X2"}, secret="X1")
        laws = secret_laws(fw, fw.query, 1)
        # P(X2=1 | X1=0) and P(X2=1 | X1=1)
        assert laws[("X1", "g=0", "t")].probs[1] == pytest.approx(0.03 / 0.59)
        assert laws[("X1", "g=1", "t")].probs[1] == pytest.approx(0.27 / 0.41)
        distances, skipped = pair_distances(fw, fw.query, 1)
        assert skipped == 0
        assert distances[0].distance == pytest.approx(1.0)

    def test_unreachable_secret_is_skipped(self, caplog):
        fw = record_framework([0, 4, 1.5], [{"p1": 0.4, "p2": 0.6}])
        distances, skipped = pair_distances(fw, fw.query, 4)
        assert skipped == 2
        assert [(d.secret_a, d.secret_b) for d in distances] == [("g=0", "g=4")]
        assert "skipped 2" in caplog.text

    def test_certain_secret_is_vacuous(self):
        fw = record_framework([0, 2, 4], [{"p1": 0.4, "p2": 0.6, "q": 1.0}])
        with pytest.raises(VacuousSecretError):
            pair_distances(fw, fw.query, 4)

    def test_gaussian_class_is_unsupported(self, bundled):
        fw, X = bundled("gaussian_weight_sat")
        with pytest.raises(UnsupportedMechanismError):
            pair_distances(fw, fw.query, X.n)

    def test_query_on_the_sensitive_column(self):
        fw = record_framework([0, 4], [{"p1": 0.4, "p2": 0.6}], {"kind": "column_sum", "attribute": "X2"})
        with pytest.raises(UnsupportedMechanismError):
            pair_distances(fw, fw.query, 4)


class TestMechanism:
    def test_scale_is_distance_over_epsilon(self, bundled):
        fw, X = bundled("binary_pair_full")
        report = wasserstein_mechanism(X, fw.query, fw, epsilon=2.0, rng_seed=5)
        assert report.W == pytest.approx(4.0)
        assert report.scale == pytest.approx(2.0)
        assert report.output == pytest.approx(evaluate_query(fw.query, X) + report.noise)
        assert report.grid_step == 0.05

    def test_deterministic(self, bundled):
        fw, X = bundled("binary_pair_parameters")
        first = wasserstein_mechanism(X, fw.query, fw, 1.0, rng_seed=17).to_document(reveal_noise=True)
        second = wasserstein_mechanism(X, fw.query, fw, 1.0, rng_seed=17).to_document(reveal_noise=True)
        assert first == second
        assert first["W"] == pytest.approx(1.0)

    def test_epsilon_must_be_positive(self, bundled):
        fw, X = bundled("binary_pair_parameters")
        with pytest.raises(ConfigurationError):
            wasserstein_mechanism(X, fw.query, fw, 0.0, rng_seed=1)

    def test_noise_only_when_revealed(self, bundled):
        fw, X = bundled("binary_pair_parameters")
        report = wasserstein_mechanism(X, fw.query, fw, 1.0, rng_seed=3)
        assert "noise" not in report.to_document()
        assert not math.isnan(report.noise)
