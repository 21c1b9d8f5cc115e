import numpy as np
import pytest

from hybridcd.citest import DSepCI, ParCorrCI, TrueOrder
from hybridcd.datagen import (STRUCTURES, ScmSpec, gen_running_example, gen_structure,
                              running_example_graph)
from hybridcd.graph import (CausalOrder, ExtendedGraph, LaggedNode, PartialExtendedGraph,
                            PartialWindowGraph, WindowGraph, ecg_from_wcg, pcpo_of, scg_from)
from hybridcd.hybrid import DiscoveryConfig, cbnb, discover, nbcb
from hybridcd.restcb import PruneState, rest_pcgce, rest_pcmci_plus
from hybridcd.restnb import rest_vlingam
from hybridcd.stats import Dataset, DegenerateSeriesError

X, Y, Z, W, U = range(5)


def truths():
    out = [(name, gen_structure(ScmSpec(name, seed=seed, T=200))[1])
           for name in STRUCTURES for seed in (0, 1)]
    return out + [("running", running_example_graph())]


def order_consistent(order, inst):
    pos = CausalOrder(order).position()
    return all(pos[a] < pos[b] for a, b in inst if a in pos and b in pos)


def dummy_data(g, T=300):
    return Dataset(np.random.default_rng(0).normal(size=(T, g.d)), g.names)


# ------------------------------------------------------------------ CI tests

def test_parcorr_cache_and_symmetry(rng):
    data = Dataset(rng.normal(size=(400, 3)), "abc")
    ci = ParCorrCI(data, max_lag=2)
    a, b = LaggedNode(0, 1), LaggedNode(1, 0)
    r1 = ci(a, b, [LaggedNode(2, 0)])
    r2 = ci(b, a, [LaggedNode(2, 0)])
    assert r1 == r2 and ci.n_tests == 1


def test_parcorr_unknown_node(rng):
    ci = ParCorrCI(Dataset(rng.normal(size=(100, 2)), "ab"), max_lag=1)
    with pytest.raises(ValueError):
        ci(LaggedNode(0, 5), LaggedNode(1, 0))


def test_dsep_oracle_block_nodes():
    g = WindowGraph(1, "XY", {(0, 1, 1)}, set())
    ci = DSepCI(g, gamma=2)
    assert ci(LaggedNode.past(0), LaggedNode(1, 0)).p_value == 0.0
    assert ci(LaggedNode.past(1), LaggedNode(0, 0)).p_value == 1.0


def test_true_order_restricts():
    assert TrueOrder(running_example_graph())([X, U, W]).nodes == (X, W, U)


# ------------------------------------------------------- oracle exactness

@pytest.mark.parametrize("name,truth", truths(), ids=lambda v: v if isinstance(v, str) else "")
def test_restcb_oracle_exact(name, truth):
    gamma = truth.gamma
    data = dummy_data(truth)
    order = TrueOrder(truth)(range(truth.d))
    w = rest_pcmci_plus(data, gamma, 0.05, order, ci=DSepCI(truth, gamma))
    assert (w.lagged, w.inst) == (truth.lagged, truth.inst)
    pw = rest_pcmci_plus(data, gamma, 0.05, None, ci=DSepCI(truth, gamma))
    assert isinstance(pw, PartialWindowGraph) and pw == pcpo_of(truth)
    e = rest_pcgce(data, gamma, 0.05, order, ci=DSepCI(truth, gamma))
    assert e == ecg_from_wcg(truth)
    pe = rest_pcgce(data, gamma, 0.05, None, ci=DSepCI(truth, gamma))
    assert pe == pcpo_of(ecg_from_wcg(truth))


@pytest.mark.parametrize("method", ["nbcb-w", "nbcb-e", "cbnb-w", "cbnb-e"])
@pytest.mark.parametrize("name,truth", truths(), ids=lambda v: v if isinstance(v, str) else "")
def test_hybrid_oracle_exact(method, name, truth):
    cfg = DiscoveryConfig(gamma=truth.gamma)
    r = discover(method, dummy_data(truth), cfg, ci=DSepCI(truth, truth.gamma),
                 orderer=TrueOrder(truth))
    expected = truth if method.endswith("w") else ecg_from_wcg(truth)
    assert r.detail == expected
    assert r.scg == scg_from(truth)


def test_cbnb_oracle_orders_running_example_groups():
    g = running_example_graph()
    calls = []
    base = TrueOrder(g)

    def spy(variables, past):
        calls.append((sorted(variables), sorted(past)))
        return base(variables, past)

    r = cbnb(dummy_data(g), DiscoveryConfig(gamma=2), ci=DSepCI(g, 2), orderer=spy)
    assert [c[0] for c in calls] == [[X, Y, Z, W], [W, U]]
    # each group sees only lagged parents from the partial graph
    assert all(p.lag >= 1 for _, past in calls for p in past)
    assert r.detail == g


def test_cbnb_skips_ordering_without_unoriented_edges():
    g = WindowGraph(1, "XY", {(0, 1, 0), (0, 1, 1)}, set())

    def never(*_):
        raise AssertionError("orderer called")

    r = cbnb(dummy_data(g), DiscoveryConfig(gamma=1), ci=DSepCI(g, 1), orderer=never)
    assert r.detail == g and r.order_log == []


def test_cbnb_failed_group_stays_unoriented():
    g = WindowGraph(1, "XY", set(), {(0, 1)})

    def broken(*_):
        raise DegenerateSeriesError("variable 'X'")

    r = cbnb(dummy_data(g), DiscoveryConfig(gamma=1), ci=DSepCI(g, 1), orderer=broken)
    assert isinstance(r.detail, PartialWindowGraph) and r.detail.unoriented == {(0, 1)}
    assert r.diagnostics["failed_groups"][0]["variables"] == ["X", "Y"]
    assert r.scg.edges == {(0, 1), (1, 0)}


# ------------------------------------------------------------ data-driven

def test_vlingam_singleton(rng):
    assert rest_vlingam(Dataset(rng.normal(size=(50, 2)), "ab"), 1, 0.05, [1]).nodes == (1,)


def test_vlingam_fork_root_first():
    hits = 0
    for seed in range(20):
        lags = {("X", "Y"): 0, ("X", "Z"): 0}
        data, _, _ = gen_structure(ScmSpec("fork", seed=seed, lags=lags))
        past = [LaggedNode(v, 1) for v in range(3)]
        order = rest_vlingam(data.standardized(), 1, 0.05, range(3), past)
        assert sorted(order.nodes) == [0, 1, 2]
        hits += order.nodes[0] == X
    assert hits >= 18


def test_vlingam_running_example_order():
    g = running_example_graph()
    past = [LaggedNode(s, l) for s, l, _ in g.lagged]
    data, _, _ = gen_running_example(seed=0)
    o = rest_vlingam(data.standardized(), 2, 0.05, range(5), past)
    assert order_consistent(o.nodes, g.inst)
    assert o.nodes[:2] == (Y, Z)


def test_vlingam_deterministic():
    data, _, _ = gen_structure(ScmSpec("diamond", seed=3))
    a = rest_vlingam(data.standardized(), 1, 0.05, range(4))
    b = rest_vlingam(data.standardized(), 1, 0.05, range(4))
    assert a == b


def _n_errors(got, truth):
    return len(set(got.lagged) ^ set(truth.lagged)) + len(set(got.inst) ^ set(truth.inst))


def test_pcmci_running_example_data():
    g = running_example_graph()
    order = CausalOrder([Y, Z, W, X, U])
    good = 0
    for seed in range(20):
        data, _, _ = gen_running_example(seed=seed)
        good += _n_errors(rest_pcmci_plus(data.standardized(), 2, 0.05, order), g) <= 1
    assert good >= 16


def test_pcgce_running_example_data():
    e = ecg_from_wcg(running_example_graph())
    order = CausalOrder([Y, Z, W, X, U])
    good = 0
    for seed in range(20):
        data, _, _ = gen_running_example(seed=seed)
        good += _n_errors(rest_pcgce(data.standardized(), 2, 0.05, order), e) <= 1
    assert good >= 16


def test_cbnb_running_example_orientation():
    g = running_example_graph()
    good = 0
    for seed in range(20):
        data, _, _ = gen_running_example(seed=seed)
        r = cbnb(data, DiscoveryConfig(gamma=2))
        pairs = {frozenset(e) for e in g.inst}
        shared = [e for e in r.detail.inst if frozenset(e) in pairs]
        good += bool(shared) and all(e in g.inst for e in shared) and not r.detail.unoriented
    assert good >= 16


def test_pcmci_white_noise_false_positives():
    # per candidate link (lagged or instantaneous), not per variable pair
    cross = tests = 0
    for seed in range(200):
        data = Dataset(np.random.default_rng(seed).normal(size=(500, 3)), "abc")
        g = rest_pcmci_plus(data, 2, 0.05, CausalOrder([0, 1, 2]))
        cross += sum(s != t for s, _, t in g.lagged) + len(g.inst)
        tests += 3 * 2 * 2 + 3
    assert cross / tests <= 0.05


def test_pcmci_state_records_minimum_statistic():
    data, _, _ = gen_structure(ScmSpec("fork", seed=0, T=300))
    st = PruneState()
    rest_pcmci_plus(data.standardized(), 2, 0.05, None, state=st)
    assert set(st.B_hat) == {0, 1, 2}
    assert all(v >= 0 for v in st.I_min.values())


def test_order_respected_and_edges_only_pruned():
    data, _, _ = gen_structure(ScmSpec("cyclic-diamond", seed=2, T=400))
    order = CausalOrder([3, 1, 0, 2])
    pos = order.position()
    for algo in (rest_pcmci_plus, rest_pcgce):
        g = algo(data.standardized(), 2, 0.05, order)
        assert all(pos[a] < pos[b] for a, b in g.inst)


def test_single_variable_dataset(rng):
    x = np.zeros(500)
    e = rng.uniform(-1, 1, 500)
    for t in range(1, 500):
        x[t] = 0.6 * x[t - 1] + e[t]
    data = Dataset(x, ["x"])
    for method in ("nbcb-w", "nbcb-e", "cbnb-w", "cbnb-e"):
        r = discover(method, data)
        assert not r.scg.edges and r.scg.self_loops <= {0}
    e_graph = rest_pcgce(data.standardized(), 2, 0.05)
    assert isinstance(e_graph, PartialExtendedGraph) and not e_graph.unoriented


def test_result_scg_is_deduced_from_detail():
    data, _, _ = gen_structure(ScmSpec("cyclic-fork", seed=4))
    for method in ("nbcb-w", "nbcb-e", "cbnb-w", "cbnb-e"):
        r = discover(method, data)
        assert r.scg == scg_from(r.detail)
        if method.startswith("nbcb"):
            assert not r.detail.unoriented
        assert isinstance(r.detail, (WindowGraph, ExtendedGraph))
        assert r.to_json()["scg"]["type"] == "scg"


def test_config_validation():
    with pytest.raises(ValueError):
        DiscoveryConfig(gamma=0)
    with pytest.raises(ValueError):
        DiscoveryConfig(alpha=1.5)
    with pytest.raises(ValueError):
        discover("pcmci", Dataset(np.zeros((5, 1)), ["a"]))


def test_constant_column_raises_degeneracy():
    v = np.random.default_rng(0).normal(size=(200, 2))
    v[:, 1] = 3.0
    with pytest.raises(DegenerateSeriesError, match="'b'"):
        nbcb(Dataset(v, "ab"))
