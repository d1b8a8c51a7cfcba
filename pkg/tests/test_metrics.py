import json
import math
import random
import statistics
from collections import Counter
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from flowcomm.graph import Graph
from flowcomm.metrics import (
    Cluster,
    Clustering,
    GroundTruth,
    NoPairsError,
    PairSampler,
    SamplingConfig,
    biased_sample_pair_rates,
    conductance,
    conductance_profile,
    load_ground_truth,
    pair_verdict,
    sample_pair_rates,
    write_ground_truth,
)

from conftest import edge_lists


def brute_conductance(edges, s, symmetric=False):
    """Scan the raw edge list once; duplicates and loops collapse first."""
    arcs = {(u, v) for u, v, _ in edges if u != v}
    if symmetric:
        arcs = {(min(u, v), max(u, v)) for u, v in arcs}
        cut = sum((u in s) != (v in s) for u, v in arcs)
    else:
        cut = sum(u in s and v not in s for u, v in arcs)
    inner = sum(u in s and v in s for u, v in arcs)
    return 0.0 if cut == 0 else cut / (2 * inner + cut)


# -- conductance ----------------------------------------------------------------


@pytest.mark.parametrize("s, expected", [
    ({1, 2}, 0.6),
    ({1, 2, 3, 4, 5}, 0.0),
    ({5}, 0.0),
    ({3, 4, 5}, 0.2),
    ({1}, 1.0),
])
def test_conductance_toy(toy, s, expected):
    assert conductance(toy, s) == pytest.approx(expected)


def test_symmetric_conductance_toy(toy):
    # pairs {1,3} {1,4} {1,5} {2,4} cross, {1,2} is inside
    assert conductance(toy, {1, 2}, symmetric=True) == pytest.approx(4 / 6)


def test_conductance_domain(toy):
    with pytest.raises(ValueError):
        conductance(toy, set())
    with pytest.raises(ValueError):
        conductance(toy, {1, 42})


def test_profile_toy(toy):
    clustering = Clustering.from_labels({1: 1, 2: 1, 3: 3, 4: 3, 5: 3})
    prof = conductance_profile(toy, clustering)
    assert [(e.label, e.size) for e in prof.entries] == [(3, 3), (1, 2)]
    assert prof.entries[0].conductance == pytest.approx(0.2)
    assert prof.entries[1].conductance == pytest.approx(0.6)


def test_profile_disjoint_triangles():
    tri = [(0, 1), (1, 2), (2, 0)]
    g = Graph.from_edges(tri + [(u + 3, v + 3) for u, v in tri], directed=False)
    clustering = Clustering.from_labels({v: v // 3 for v in range(6)})
    assert [e.conductance for e in conductance_profile(g, clustering).entries] == [0.0, 0.0]


def test_profile_edgeless():
    g = Graph()
    g.vertices.update(range(4))
    clustering = Clustering.from_labels({0: 0}, g.vertices)
    prof = conductance_profile(g, clustering)
    assert len(prof.entries) == 4
    assert all(e.conductance == 0.0 for e in prof.entries)
    assert [e.dormant for e in prof.entries] == [False, True, True, True]


@given(edge_lists(max_vertices=30, max_edges=300), st.data(), st.booleans())
@settings(max_examples=200)
def test_conductance_matches_brute_force(edges, data, symmetric):
    g = Graph.from_edges(edges)
    verts = sorted(g.vertices)
    s = set(data.draw(st.lists(st.sampled_from(verts), min_size=1, unique=True)))
    got = conductance(g, s, symmetric=symmetric)
    assert 0.0 <= got <= 1.0
    assert got == brute_conductance(edges, s, symmetric)


# -- clustering and truth -------------------------------------------------------


@given(st.dictionaries(st.integers(0, 30), st.integers(0, 4)), st.sets(st.integers(0, 30)))
def test_singleton_materialization(labels, extra):
    vertices = set(labels) | extra
    clustering = Clustering.from_labels(labels, vertices)
    counts = Counter(v for c in clustering for v in c.members)
    assert set(counts) == vertices
    assert set(counts.values()) <= {1}
    for c in clustering:
        if c.dormant:
            assert c.label is None and len(c) == 1
            assert next(iter(c.members)) not in labels


def test_clustering_rejects_overlap():
    with pytest.raises(ValueError):
        Clustering([Cluster(0, frozenset({1, 2})), Cluster(1, frozenset({2, 3}))])


def test_ground_truth_inverse(tmp_path):
    p = tmp_path / "truth.txt"
    p.write_text("# header\n1 2 3\n\n3 4\n")
    truth = load_ground_truth(p)
    assert truth.communities == {0: {1, 2, 3}, 1: {3, 4}}
    assert truth.memberships[3] == {0, 1}
    for v, cids in truth.memberships.items():
        assert all(v in truth.communities[c] for c in cids)
    out = tmp_path / "copy.txt"
    write_ground_truth(truth, out)
    assert load_ground_truth(out).communities == truth.communities

    p.write_text("1 x\n")
    with pytest.raises(ValueError):
        load_ground_truth(p)


@given(st.dictionaries(st.integers(0, 15), st.integers(0, 3), min_size=2),
       st.lists(st.sets(st.integers(0, 15), min_size=1), min_size=1, max_size=4), st.data())
def test_verdict_symmetry(labels, comms, data):
    clustering = Clustering.from_labels(labels)
    truth = GroundTruth.from_lists(comms)
    u, v = data.draw(st.lists(st.sampled_from(sorted(labels)), min_size=2, max_size=2, unique=True))
    assert pair_verdict(clustering, truth, u, v) == pair_verdict(clustering, truth, v, u)


def test_verdict_overlap_counts_as_together():
    truth = GroundTruth.from_lists([[1, 2], [2, 3]])
    clustering = Clustering.from_labels({1: 0, 2: 0, 3: 1})
    assert pair_verdict(clustering, truth, 1, 2) == "tp"
    assert pair_verdict(clustering, truth, 2, 3) == "fn"
    assert pair_verdict(clustering, truth, 1, 3) == "tn"
    assert pair_verdict(clustering, truth, 1, 99) is None


# -- sampling -----------------------------------------------------------------------


def halves(n):
    labels = {v: int(v >= n // 2) for v in range(n)}
    truth = GroundTruth.from_lists([range(n // 2), range(n // 2, n)])
    return labels, truth


@pytest.mark.parametrize("seed", range(5))
def test_perfect_match(seed):
    labels, truth = halves(40)
    report = sample_pair_rates(Clustering.from_labels(labels), truth, SamplingConfig(batch=1000, seed=seed))
    assert report.fp_rate == report.fn_rate == 0.0
    assert report.converged
    assert report.positives == report.negatives


def test_giant_cluster():
    n = 100
    _, truth = halves(n)
    giant = Clustering.from_labels({v: 0 for v in range(n)})
    with pytest.raises(NoPairsError):
        sample_pair_rates(giant, truth)

    sampler = PairSampler(giant, random.Random(3))
    draws = 100_000
    fp = sum(pair_verdict(giant, truth, *sampler.positive()) == "fp" for _ in range(draws))
    expected = (n // 2) ** 2 / math.comb(n, 2)
    assert expected == pytest.approx(50 / 99)
    assert abs(fp / draws - expected) < 4 * math.sqrt(expected * (1 - expected) / draws)


def test_all_singletons_has_no_positives():
    _, truth = halves(10)
    with pytest.raises(NoPairsError):
        sample_pair_rates(Clustering.from_labels({}, range(10)), truth)


def test_missing_truth_is_skipped():
    labels, truth = halves(20)
    labels.update({100: 0, 101: 1})
    report = sample_pair_rates(Clustering.from_labels(labels), truth, SamplingConfig(batch=1000, seed=4))
    assert report.skipped > 0
    assert report.positives + report.negatives + report.skipped == report.samples_drawn
    assert report.fp_rate == report.fn_rate == 0.0


def test_nonconvergence_hits_cap():
    labels, truth = halves(20)
    cfg = SamplingConfig(batch=10, epsilon=1e-12, window=50, max_samples=200, seed=1)
    # swap one vertex so rates stay noisy
    labels[0] = 1
    report = sample_pair_rates(Clustering.from_labels(labels), truth, cfg)
    assert not report.converged
    assert report.samples_drawn == 200
    assert len(report.trace) == 20


def exact_pair_distribution(clustering, positive_pool, negative_pool):
    pos, neg = set(), set()
    verts = sorted(v for c in clustering for v in c.members)
    for u, v in combinations(verts, 2):
        cu, cv = clustering.index[u], clustering.index[v]
        if cu == cv and cu in positive_pool:
            pos.add((u, v))
        if cu != cv and (cu in negative_pool or cv in negative_pool):
            neg.add((u, v))
    return pos, neg


@pytest.mark.parametrize("pools", [None, ([2], [0, 3])])
def test_sampler_is_uniform(pools):
    clustering = Clustering.from_labels({0: 0, 1: 0, 2: 1, 3: 2, 4: 2, 5: 2, 6: 2, 7: 3})
    positive_pool, negative_pool = pools or (range(4), range(4))
    sampler = PairSampler(clustering, random.Random(9), *(pools or ()))
    want_pos, want_neg = exact_pair_distribution(clustering, set(positive_pool), set(negative_pool))
    draws = 60_000
    for draw, want in ((sampler.positive, want_pos), (sampler.negative, want_neg)):
        counts = Counter(tuple(sorted(draw())) for _ in range(draws))
        assert set(counts) == want
        p = 1 / len(want)
        sigma = math.sqrt(p * (1 - p) / draws)
        assert max(abs(c / draws - p) for c in counts.values()) < 5 * sigma


def test_sampler_determinism():
    labels, truth = halves(30)
    labels[3] = 1
    clustering = Clustering.from_labels(labels)
    cfg = SamplingConfig(batch=500, seed=17)
    assert sample_pair_rates(clustering, truth, cfg) == sample_pair_rates(clustering, truth, cfg)


def test_biased_full_fraction_matches_unbiased():
    labels, truth = halves(30)
    labels[3] = 1
    clustering = Clustering.from_labels(labels, range(32))
    cfg = SamplingConfig(batch=500, seed=2)
    a = sample_pair_rates(clustering, truth, cfg)
    b = biased_sample_pair_rates(clustering, truth, 1.0, cfg)
    assert b.biased and not a.biased
    assert (a.fp_rate, a.fn_rate, a.trace) == (b.fp_rate, b.fn_rate, b.trace)


@pytest.mark.parametrize("fraction", [0.1, 0.5, 1.0])
def test_biased_perfect_clustering(fraction):
    comms = [range(0, 10), range(10, 30), range(30, 35), range(35, 36)]
    truth = GroundTruth.from_lists(comms)
    clustering = Clustering.from_labels({v: c for c, vs in enumerate(comms) for v in vs})
    report = biased_sample_pair_rates(clustering, truth, fraction, SamplingConfig(batch=400, seed=5))
    assert report.fp_rate == report.fn_rate == 0.0


def test_biased_domain():
    labels, truth = halves(10)
    for f in (0.0, 1.5):
        with pytest.raises(ValueError):
            biased_sample_pair_rates(Clustering.from_labels(labels), truth, f)


def noisy_planting(seed):
    """Ten communities of growing size; 10% of vertices relabeled at random."""
    rng = random.Random(seed)
    comms, start = [], 0
    for size in range(10, 60, 5):
        comms.append(range(start, start + size))
        start += size
    labels = {v: c for c, vs in enumerate(comms) for v in vs}
    for v in rng.sample(range(start), start // 10):
        labels[v] = rng.choice([c for c in range(len(comms)) if c != labels[v]])
    return Clustering.from_labels(labels), GroundTruth.from_lists(comms)


def test_bias_toward_large_clusters_lowers_fp():
    unbiased, biased = [], []
    for seed in range(20):
        clustering, truth = noisy_planting(seed)
        cfg = SamplingConfig(seed=seed)
        unbiased.append(sample_pair_rates(clustering, truth, cfg).fp_rate)
        biased.append(biased_sample_pair_rates(clustering, truth, 0.1, cfg).fp_rate)
    # measured means: biased 0.145, unbiased 0.168
    assert statistics.mean(biased) <= statistics.mean(unbiased)


# -- serialization ----------------------------------------------------------------


def test_report_serialization():
    labels, truth = halves(20)
    report = sample_pair_rates(Clustering.from_labels(labels), truth, SamplingConfig(batch=100, seed=0))
    doc = json.loads(json.dumps(report.to_dict()))
    assert doc["kind"] == "pair_rates"
    assert doc["fp_rate"] == report.fp_rate
    assert len(doc["trace"]) == len(report.trace)
    lines = report.to_tsv().splitlines()
    assert lines[0] == f"#fp_rate\t{report.fp_rate!r}"
    assert lines[6] == "samples\tfp_rate\tfn_rate"
    assert len(lines) == 7 + len(report.trace)


def test_profile_serialization(toy):
    clustering = Clustering.from_labels({1: 1, 2: 1}, toy.vertices)
    prof = conductance_profile(toy, clustering)
    rows = prof.to_tsv().splitlines()
    assert rows[0] == "#label\tsize\tconductance\tdormant"
    assert rows[1] == "1\t2\t0.6\t0"
    assert rows[2].startswith("-\t1\t")
    doc = prof.to_dict()
    assert [e["dormant"] for e in doc["entries"]] == [False, True, True, True]
