import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigspec.bssm import (BinarySpectrum, CliqueCover, clique_cover, cover_from_text, cover_size_bound,
                          cover_to_spectrum, cover_to_text, generate_spectrum, induce_network,
                          is_clique_cover, spectrum_from_tsv, spectrum_to_tsv, verify_representation)
from sigspec.graph import Graph, karate_club

# Greedy cover size for the karate club, frozen from a single run of clique_cover.
KARATE_GREEDY_COVER = 35


def pairs_of(g):
    return {(i, j) for i, j, _ in g.unique_edges()}


def test_generate_extremes():
    assert not generate_spectrum(5, 4, 0.0, seed=3).bits.any()
    assert generate_spectrum(5, 4, 1.0, seed=3).bits.all()


def test_generate_unit_count_binomial_band():
    bits = generate_spectrum(1000, 100, 0.02, seed=0).bits
    # mean 2000, sd sqrt(100000 * 0.02 * 0.98) ~ 44.3, 5 sd band
    assert abs(int(bits.sum()) - 2000) <= 5 * np.sqrt(100000 * 0.02 * 0.98)


def test_generate_deterministic():
    a = generate_spectrum(50, 20, 0.3, seed=11).bits
    assert np.array_equal(a, generate_spectrum(50, 20, 0.3, seed=11).bits)
    assert not np.array_equal(a, generate_spectrum(50, 20, 0.3, seed=12).bits)


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_generate_bad_probability(p):
    with pytest.raises(ValueError):
        generate_spectrum(3, 3, p)


def test_spectrum_rejects_non_binary():
    with pytest.raises(ValueError):
        BinarySpectrum(np.array([[0, 2]]))


def test_induce_examples():
    assert pairs_of(induce_network(BinarySpectrum(np.array([[1, 0], [1, 1], [0, 1]])))) == {(0, 1), (1, 2)}
    assert induce_network(BinarySpectrum(np.zeros((4, 3), dtype=int))).edges == {}
    assert pairs_of(induce_network(BinarySpectrum(np.ones((3, 1), dtype=int)))) == {(0, 1), (0, 2), (1, 2)}


def test_induce_brute_force():
    bits = generate_spectrum(40, 6, 0.2, seed=5).bits
    expect = {(i, j) for i in range(40) for j in range(i + 1, 40) if any(bits[i] & bits[j])}
    assert pairs_of(induce_network(BinarySpectrum(bits))) == expect


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_induce_permutation_equivariant(seed):
    rng = np.random.default_rng(seed)
    bits = (rng.random((12, 5)) < 0.25).astype(int)
    perm = rng.permutation(12)
    g = induce_network(BinarySpectrum(bits))
    h = induce_network(BinarySpectrum(bits[perm]))
    assert {(min(perm[i], perm[j]), max(perm[i], perm[j])) for i, j in pairs_of(h)} == pairs_of(g)


def test_cover_triangle(triangle):
    assert clique_cover(triangle).cliques == [[0, 1, 2]]


def test_cover_path(path3):
    c = clique_cover(path3)
    assert c.cliques == [[0, 1], [1, 2]]
    assert cover_to_spectrum(c, 3).bits.tolist() == [[1, 0], [1, 1], [0, 1]]


def test_cover_triangle_spectrum(triangle):
    s = cover_to_spectrum(clique_cover(triangle), 3)
    assert s.bits.tolist() == [[1], [1], [1]]
    assert pairs_of(induce_network(s)) == pairs_of(triangle)


def test_cover_rejects_directed():
    with pytest.raises(ValueError):
        clique_cover(Graph.from_edges(2, [(0, 1)], directed=True))


def test_cover_index_out_of_range():
    with pytest.raises(IndexError):
        cover_to_spectrum(CliqueCover([[0, 5]]), 3)


def test_karate_cover_regression():
    g = karate_club()
    c = clique_cover(g)
    assert len(c) == KARATE_GREEDY_COVER
    assert len(c) <= 78
    assert is_clique_cover(c, g)
    s = cover_to_spectrum(c, 34)
    assert s.bits.shape == (34, KARATE_GREEDY_COVER)
    assert verify_representation(s, g) == 0


def random_graph(rng, n, p):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def test_theorem_round_trip_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        g = random_graph(rng, int(rng.integers(1, 31)), 0.3)
        c = clique_cover(g)
        assert is_clique_cover(c, g)
        assert len(c) <= cover_size_bound(g)
        assert verify_representation(cover_to_spectrum(c, g.n), g) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 14), st.floats(0.05, 0.95), st.integers(0, 2 ** 32 - 1))
def test_cover_deterministic_and_bounded(n, p, seed):
    g = random_graph(np.random.default_rng(seed), n, p)
    c = clique_cover(g)
    assert c.cliques == clique_cover(g).cliques
    assert len(c) <= g.edge_count


def test_verify_examples(triangle, path3):
    assert verify_representation(BinarySpectrum(np.zeros((3, 2), dtype=int)), triangle) == 3
    assert verify_representation(BinarySpectrum(np.array([[1], [1], [0]])), path3) == 1
    with pytest.raises(ValueError):
        verify_representation(BinarySpectrum(np.zeros((2, 1), dtype=int)), path3)


def test_cover_weights_ignored():
    g = Graph.from_edges(3, [(0, 1, -2.0), (1, 2, 0.5), (0, 2, 3.0)])
    assert clique_cover(g).cliques == [[0, 1, 2]]


def test_file_formats_roundtrip():
    s = generate_spectrum(6, 4, 0.5, seed=1)
    text = spectrum_to_tsv(s)
    assert text.splitlines()[0].count("\t") == 3
    assert np.array_equal(spectrum_from_tsv(text).bits, s.bits)
    c = clique_cover(karate_club())
    assert cover_from_text(cover_to_text(c)).cliques == c.cliques
