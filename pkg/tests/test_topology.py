import pytest
from hypothesis import given, strategies as st

from islandea import topology as T

KINDS_ANY_MU = ("uniring", "biring", "complete")


def test_uniring_three():
    g = T.uni_ring(3)
    assert set(g.edges()) == {(0, 1), (1, 2), (2, 0)}
    assert T.out_neighbors(g, 2) == [0]


def test_hypercube_three():
    g = T.hypercube(3)
    assert g.num_vertices == 8 and g.num_edges == 24
    assert all(len(T.out_neighbors(g, v)) == 3 for v in range(8))
    assert T.out_neighbors(T.hypercube(2), 0) == [1, 2]


def test_complete_five():
    g = T.complete(5)
    assert g.num_edges == 20
    assert all(len(T.out_neighbors(g, v)) == 4 for v in range(5))
    assert T.out_neighbors(T.complete(3), 0) == [1, 2]
    assert T.diameter(g) == 1


def test_torus_three_by_three():
    g = T.torus(3, 3)
    assert g.num_vertices == 9 and g.num_edges == 36
    assert T.is_symmetric(g)


def test_torus_row_major_neighbours():
    g = T.torus(4, 3)
    # vertex 5 sits at column 1, row 1
    assert sorted(T.out_neighbors(g, 5)) == sorted([6, 4, 9, 1])


def test_diameters():
    assert T.diameter(T.hypercube(4)) == 4
    assert T.diameter(T.bi_ring(6)) == 3
    assert T.diameter(T.uni_ring(6)) == 5


@pytest.mark.parametrize("kind", ["uniring", "biring", "torus", "hypercube", "complete"])
def test_single_island_has_no_edges(kind):
    g = T.build(kind, 1)
    assert g.num_vertices == 1 and g.num_edges == 0


def test_errors():
    with pytest.raises(T.TorusTooSmall):
        T.torus(2, 5)
    with pytest.raises(T.InvalidSize):
        T.build("complete", 0)
    with pytest.raises(T.InvalidSize):
        T.build("hypercube", 6)
    with pytest.raises(IndexError):
        T.out_neighbors(T.complete(3), 3)
    with pytest.raises(T.UnknownTopology):
        T.parse("star")
    disconnected = T.TopologyGraph(T.TopologyKind.UNI_RING, 2, ((1,), ()))
    with pytest.raises(T.NotConnected):
        T.diameter(disconnected)


def test_parse_spellings():
    assert T.parse("torus:4x4").label == "torus:4x4"
    assert T.parse("hypercube:d=3").num_vertices == 8
    assert T.parse("complete", 5).num_edges == 20
    assert T.parse("torus", 16).params_label == "4x4"
    with pytest.raises(T.InvalidSize):
        T.parse("torus:4x4", 9)


@given(st.integers(2, 64), st.sampled_from(KINDS_ANY_MU))
def test_rings_and_complete_properties(mu, kind):
    g = T.build(kind, mu)
    assert T.is_strongly_connected(g)
    for v, nb in enumerate(g.out_edges):
        assert v not in nb and len(set(nb)) == len(nb)
    expected = {"uniring": mu, "biring": 2 * mu if mu > 2 else 2, "complete": mu * (mu - 1)}[kind]
    assert g.num_edges == expected
    if kind == "uniring":
        assert T.diameter(g) == mu - 1
        assert T.is_symmetric(g) == (mu == 2)
    elif kind == "biring":
        assert T.diameter(g) == mu // 2
        assert T.is_symmetric(g)
    else:
        assert T.is_symmetric(g)


@given(st.integers(1, 8))
def test_hypercube_diameter_equals_dimension(d):
    g = T.hypercube(d)
    assert T.diameter(g) == d
    assert g.num_edges == d * 2 ** d
    assert T.is_symmetric(g)


@given(st.integers(3, 8), st.integers(3, 8))
def test_torus_properties(w, h):
    g = T.torus(w, h)
    assert g.num_edges == 4 * w * h
    assert T.is_strongly_connected(g) and T.is_symmetric(g)
    assert T.diameter(g) == w // 2 + h // 2


def test_every_feasible_size_is_strongly_connected():
    for mu in range(2, 65):
        for kind in KINDS_ANY_MU:
            assert T.is_strongly_connected(T.build(kind, mu))
        if mu & (mu - 1) == 0:
            assert T.is_strongly_connected(T.build("hypercube", mu))
        try:
            g = T.build("torus", mu)
        except T.TorusTooSmall:
            continue
        assert T.is_strongly_connected(g)
