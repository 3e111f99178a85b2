"""Smoke test for the msflab Python extension."""

import math

import msflab


def main():
    g = msflab.Graph.grid(2, 4)
    assert (g.vertex_count, g.edge_count) == (16, 24)
    u = msflab.Labeling.sample(g, 7)
    assert len(u) == g.edge_count

    free = msflab.free_forest(g, u)
    assert len(free) == g.vertex_count - 1
    boundary = g.tag("boundary")
    wired = msflab.wired_forest(g, boundary, u)
    assert set(wired) <= set(free)
    assert msflab.invasion_union(g, boundary, u) == wired

    for e in range(g.edge_count):
        z = msflab.z_free(g, u, e)
        assert (u.values()[e] < z) == (e in free)

    path = msflab.Graph(3, [(0, 1), (1, 2)])
    assert math.isinf(msflab.z_free(path, msflab.Labeling([0.3, 0.6]), 0))

    steps = msflab.invade(g, u, 5, steps=4)
    assert len(steps) == 4

    ex = msflab.Graph.correlation_example()
    catalog = msflab.tree_catalog(ex)
    assert len(catalog) == 64
    assert msflab.edge_correlation(ex, 0, 1) == "109872/109561"
    tree, p = catalog[0]
    assert msflab.mst_probability(ex, tree) == p

    vertices, edges, bijection = msflab.grid_dual(4)
    assert vertices == 10 and len(edges) == 24 and sorted(bijection) == list(range(24))

    back = msflab.Graph.parse(ex.to_text())
    assert back.edges() == ex.edges()

    try:
        msflab.free_forest(g, msflab.Labeling([0.5]))
    except ValueError:
        pass
    else:
        raise AssertionError("length mismatch accepted")

    ok, line = msflab.run_criterion(1)
    assert ok, line
    print(line)
    print("msflab", msflab.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
