"""Smoke test for the compiled extension.

Build and run from the workspace root:

    cargo build -p highway-toll-py --release --features extension-module
    cp target/release/libhighway_toll_py.so crates/python/python/highway_toll.so
    python3 crates/python/python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import highway_toll as ht  # noqa: E402

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "core", "data")


def close(xs, ys, tol=1e-12):
    return len(xs) == len(ys) and all(abs(x - y) <= tol for x, y in zip(xs, ys))


def main():
    t = ht.TollMatrix.from_triplets([(1, 2, 1.0), (1, 3, 1.0)], 3)
    assert t.n == 3 and t.total() == 2.0
    assert close(ht.ses(t), [5 / 6, 5 / 6, 1 / 3])
    assert close(ht.sps(t), [0.8, 0.8, 0.4])
    assert close(ht.scs(t), [2 / 3, 1.0, 1 / 3])
    assert close(ht.shapley(t), ht.ses(t), 1e-9)
    assert close(ht.family_allocate(t, "scs"), ht.scs(t))

    big = ht.TollMatrix.load(os.path.join(DATA, "example61.csv"))
    x = ht.sps(big)
    assert close(ht.tau(big), x, 1e-9)
    report = ht.core_check(big, x)
    assert not report["is_member"]
    entry, exit_, value, allocated = report["violated"][0]
    assert (entry, exit_) == (1, 2) and abs(allocated - 7.318) < 1e-3 and value == 7.5
    assert ht.sps_core_criterion(big)["worst_interval"] == (1, 2)

    r = ht.random_matrix(6, density=0.5, seed=4)
    assert close(ht.average_tree(r), ht.scs(r), 1e-9)
    assert ht.core_check(r, ht.scs(r))["is_member"]

    assert ht.gini([2.0, 2.0, 2.0]) == 0.0
    assert ht.lorenz([1.0, 0.0]) == [(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]
    s, p = ht.rank_correlations([1.0, 2.0, 3.0], [2.0, 4.0, 7.0])
    assert abs(s - 1.0) < 1e-12 and 0.99 < p <= 1.0
    assert ht.ranking([1.0, 5.0, 3.0], 1, 1) == ([2], [1])

    holds, checked, witness = ht.axiom_holds("sps", "additivity", trials=50)
    assert not holds and checked > 0 and witness

    try:
        ht.TollMatrix([[1.0, -1.0], [0.0, 0.0]])
    except ValueError as e:
        assert "negative" in str(e).lower()
    else:
        raise AssertionError("negative toll accepted")
    assert not math.isnan(ht.gini([1.0, 2.0]))
    print("python smoke test ok")


if __name__ == "__main__":
    main()
