"""Smoke tests for the python bindings."""

import sys

import latsym


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def test_census():
    rows = latsym.catalog_list()
    assert len(rows) == 42
    abelian = {}
    nonsolvable = {}
    for r in rows:
        table = abelian if r["family"] == "A" else nonsolvable
        table[r["dim"]] = table.get(r["dim"], 0) + 1
    assert abelian == {1: 3, 2: 4, 3: 3, 4: 5, 5: 3, 6: 5, 7: 2, 8: 2, 10: 2, 12: 2}
    assert nonsolvable == {3: 1, 4: 1, 5: 2, 6: 1, 7: 2, 8: 1, 9: 1, 11: 1, 13: 1}


def test_jets():
    v0, v1, v2, v3 = latsym.eval_time("exp(2*t)", 0.0)
    assert approx(v0, 1) and approx(v1, 2) and approx(v2, 4) and approx(v3, 8)
    assert latsym.eval_time("t^2", 3.0) == (9.0, 6.0, 2.0, 0.0)
    assert latsym.eval_site("n*n + m", 3, -1) == 8.0


def test_grad():
    value, partials = latsym.eval_grad("x1^3 / x2", {"x1": 2.0, "x2": 4.0})
    assert approx(value, 2.0)
    assert approx(partials["x1"], 3.0)
    assert approx(partials["x2"], -0.5)


def test_detfun_and_neighbors():
    det = latsym.detfun(["n", "m", "1"], [(0, 0), (1, 0), (0, 1)])
    assert det == 1.0
    nb = latsym.neighbors(5, 5, 0, 0)
    assert nb == [(0, 0), (1, 0), (0, 1), (4, 1), (4, 0), (0, 4), (1, 4)]


def test_verify_one_class():
    rep = latsym.verify_class("A_1_1", samples=40, seed=3)
    assert rep["pass"], rep
    assert rep["structure"] == "abelian"
    assert rep["max_residual"] < 1e-8

    rep_ns = latsym.verify_class("NS_3_1", samples=40, seed=3)
    assert rep_ns["pass"], rep_ns
    assert rep_ns["structure"] == "nonsolvable-with-sl2"


def test_orbit_quick():
    out = latsym.orbit_check("A_2_4", generator=0, epsilon=0.02, h=0.01, t_end=0.5)
    assert out["transformed_residual"] <= 5 * out["base_residual"]


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"{name}: ok")
            except AssertionError as exc:
                failures += 1
                print(f"{name}: FAILED {exc}")
    sys.exit(1 if failures else 0)
