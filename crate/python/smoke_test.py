"""Smoke test for the citoolkit extension module."""

import math

import citoolkit as ct


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    half = ct.State([("A", 2)], [[0.5, 0], [0, 0.5]])
    close(half.entropy(), 1.0, 1e-12)

    ghz = ct.State.preset("ghz")
    assert ghz.labels == ["A", "B", "C"]
    close(ct.ci_pure_regularized(ghz, ["A"], ["B"], ["C"]), 2.0, 1e-9)
    close(ct.mutual_info(ghz, ["A"], ["B", "C"]), 2.0, 1e-9)

    bell = ct.State.preset("bell")
    d = ct.discord(bell, ["A"], "B", restarts=4)
    assert d.direction == "upper-est"
    close(d.value, 1.0, 2e-2)
    close(ct.log_negativity(bell, ["A"], ["B"]), 1.0, 1e-9)

    c = math.cos(math.pi / 8)
    close(ct.family15_two_round_merge(c), 1.0, 1e-9)
    fam = ct.State.preset("family15", [c])
    bounds = ct.ci_bounds(fam, ["A"], "B", ["C"], restarts=4)
    assert bounds["lower"] <= bounds["upper"] + 1e-9

    rho = ct.State.random(["A", "B", "C"], seed=3, rank=4)
    back = ct.State.from_json(rho.to_json())
    assert back.matrix() == rho.matrix()
    close(ct.lqsm_fidelity_bound(2.5, 0.5), 0.5, 1e-12)

    try:
        ct.State.preset("nope")
    except ValueError as e:
        assert "preset" in str(e)
    else:
        raise AssertionError("unknown preset accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
