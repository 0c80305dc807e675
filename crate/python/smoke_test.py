"""Smoke test for the pypolyorder extension module."""

import math

import pypolyorder as po


def main():
    xs = po.Field("xsininv")
    assert xs.dim == 1
    assert abs(xs.value([0.5]) - 0.5 * math.sin(2.0)) < 1e-15

    v = po.compare(xs, [0.31831], [1.0])
    assert v["relation"] == "StrictlyDominates", v["relation"]
    assert po.compare(po.Field("quadratic"), [0.0], [0.0])["relation"] == "Equivalent"
    assert po.compare(po.Field("cubic"), [-1.0], [0.0], kind="scalar")["relation"] == "StrictlyDominates"

    r = po.classify(xs, [1.0 / math.pi])
    assert r["minimal"] and r["critical"] and not r["maximal"]
    origin = po.classify(xs, [0.0])
    assert origin["minimal"] and origin["maximal"] and not origin["nss"]

    bowl = po.Field.quadratic([[2.0, 0.0], [0.0, 2.0]], [0.0, 0.0])
    assert po.classify(bowl, [0.0, 0.0])["ess"]
    assert not po.classify(bowl.negated(), [0.0, 0.0])["minimal"]

    hd = po.Game.named("hawk_dove")
    assert hd.is_nash([0.5, 0.5])
    rep = hd.classify([0.5, 0.5])
    assert rep["nss"] and rep["ess"] and rep["minimal"]
    assert po.Game.symmetric([[0.0, 0.0], [0.0, 0.0]]).is_nash([0.3, 0.7])
    assert po.Game.named("matching_pennies").is_nash([0.5] * 4)

    t, x, reason = po.integrate(po.Field("neg:xsininv"), [0.5])
    assert reason == "Converged" and abs(x[-1][0] - 1.0 / math.pi) < 1e-4
    assert len(t) == len(x)

    cat = po.catalog_agreement(n_max=5, grid_n=1024)
    assert cat["all_agree"] and len(cat["rows"]) == 10
    hat = po.mexican_hat(16)
    assert hat["confirmations"] == 16

    try:
        po.compare(po.Field("quadratic"), [5.0], [0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-domain point accepted")

    print("pypolyorder smoke test: ok")


if __name__ == "__main__":
    main()
