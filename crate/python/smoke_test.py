"""Smoke test for the threshold_lab extension module."""

import json
import math

import threshold_lab as tl


def main():
    # table from the readme example: a dictator on [3]^2
    f = tl.Function.from_table(3, 2, [0, 0, 0, 1, 1, 1, 2, 2, 2])
    verdict = tl.check(f)
    assert verdict["monotone"]["pass"] and verdict["fair"]["pass"]
    assert not verdict["symmetric"]["pass"]

    plur = tl.Function.plurality(2, 9)
    curve = tl.scan(plur, anchor=0, grid=101)
    assert curve["values"][0] == 0.0 and abs(curve["values"][-1] - 1.0) < 1e-12
    w = tl.window(plur, eps=0.1)
    assert abs(w["width"] - 0.3980624728135708) < 1e-5, w

    assert tl.hypercontractive_sigma(0.5) == 1 / 24

    mu = tl.Measure([0.2, 0.3, 0.5])
    g = tl.Function.from_reals(3, 2, [0.5, -1.0, 2.0, 0.0, 1.5, -0.25, 3.0, 1.0, -2.0])
    assert tl.verify_hypercontractivity(g, mu)["ok"]
    inf = tl.influences(tl.Function.plurality(2, 3))
    assert all(abs(i - 0.125) < 1e-12 for i in inf["influences"])

    jury = tl.jury(tl.Function.plurality(3, 51), tl.Measure([0.4, 0.3, 0.3]), samples=2000, seed=1)
    assert jury["estimate"]["p_hat"] > 0.5
    again = tl.jury(tl.Function.plurality(3, 51), tl.Measure([0.4, 0.3, 0.3]), samples=2000, seed=1)
    assert jury == again

    profile = tl.mcgarvey(3, [(0, 1), (1, 2), (2, 0)])
    assert sorted(profile.strict_majority()) == [(0, 1), (1, 2), (2, 0)]

    cyclic = tl.ChoiceFunction(3, {(0, 1): 0, (0, 2): 2, (1, 2): 1, (0, 1, 2): 1})
    assert cyclic.rational() is None
    found = tl.saari(cyclic)
    assert found is not None and found["strict"]
    w_prof = found["profile"]
    for s in [(0, 1), (0, 2), (1, 2), (0, 1, 2)]:
        assert w_prof.plurality(list(s)) == cyclic(list(s))
    report = tl.indeterminacy(cyclic, w_prof, voters=1, samples=500, seed=3)
    assert 0.0 <= report["joint"] <= 1.0

    roundtrip = tl.Profile.from_json(w_prof.to_json())
    assert roundtrip.voters() == w_prof.voters()
    assert json.loads(f.to_json())["schema"] == "threshold-lab/function/v1"

    try:
        tl.jury(tl.Function.plurality(3, 5), tl.Measure([0.2, 0.5, 0.3]))
    except tl.ThresholdLabError as e:
        assert "strict leader" in str(e)
    else:
        raise AssertionError("expected an error")
    assert math.isfinite(tl.mean(plur))
    print("smoke test passed")


if __name__ == "__main__":
    main()
