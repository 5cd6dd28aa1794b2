"""Smoke test for the extdec Python module. Build it first with python/build.sh."""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import extdec  # noqa: E402


def main():
    r = extdec.snf([[2, 4], [6, 8]])
    assert r["diagonal"] == [2, 4], r

    assert extdec.primary_decomposition([12])["orders"] == [4, 3]

    orders, inj = extdec.kernel([4], [2], [[1]])
    assert orders == [2] and inj == [[2]], (orders, inj)
    assert extdec.solve([0], [5], [[2]], [1]) is not None
    assert extdec.solve([4], [4], [[2]], [1]) is None

    op = extdec.DiffOperator(2, 2, 4)
    assert (op.ell, op.theta, op.terms) == (4, 8, [(1, 2), (2, 1)]), repr(op)
    checks, bad = op.sweep(trials=20, seed=1)
    assert checks > 0 and bad == 0
    again = extdec.DiffOperator.from_json(op.to_json())
    assert again.terms == op.terms

    # Z/16 acting on itself, f = identity into Z/16 read mod 4
    table = [(x + y) % 16 for x in range(16) for y in range(16)]
    assert op.check(16, 16, table, 0, [16], [[x] for x in range(16)]) == []

    doc = json.loads(op.to_json())
    doc["terms"][1][0] = 3
    broken = extdec.DiffOperator.from_json(json.dumps(doc))
    assert broken.sweep(trials=50, seed=1)[1] > 0

    tower = json.dumps({"format_version": "1", "ground": [2], "layers": [{"q": 4, "kappa": [[1, 3]]}]})
    report = extdec.verify_tower(tower)
    assert report["violations"] == [] and report["common_theta"] == 4, report

    yes = extdec.generate_instance(1, theta=6, hint=True)
    assert yes == extdec.generate_instance(1, theta=6, hint=True)
    assert extdec.validate_instance(yes) == []
    fast, slow = extdec.decide(yes), extdec.brute_force(yes)
    assert fast["verdict"] == slow["verdict"] == "YES", (fast, slow)

    try:
        extdec.DiffOperator(6, 1, 1)
    except ValueError as e:
        assert "not prime" in str(e)
    else:
        raise AssertionError("p = 6 accepted")

    print("extdec smoke test passed")


if __name__ == "__main__":
    main()
