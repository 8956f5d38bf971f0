"""Smoke test for the hyperbaker_py extension.

Build and install it first, e.g.

    pip install --no-build-isolation ./crates/python
"""

import cmath

import hyperbaker_py as hb


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # y^2 = x^4 - 1 with branch point a = 1
    curve = hb.Curve(1, ["1", "0", "0", "0", "-1"], "1")
    assert curve.genus == 1
    assert len(curve.fingerprint) == 64

    assert hb.baker_matrix(curve) == [["(2*x1 + 2)/(x1 - 1)"]]
    assert hb.baker_matrix(curve, xs=["3/2"]) == [["10"]]
    assert hb.baker_matrix(genus=1)[0][0].startswith("(")
    assert hb.omega(genus=1)["omega"] == [["-2*a^2*nu0 - a*nu2"]]
    series = hb.h_series(curve, order=6)
    assert series[:2] == ["0", "1"]

    per = hb.periods(curve)
    assert per["genus"] == 1 and len(per["tau"]) == 1

    h = hb.HFunction(curve)
    v = h.random_v(1)
    assert close(h(v, route="definition"), h(v), 1e-10)
    assert abs(h([0j])) < 1e-12

    # -d^2 log H at the Abel image of a point equals P evaluated there
    pts = h.random_divisor(3)
    p_alg = h.baker_at(pts)[0][0]
    p_h = h.baker_from_h(h.abel_jacobi(pts))[0][0]
    assert close(p_h, p_alg, 1e-8), (p_h, p_alg)

    # sigma(u) ~ u near 0 for genus 1
    u = 1e-3 + 2e-3j
    assert abs(h.sigma([u]) / u - 1) < 1e-5
    assert cmath.isfinite(h.wp([0.3 + 0.2j])[0][0])

    report = hb.verify("all", curve=curve, seed=0)
    failed = [c["name"] for c in report["checks"] if not c["pass"]]
    assert report["pass"], failed
    assert len(report["checks"]) >= 30

    g2 = hb.Curve.random(2, 5)
    assert hb.verify("algebraic", curve=g2)["pass"]

    try:
        hb.verify("nonsense")
    except ValueError:
        pass
    else:
        raise AssertionError("bad suite accepted")

    print(f"ok: {len(report['checks'])} checks on {curve!r}")


if __name__ == "__main__":
    main()
