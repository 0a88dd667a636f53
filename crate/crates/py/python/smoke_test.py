"""Smoke test for the ab_polya extension module."""
import json
import math
from fractions import Fraction

import ab_polya as ap


def main():
    a = ap.Flux("1/4")
    assert a.value == "1/4" and a.complement() == "3/4"
    assert abs(float(a) - 0.25) < 1e-15
    try:
        ap.Flux("3/4")
    except ValueError:
        pass
    else:
        raise AssertionError("flux 3/4 accepted")

    # G_lambda(0) = lambda / pi
    assert abs(ap.g_eval(5.0, 0.0) - 5.0 / math.pi) < 1e-14
    lo, hi = ap.g_eval_certified("5", "1", 40)
    assert Fraction(lo) <= Fraction(hi)
    assert Fraction(hi) - Fraction(lo) <= Fraction(1, 2**40)
    assert float(Fraction(lo)) <= ap.g_eval(5.0, 1.0) <= float(Fraction(hi)) + 1e-15

    q, exact = ap.q_count("5/2")
    assert exact and Fraction(q) - Fraction(25, 16) == Fraction(7, 16)

    assert abs(ap.bessel_zero(0.0, 1) - 2.404825557695773) < 1e-10
    assert abs(ap.bessel_zero(1.0, 1, derivative=True) - 1.841183781340659) < 1e-10

    spec = ap.ab_spectrum("dirichlet", ap.Flux("0"), 6.0)
    assert spec[0][2] == min(v for _, _, v in spec)
    assert len(ap.ab_spectrum("neumann", ap.Flux("1/2"), 10.0)) >= ap.p_neumann(10.0, ap.Flux("1/2"))

    chain = ap.run_chain("5/2", "9")
    assert len(chain) <= 30 and Fraction(chain.end) > 9
    assert chain.steps[0][2] == "7/16"
    chain.recheck()
    assert json.loads(chain.to_json())["steps"][0]["lambda"] == "5/2"

    ok, report = ap.validate_table()
    assert ok, report
    assert len(json.loads(report)["rows"]) == 15

    for cert in (ap.certify_small_lambda(), ap.certify_large_lambda()):
        doc = json.loads(cert)
        assert all(i["holds"] for i in doc["inequalities"]), doc

    rep = json.loads(ap.verify_polya("dirichlet", ap.Flux("1/2"), 50))
    assert not rep["violations"] and rep["min_margin"] > 0
    print("smoke test passed")


if __name__ == "__main__":
    main()
