"""Smoke test for the pyhasse extension module."""

import json

import pyhasse


def main():
    assert pyhasse.legendre(2, 17) == 1
    assert pyhasse.lift_rth_power(2, 2, 7, 2) == 10
    assert pyhasse.lift_fourth_power_2adic(17, 5) == 3
    assert pyhasse.decide_p_local(1, 3, 7, 2) is False
    assert pyhasse.padic_from_int(17, 2, 5) == [1, 1, 1, 1, 17]

    lr = pyhasse.System(1, 0, -17, 2)
    report = lr.decide_local()
    assert report.locally_solvable
    witnesses = {p: (w, m) for p, _, _, w, m in report.primes}
    assert witnesses[2] == ((1, 1, 1, 0), 16)
    assert witnesses[17] == ((6, 0, 0, 1), 17)
    assert lr.global_search(200) is None
    assert json.loads(report.to_json())["locally_solvable"] is True

    sol = pyhasse.System(1, 1, 1, 1).padic_solve(7, 3)
    assert pyhasse.System(1, 1, 1, 1).satisfies_mod(sol, 7**3)

    cert = pyhasse.certify_counterexample(17, 2)
    assert cert is not None and cert.verify() is None
    again = pyhasse.Certificate.from_json(cert.to_json())
    assert again.verify() is None
    assert pyhasse.certify_counterexample(17, 4) is None
    found = [(c.q, c.d) for c in pyhasse.search_counterexamples(20, 19)]
    assert (17, 2) in found and (17, 19) in found

    try:
        pyhasse.System(1, 0, 3, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("d = 0 accepted")
    print("pyhasse smoke test passed")


if __name__ == "__main__":
    main()
