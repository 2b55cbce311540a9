"""Smoke test for the pycliffdirac extension module.

Build and install first:
    pip install --no-build-isolation -e crates/py
then run:
    python python/smoke_test.py
"""

import math

import pycliffdirac as cd


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # e1 e1 = -1 and e1 e2 = -e2 e1 in R_{0,3}
    e1 = cd.Multivector.blade(3, 0b001)
    e2 = cd.Multivector.blade(3, 0b010)
    assert (e1 * e1).coeffs[0] == -1
    assert e1 * e2 == (e2 * e1).scale(-1.0)

    x = cd.Multivector.vector(3, [1.0, 2.0, 2.0])
    assert close((x * x.vector_inverse()).coeffs[0].real, 1.0)

    assert cd.product_constant(4, complex=True) == 2.0
    table = cd.constants_table(3)
    assert close(table["C1_young"], 0.88711336, 1e-7)
    assert close(table["C1_plancherel"], 6.38498896, 1e-7)
    assert cd.zero_mode_thresholds(1.0) == (3.5, 4.9)

    # D^2 = -Laplacian on a Gaussian, and the Gaussian L2 norm
    f = cd.Field.gaussian(3, 24, 8.0, width=1.0, mask=0b011)
    lhs = f.dirac().dirac()
    rhs = f.laplacian().scale(-1.0)
    assert (lhs - rhs).norm(2.0) <= 1e-10 * rhs.norm(2.0)
    assert close(f.norm(2.0), math.pi ** 0.75, 1e-6)

    # heat flow does not increase the L2 norm
    assert f.heat(0.5).norm(2.0) <= f.norm(2.0)

    report = cd.verify("nash", grid=16, extent=8.0, cases=3)
    assert report["summary"]["fail"] == 0 and len(report["results"]) == 3

    try:
        cd.Field.gaussian(3, 7, 8.0)
    except ValueError:
        pass
    else:
        raise AssertionError("odd grid accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
