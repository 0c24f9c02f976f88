"""Smoke test for the pyncdirac extension module.

Build and install first:
    pip install --no-build-isolation ./crates/python
Then run with python or pytest.
"""

import json
import tempfile

import pytest

import pyncdirac as nd


def test_canonical_commutators():
    x1, p1 = nd.Expression("x[1]"), nd.Expression("p[1]")
    assert str(x1.commutator(p1)) == "i*hbar"
    x2 = nd.Expression("x[2]")
    assert x1.commutator(x2).is_zero()
    assert str(x1.commutator(x2, mode="nc-space")) == "1/2*i*Theta"


def test_expression_arithmetic():
    a = nd.Expression("x[1] + p[2]")
    b = nd.Expression("x[1]")
    assert (a - b) == nd.Expression("p[2]")
    assert (a - a).is_zero()
    assert nd.Expression("c*alpha[1]").latex() == r"c \alpha_{1}"
    with pytest.raises(ValueError):
        nd.Expression("x[1] +")


def test_derive_position_rate():
    with tempfile.TemporaryDirectory() as out:
        clean, report = nd.derive("position-rate", out=out)
        assert isinstance(report, dict)
    commutative = json.dumps({"constants": {"Theta": 0, "eta": 0}})
    with tempfile.TemporaryDirectory() as out:
        clean, report = nd.derive("position-rate", config=commutative, out=out)
        assert clean
    with pytest.raises(ValueError):
        nd.derive("nothing")


def test_algebra_report_rows():
    rows = nd.algebra_report()
    assert [r["relation"] for r in rows][0] == "[x1,x2]"
    assert len(rows) == 10


def test_limits_pass():
    with tempfile.TemporaryDirectory() as out:
        passed, _ = nd.limits(out=out)
        assert passed


def test_matrix_residuals():
    r = nd.residual("[x[1], p[1]]", "i*hbar", dim=2, levels=10, guard=3)
    assert r < 1e-12
    assert nd.hermiticity(nd.Expression("c*alpha[1]*p[1]"), levels=10, guard=3) < 1e-12
    assert nd.hermiticity(nd.Expression("i*x[1]*p[1]"), levels=10, guard=3) > 1e-3


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
