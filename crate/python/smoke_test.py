"""Smoke test for the qcurrent_py extension.

Build first:  pip install --no-build-isolation -e crates/py
"""
import json
from pathlib import Path

import qcurrent_py as qc

ROOT = Path(__file__).resolve().parent.parent


def main():
    q = qc.q_closed(3, 3, 8)
    assert q.vars() == ["z", "w"] and len(q) > 0
    assert q.coeff(0, [0, 0]) == ("1", "0")
    again = qc.Series.from_text(q.to_text())
    assert (again - q).is_zero()

    num, inv = qc.vanishing_locus(3, 4, 10)
    assert num.is_zero() and inv.is_zero()
    assert qc.scaling_covariance(3, 1, 2, 4, 10).is_zero()

    d = qc.basis_duality(3, 4)
    assert all(d[i][j] == ("1" if i == j else "0") for i in range(4) for j in range(4))
    status, twist, dual = qc.classical_twist(3, 8, "e[z^-2]")
    assert (status, twist, dual) == ("pass", 0, 0)
    assert qc.xy_equivalence_failures(2, 4, 8) == 0

    t = qc.ThetaData([[1j]], [0.5], [0.5])
    val, err = t.eval([0j])
    assert abs(val) < 1e-12 and err < 1e-12 and t.parity() == -1
    g = qc.ThetaData([[1j, 0.2 + 0.1j], [0.2 + 0.1j, 1.3j]], [0.5, 0.5], [0.5, 0.0])
    u = [0.21 + 0.03j, -0.17 + 0.02j]
    e = [0j, 0j]
    h = [1 + 0j, 0.5 + 0j]
    gu = g.green_h(u, e, h)
    gmu = g.green_h([-x for x in u], e, h)
    assert abs(gu + gmu) < 1e-10

    rows = qc.fixture_checks(str(ROOT / "fixtures" / "g2.fx"))
    assert rows and all(r[4] for r in rows), [r for r in rows if not r[4]]

    rep = json.loads(qc.run_suite("zn", n=[2], k=4, window=8))
    assert rep["summary"]["fail"] == 0 and rep["summary"]["total"] > 0
    print("smoke test ok:", qc.__version__, f"{len(rows)} theta rows,", rep["summary"]["total"], "zn records")


def test_smoke():
    main()


if __name__ == "__main__":
    main()
