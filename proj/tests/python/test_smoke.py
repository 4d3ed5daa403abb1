import math
from pathlib import Path

import pytest

import fbreg

DATA = Path(__file__).resolve().parent.parent / "data"


def test_critical_exponents_match_arctan():
    k = fbreg.fractional_laplacian(1, 0.5)
    for v in (0.0, 1.0 / math.sqrt(3.0), 1.0, math.sqrt(3.0)):
        assert fbreg.gamma_critical(k, [1.0], v) == pytest.approx(0.5 + math.atan(v) / math.pi, abs=1e-12)
    assert fbreg.gamma_drift(1.0) == 0.25
    assert fbreg.gamma_elliptic(fbreg.fractional_laplacian(2, 0.7), [0.6, 0.8]) == pytest.approx(0.7)


def test_symbol_and_kernel_properties():
    k = fbreg.fractional_laplacian(2, 0.5, [1.0, 0.0])
    assert k.symmetric
    assert k.drift == [1.0, 0.0]
    A, B = fbreg.symbol(k, [1.0, 0.0], 2.0)
    assert A == pytest.approx(2.0, rel=1e-9)
    assert B == pytest.approx(2.0)


def test_two_sided_kernel_from_config():
    text = "\n".join(
        [
            "[run]",
            "scenario = gamma",
            "[kernel]",
            "s = 0.75",
            "Lambda = 2",
            "density = two-sided",
            "plus = 2",
            "minus = 1",
            "[gamma]",
            "v = 0",
        ]
    )
    k = fbreg.kernel_from_config(text)
    assert k.s == 0.75
    assert not k.symmetric
    assert fbreg.gamma_elliptic(k, [1.0]) != pytest.approx(0.75)


def test_power_law_fit():
    xs = [0.1, 0.2, 0.4, 0.8]
    slope, r2 = fbreg.fit_power_law(xs, [3.0 * x**1.5 for x in xs])
    assert slope == pytest.approx(1.5)
    assert r2 == pytest.approx(1.0)


def test_canonical_config_round_trip():
    text = (DATA / "gamma.ini").read_text()
    assert fbreg.canonical_config(text) == text
    assert fbreg.config_hash("[run]\nscenario = gamma\n") == fbreg.config_hash(text)


def test_run_writes_csv_and_grid(tmp_path):
    res = fbreg.run((DATA / "elliptic.ini").read_text(), str(tmp_path))
    assert res["csv"].startswith("# fbreg-csv v1\r\n")
    grids = [f for f in res["files"] if f.endswith(".fbrg")]
    assert len(grids) == 1
    g = fbreg.read_grid(grids[0])
    assert not g.has_time
    assert g.values.shape == (129,)
    assert g.h == pytest.approx(4.0 / 128)
    assert g.values.min() >= 0.0
    assert fbreg.holder_seminorm(g, 0.5, g.s) > 0.0


def test_bad_config_raises():
    with pytest.raises(fbreg.FbregError, match="E_DRIFT_S"):
        fbreg.canonical_config("[run]\nscenario = gamma\n[kernel]\ns = 0.75\ndrift = 1\n")
