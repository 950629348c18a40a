from fractions import Fraction

import pytest

from latpoly.core.errors import ConfigError, InsufficientData
from latpoly.mainterm import KIND_CROSS, KIND_SIMPLEX
from latpoly.models import DiscrepancyRecord, MainTermKind, Spacing, SweepRequest
from latpoly.polytope import GeneralSimplex, parse_polytope
from latpoly.sweep import (
    CSV_COLUMNS,
    SweepConfig,
    count_polytope,
    fit_exponent,
    main_term_for,
    monotonicity_violations,
    read_csv,
    scan_discrepancy,
    windowed_means,
    write_csv,
)

DIAMOND = "cross d=2 a=[1, 1]"


def _record(t, delta, count=0):
    return DiscrepancyRecord(t=str(t), count=count, main_term=count - delta, delta=delta, certified=True)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(t_start=Fraction(1, 2), t_stop=Fraction(3), t_count=3),
        dict(t_start=Fraction(3), t_stop=Fraction(2), t_count=3),
        dict(t_start=Fraction(1), t_stop=Fraction(2), t_count=0),
        dict(t_start=Fraction(1), t_stop=Fraction(2), t_count=3, n=1),
        dict(t_start=Fraction(1), t_stop=Fraction(2), t_count=3, precision_bits=1),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SweepConfig(polytope=DIAMOND, **kwargs)


def test_config_rejects_bad_polytope():
    with pytest.raises(ConfigError):
        SweepConfig(polytope="sphere d=2", t_start=Fraction(1), t_stop=Fraction(2), t_count=2)


def test_config_from_mapping():
    cfg = SweepConfig.from_mapping(
        {"POLYTOPE": DIAMOND, "T_START": "1", "T_STOP": "9/2", "T_COUNT": "8", "T_SPACING": "log", "SEED": "3"}
    )
    assert cfg.t_stop == Fraction(9, 2)
    assert cfg.t_spacing == Spacing.log
    assert cfg.seed == 3
    assert cfg.main_term == MainTermKind.auto
    assert cfg.output is None
    with pytest.raises(ConfigError):
        SweepConfig.from_mapping({"POLYTOPE": DIAMOND, "T_START": "1"})
    with pytest.raises(ConfigError):
        SweepConfig.from_mapping({"POLYTOPE": DIAMOND, "T_START": "sqrt(2)", "T_STOP": "2", "T_COUNT": "2"})
    with pytest.raises(ConfigError):
        SweepConfig.from_mapping({"POLYTOPE": DIAMOND, "T_START": "1", "T_STOP": "2", "T_COUNT": "dos"})
    with pytest.raises(ConfigError):
        SweepConfig.from_mapping(
            {"POLYTOPE": DIAMOND, "T_START": "1", "T_STOP": "2", "T_COUNT": "2", "T_SPACING": "cuadrática"}
        )


def test_config_from_file(tmp_path):
    path = tmp_path / "sweep.env"
    path.write_text('POLYTOPE="simplex d=3 a=[1, 2, 3]"\nT_START=2\nT_STOP=6\nT_COUNT=3\nMAIN_TERM=q\n')
    cfg = SweepConfig.from_file(str(path))
    assert cfg.polytope == "simplex d=3 a=[1, 2, 3]"
    assert cfg.main_term == MainTermKind.q
    assert cfg.grid() == [2, 4, 6]
    with pytest.raises(ConfigError):
        SweepConfig.from_file(str(tmp_path / "missing.env"))


def test_config_from_request():
    request = SweepRequest(polytope=DIAMOND, t_start="3/2", t_stop="5", t_count=4)
    cfg = SweepConfig.from_request(request)
    assert cfg.t_start == Fraction(3, 2)
    assert cfg.grid()[-1] == 5


def test_grids():
    linear = SweepConfig(polytope=DIAMOND, t_start=Fraction(1), t_stop=Fraction(3), t_count=5)
    assert linear.grid() == [1, Fraction(3, 2), 2, Fraction(5, 2), 3]
    log = SweepConfig(polytope=DIAMOND, t_start=Fraction(1), t_stop=Fraction(100), t_count=5, t_spacing=Spacing.log)
    points = log.grid()
    assert len(points) == 5
    assert points[0] == 1 and points[-1] == 100
    assert points[2] == pytest.approx(10, rel=1e-11)
    single = SweepConfig(polytope=DIAMOND, t_start=Fraction(7, 2), t_stop=Fraction(7, 2), t_count=9)
    assert single.grid() == [Fraction(7, 2)]


def test_scan_unit_diamond(tmp_path):
    output = tmp_path / "out" / "diamond.csv"
    cfg = SweepConfig(polytope=DIAMOND, t_start=Fraction(1), t_stop=Fraction(3), t_count=3, output=str(output))
    records = scan_discrepancy(cfg, workers=1)
    assert [r.t for r in records] == ["1", "2", "3"]
    assert [r.count for r in records] == [5, 13, 25]
    for r in records:
        t = r.t_float
        assert r.main_term == pytest.approx(2 * t * t + 2.0 / 3.0, rel=1e-12)
        assert r.delta == pytest.approx(2 * t + 1.0 / 3.0, rel=1e-12)
        assert r.certified
    assert output.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert read_csv(str(output)) == records


def test_scan_is_independent_of_workers():
    cfg = SweepConfig(polytope="corner d=2 a=[sqrt(2), 1/2]", t_start=Fraction(1), t_stop=Fraction(6), t_count=6)
    assert scan_discrepancy(cfg, workers=2) == scan_discrepancy(cfg, workers=1)


def test_rerun_with_same_seed_writes_identical_csv(tmp_path):
    cfg = SweepConfig(polytope="cross d=2 a=[1, sqrt(2)]", t_start=Fraction(1), t_stop=Fraction(40), t_count=12,
                      t_spacing=Spacing.log, seed=3)
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    write_csv(scan_discrepancy(cfg, workers=2), str(first))
    write_csv(scan_discrepancy(cfg, workers=1), str(second))
    assert first.read_bytes() == second.read_bytes()


def test_write_csv_creates_parent(tmp_path):
    path = tmp_path / "a" / "b" / "records.csv"
    write_csv([_record(Fraction(5, 2), 0.25, count=7)], str(path))
    (record,) = read_csv(str(path))
    assert record.t == "5/2"
    assert record.delta == 0.25


def test_main_term_selection():
    corner = parse_polytope("corner d=2 a=[1, 2] sign=[1, 1]")
    assert main_term_for(corner, MainTermKind.auto, 128).kind == KIND_SIMPLEX
    assert main_term_for(corner, MainTermKind.p, 128).kind == KIND_CROSS
    empty_face = parse_polytope("face d=2 a=[1, 2] I=[]")
    assert main_term_for(empty_face, MainTermKind.auto, 128)(5.0) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        main_term_for(GeneralSimplex.standard(2), MainTermKind.auto, 128)
    with pytest.raises(ConfigError):
        count_polytope(GeneralSimplex.standard(2), 2)


def test_fit_exponent_on_linear_discrepancy():
    cfg = SweepConfig(polytope=DIAMOND, t_start=Fraction(1), t_stop=Fraction(64), t_count=64)
    records = scan_discrepancy(cfg, workers=1)
    # Δ(t) = 2t + 1/3 en enteros
    fit = fit_exponent(records)
    assert fit.slope == pytest.approx(1.0, abs=0.1)
    with pytest.raises(InsufficientData):
        fit_exponent(records[:10])
    with pytest.raises(ValueError):
        fit_exponent(records, window=0)


def test_windowed_means_and_monotonicity():
    records = [_record(t, float(t), count=c) for t, c in ((1, 3), (2, 5), (3, 4), (4, 9))]
    means = windowed_means(records, [1, 2])
    assert means[1] == pytest.approx(1.5)
    assert means[2] == pytest.approx(3.0)
    with pytest.raises(InsufficientData):
        windowed_means(records, [10])
    assert monotonicity_violations(records) == 1
