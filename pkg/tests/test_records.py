"""Record validation and CSV round-trips."""

import numpy as np
import pytest

from solartwin.records import (
    AdopterTarget,
    Graph,
    HouseholdRecord,
    HouseholdTable,
    IngestError,
    IrradianceSeries,
    copy_record,
    load_households,
    load_irradiance,
    load_network,
    load_targets,
    save_households,
    save_irradiance,
    save_network,
    save_targets,
    sqft_class_of,
    sqft_class_range,
)

FEATURES = {
    "NHSLDMEM": 2,
    "BEDROOMS": 3,
    "TYPEHUQ": 2,
    "FUELHEAT": 1,
    "KOWNRENT": 1,
    "YEARMADERANGE": 5,
    "MONEYPY": 8,
    "BA_climate": 4,
}


def make_record(i=0, **kw):
    base = dict(
        id=i,
        state="VA",
        county="51001",
        tract="51001000001",
        lat=37.5,
        lon=-78.0,
        features=dict(FEATURES),
    )
    base.update(kw)
    return HouseholdRecord(**base)


def test_sqft_class_of_edges():
    assert sqft_class_of(1.0) == 0
    assert sqft_class_of(599.9) == 0
    assert sqft_class_of(600.0) == 1
    assert sqft_class_of(3999.0) == 6
    assert sqft_class_of(4000.0) == 7
    assert sqft_class_of(25000.0) == 7
    with pytest.raises(ValueError):
        sqft_class_of(0.0)


def test_sqft_class_range():
    assert sqft_class_range(0) == (0.0, 600.0)
    assert sqft_class_range(6) == (3000.0, 4000.0)
    assert sqft_class_range(7) == (4000.0, 8000.0)
    assert sqft_class_range(7, top_cap=9000.0) == (4000.0, 9000.0)
    with pytest.raises(ValueError):
        sqft_class_range(8)


def test_record_validation_errors():
    with pytest.raises(IngestError, match="lat"):
        make_record(lat=123.0).validate()
    bad = make_record()
    bad.features["MONEYPY"] = 42
    with pytest.raises(IngestError, match="MONEYPY code 42"):
        bad.validate()
    missing = make_record()
    del missing.features["FUELHEAT"]
    with pytest.raises(IngestError, match="missing feature FUELHEAT"):
        missing.validate()
    with pytest.raises(IngestError, match="sqft_class"):
        make_record(sqft_class=8).validate()
    with pytest.raises(IngestError, match="sqft_value"):
        make_record(sqft_value=-10.0).validate()


def test_duplicate_ids_rejected():
    with pytest.raises(IngestError, match="duplicate household id 3"):
        HouseholdTable([make_record(3), make_record(3)])


def test_feature_matrix_order():
    table = HouseholdTable([make_record(0), make_record(1)])
    X = table.feature_matrix()
    assert X.shape == (2, 8)
    assert X.dtype == np.int64
    assert list(X[0]) == [2, 3, 2, 1, 1, 5, 8, 4]


def test_households_roundtrip(tmp_path):
    records = [
        make_record(0, sqft_class=3, solar=True, lmi=False, rural=True),
        make_record(1, sqft_value=1234.5, solar=False, lmi=True, rural=False),
    ]
    table = HouseholdTable(records)
    path = tmp_path / "households.csv"
    save_households(table, path)
    again = load_households(path)
    assert again == table
    assert again[0].solar is True and again[0].sqft_value is None
    assert again[1].sqft_value == 1234.5


def test_households_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,state\n0,VA\n")
    with pytest.raises(IngestError, match="missing column county"):
        load_households(path)


def test_copy_record_does_not_share_features():
    rec = make_record(0)
    dup = copy_record(rec, solar=True)
    dup.features["MONEYPY"] = 1
    assert rec.features["MONEYPY"] == 8
    assert dup.solar is True and rec.solar is None


def test_irradiance_roundtrip(tmp_path):
    import datetime

    hours = np.arange(48, dtype=float)
    series = IrradianceSeries("t1", datetime.date(2018, 1, 1), hours)
    assert series.days == 2
    assert series.covers(datetime.date(2018, 1, 2))
    assert not series.covers(datetime.date(2018, 1, 3))
    assert list(series.ghi_for_date(datetime.date(2018, 1, 2))) == list(hours[24:])
    path = tmp_path / "irr.csv"
    save_irradiance(series, path)
    assert load_irradiance(path, "t1") == series


def test_irradiance_validation(tmp_path):
    import datetime

    with pytest.raises(IngestError, match="not divisible by 24"):
        IrradianceSeries("x", datetime.date(2018, 1, 1), np.zeros(25))
    with pytest.raises(IngestError, match="negative"):
        IrradianceSeries("x", datetime.date(2018, 1, 1), np.full(24, -1.0))

    rows = ["date,hour,ghi_wm2"]
    rows += [f"2018-01-01,{h},0.0" for h in range(24)]
    rows[5] = "2018-01-01,9,0.0"  # hour 4 replaced by 9
    path = tmp_path / "gap.csv"
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(IngestError, match=r"expected day 1 \(2018-01-01\) hour 4"):
        load_irradiance(path)

    short = tmp_path / "short.csv"
    short.write_text("date,hour,ghi_wm2\n" + "\n".join(f"2018-01-01,{h},1.0" for h in range(5)) + "\n")
    with pytest.raises(IngestError, match="ends mid-day"):
        load_irradiance(short)


def test_targets_roundtrip(tmp_path):
    targets = [AdopterTarget("VA", 50), AdopterTarget("MD", 7)]
    path = tmp_path / "targets.csv"
    save_targets(targets, path)
    assert load_targets(path) == targets
    with pytest.raises(IngestError, match="negative adopter count"):
        AdopterTarget("VA", -1)


def test_graph_dedup_and_validation():
    g = Graph(4, [(0, 1), (1, 0), (2, 3)])
    assert g.edge_count == 2
    assert g.edges == [(0, 1), (2, 3)]
    with pytest.raises(IngestError, match="self-loop at node 2"):
        Graph(4, [(2, 2)])
    with pytest.raises(IngestError, match="outside node range"):
        Graph(2, [(0, 5)])


def test_graph_adjacency_csr():
    g = Graph(4, [(0, 1), (0, 2), (2, 3)])
    offsets, neighbors = g.adjacency()
    assert list(offsets) == [0, 2, 3, 5, 6]
    assert sorted(neighbors[0:2]) == [1, 2]
    assert list(neighbors[2:3]) == [0]
    assert sorted(neighbors[3:5]) == [0, 3]
    assert list(neighbors[5:6]) == [2]


def test_network_roundtrip(tmp_path):
    g = Graph(5, [(0, 1), (3, 4)])
    path = tmp_path / "network.edges"
    save_network(g, path)
    assert load_network(path, 5) == g


def test_network_parsing(tmp_path):
    path = tmp_path / "net.edges"
    path.write_text("# comment\n0 1\n2,3\n\n")
    g = load_network(path)
    assert g.node_count == 4 and g.edge_count == 2
    bad = tmp_path / "bad.edges"
    bad.write_text("0 0\n")
    with pytest.raises(IngestError, match="line 1: self-loop at node 0"):
        load_network(bad)
    trio = tmp_path / "trio.edges"
    trio.write_text("0 1 2\n")
    with pytest.raises(IngestError, match="expected two endpoints"):
        load_network(trio)
