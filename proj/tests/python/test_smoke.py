import re

import pytest

import brainschema as bs


def tiny():
    c = bs.CortexConfig()
    c.regions_per_hemisphere = 2
    c.total_columns = 8
    c.total_neurons = 160
    c.neurons_per_microcolumn = 10
    return c


def test_table_rows():
    rows = bs.published_cortex_rows()
    assert len(rows) == 8
    assert rows[0]["columns_per_region"]["value"] == 3387
    assert rows[0]["regions_at_microcolumn_granularity"] == 1_050_000_000
    assert rows[7]["erratum"] == {"field": "microcolumns_per_column", "printed": 2100, "derived": 2600}
    assert bs.total_regions(bs.CortexConfig()) == 1_050_000_000


def test_naming_round_trip():
    s = bs.Schema(tiny())
    for i in range(s.total_neurons):
        assert s.index(s.label(i)) == i
    assert s.label(0) == "left/region_01/1/1/II#1"
    assert s.resolve("left/region_01/1/1/II") == (0, 2)
    assert s.resolve("right") == (80, 160)
    assert s.regions(depth=1) == ["left", "right"]
    assert len(s.regions()) == s.regions_at_depth(5) == 80
    assert s.address(159) == (1, 1, 1, 1, 4, 1)


def test_errors_are_typed():
    s = bs.Schema(tiny())
    with pytest.raises(bs.ParseError):
        s.resolve("left/region_09")
    with pytest.raises(bs.AddressError):
        s.label(160)
    bad = tiny()
    bad.total_columns = 1
    with pytest.raises(bs.ConfigError):
        bs.Schema(bad)
    assert issubclass(bs.ParseError, bs.Error)
    assert issubclass(bs.Error, RuntimeError)


def test_cerebellum():
    s = bs.Schema(bs.CerebellumConfig())
    assert s.kind == "cerebellum"
    assert s.regions_at_depth(5) == 1_300_000_200
    assert s.level_name(3) == "lobule"


def test_generator():
    a = bs.generate_block(0, 0, 1000, 1e-3, seed=42)
    assert len(a) == 1000
    assert len({(r, c) for r, c, _ in a}) == 1000
    assert all(0 < w <= 1 for _, _, w in a)
    assert a == bs.generate_block(0, 0, 1000, 1e-3, seed=42)
    triples = bs.label_triples(bs.Schema(), 0, 1, 100, 0.01, seed=3)
    assert len(triples) == 100
    assert all(re.fullmatch(r"[^#]+#\d+", t[0]) for t in triples)


@pytest.mark.parametrize("backend", ["memory", "durable"])
def test_ingest(backend, tmp_path):
    store = bs.memory_store() if backend == "memory" else bs.durable_store(tmp_path / "db")
    m = bs.ingest(store, bs.Schema(), 20_000, workers=2, batch_size=1000)
    assert m["entries"] == 20_000
    assert store.count() == 20_000
    for phase in ("for", "load", "ingest"):
        assert m[phase + "_rate"] == pytest.approx(20_000 / m[phase + "_seconds"], rel=1e-12)
    rows = store.scan(limit=5)
    assert len(rows) == 5
    assert [(r, c) for r, c, _ in rows] == sorted((r, c) for r, c, _ in rows)


def test_bench_outputs():
    rows = bs.bench([2000], [1, 2], trials=1)
    assert [r["workers"] for r in rows] == [1, 2]
    csv = bs.csv(rows)
    assert csv.splitlines()[0] == "entries,workers,trial,for_rate,load_rate,ingest_rate,total_seconds"
    assert len(csv.splitlines()) == 3
    svg = bs.plot(rows)
    assert svg.count("<polyline") == 3
    with pytest.raises(bs.ConfigError):
        bs.bench([10], [1], backend="tape")
