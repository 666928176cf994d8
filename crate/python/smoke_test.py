"""Smoke test for the facediv extension module.

Build it first, for example with
    pip install --no-build-isolation ./crates/python
then run
    python python/smoke_test.py
"""

import json
import math
import pathlib
import tempfile

import facediv

ROOT = pathlib.Path(__file__).resolve().parent.parent
MANIFEST = ROOT / "crates" / "core" / "data" / "corpus" / "manifest.jsonl"


def check_diversity():
    h = facediv.Histogram([float(i) for i in range(21)], [1] * 20)
    s = h.scores()
    assert abs(s.shannon_h - math.log(20)) < 1e-12, s
    assert abs(s.simpson_d - 20.0) < 1e-9 and abs(s.shannon_e - 1.0) < 1e-9

    two = facediv.Histogram.from_values([0.0, 1.0], edges=[0.0, 0.5, 1.0])
    assert two.counts == [1, 1]
    assert abs(two.scores().shannon_h - 0.6931) < 5e-4

    ages = facediv.Histogram.from_values([2.0, 15.0, 50.0], edges=[0, 4, 13, 20, 31, 46, 61, 120])
    assert ages.counts == [1, 0, 1, 0, 0, 1, 0]

    merged = h.merge(h)
    assert abs(merged.scores().shannon_h - s.shannon_h) < 1e-12

    try:
        facediv.Histogram([0.0, 1.0], [1, 2])
    except facediv.FacedivError:
        pass
    else:
        raise AssertionError("mismatched edges accepted")


def check_scalars():
    assert abs(facediv.ita(71.0, 21.0) - 45.0) < 1e-9
    one_hot = [0.0] * 101
    one_hot[37] = 1.0
    assert facediv.expected_age(one_hot) == 37.0
    assert abs(facediv.expected_age([1 / 101] * 101) - 50.0) < 1e-9


def check_geometry():
    k = facediv.canonical_keypoints()
    m = facediv.craniofacial_measures(k, 0.0)
    assert len(m) == 28
    assert m["n_sto"] == 55.0 and m["zy_zy"] == 86.0
    assert facediv.quality_filter((0.0, 0.0, 49.0, 49.0), k, 0) == "size"
    assert facediv.quality_filter((0.0, 0.0, 80.0, 80.0), k, 1) == "pose"
    assert facediv.quality_filter((0.0, 0.0, 80.0, 80.0), k, 0) is None


def check_pipeline():
    assert facediv.validate_manifest(str(MANIFEST)) == 12
    with tempfile.TemporaryDirectory() as tmp:
        table, rejected = facediv.extract(str(MANIFEST), workers=2, out_dir=tmp)
        assert len(table) == 10
        assert sorted(rejected) == [("face03", "size"), ("face07", "pose")]
        again = facediv.FeatureTable.load(str(pathlib.Path(tmp) / "features.json"))
        assert again.to_json() == table.to_json()

        rows = table.rows()
        assert rows[0]["face_id"] == "face00" and "ita" in rows[0]
        assert table.columns[0] == "face_id" and len(table.columns) == 48

        rep = table.report()
        rrows = rep.rows()
        assert [r["dimension"] for r in rrows] == [d[0] for d in facediv.dimensions()]
        gender = next(r for r in rrows if r["dimension"] == "gender_label")
        assert 0.0 <= gender["scores"].shannon_e <= 1.0
        assert rep.to_csv().splitlines()[0].startswith("Coding Scheme,Measurement,Simpson D")
        assert len(json.loads(rep.to_json())["rows"]) == 47
        ages = rep.histogram("age_label")
        assert sum(ages.counts) == 10
        written = rep.write(str(pathlib.Path(tmp) / "report"))
        assert any(str(p).endswith("report.csv") for p in written)


if __name__ == "__main__":
    check_diversity()
    check_scalars()
    check_geometry()
    check_pipeline()
    print("facediv smoke test passed")
