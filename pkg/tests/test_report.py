import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest

from robustmean import report as rep
from robustmean.bounds import BoundParams, check_validity, theorem41_bound
from robustmean.contamination import DistributionSpec
from robustmean.estimators import EstimatorSpec
from robustmean.experiments import deviation_experiment, efficiency_comparison, empirical_rbp

GAUSS = DistributionSpec.gaussian()


@pytest.fixture(scope="module")
def deviation():
    return deviation_experiment(EstimatorSpec("winsorized"), GAUSS, 100, 300, eps=0.05, seed=1)


@pytest.fixture(scope="module")
def breakdowns():
    return [empirical_rbp(EstimatorSpec(k), 10) for k in ("mean", "median", "winsorized")]


def parse_table(text):
    head, body = text.split("\n", 1)
    return head, list(csv.reader(io.StringIO(body)))


class TestJson:
    def test_round_trip_deviation(self, deviation):
        text = rep.to_json(deviation)
        assert rep.from_json(text) == deviation
        assert rep.to_json(rep.from_json(text)) == text

    def test_round_trip_list(self, breakdowns):
        assert rep.from_json(rep.to_json(breakdowns)) == breakdowns

    def test_round_trip_efficiency(self):
        e = efficiency_comparison(GAUSS, 50, 1000, [EstimatorSpec("median")], seed=2)
        assert rep.from_json(rep.to_json(e)) == e

    def test_envelope(self, deviation):
        env = json.loads(rep.to_json(deviation, {"bound": 1.0}))
        assert env["schema"] == 1 and env["report"] == "deviation"
        assert env["extra"] == {"bound": 1.0}

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            rep.from_json('{"schema": 2, "report": "deviation", "data": {}}')
        with pytest.raises(ValueError):
            rep.from_json('{"schema": 1, "report": "mystery", "data": {}}')
        with pytest.raises(TypeError):
            rep.to_json(object())

    def test_workers_byte_identical(self):
        runs = [
            rep.to_json(deviation_experiment(EstimatorSpec("mom"), GAUSS, 60, 150, eps=0.05, seed=4, workers=w))
            for w in (1, 8)
        ]
        assert runs[0] == runs[1]


class TestCsv:
    def test_breakdown_columns(self, breakdowns):
        head, rows = parse_table(rep.breakdown_csv(breakdowns, seed=0))
        assert head == "# robust-mean-lab report v1, command=breakdown, seed=0"
        assert rows[0] == rep.BREAKDOWN_COLUMNS
        assert [r[0] for r in rows[1:]] == ["mean", "median", "winsorized(beta=3.0)"]
        assert [r[6] for r in rows[1:]] == ["True"] * 3

    def test_deviation_rows(self, deviation):
        head, rows = parse_table(rep.deviation_csv(deviation))
        assert "seed=1" in head
        assert rows[0] == rep.DEVIATION_COLUMNS
        assert len(rows) == 1 + len(deviation.tail_curve)

    def test_bounds_row(self):
        p = BoundParams(100, 0.05, 0.0, 0.05)
        _, rows = parse_table(rep.bounds_csv(p, theorem41_bound(p), check_validity(p), 7))
        row = dict(zip(rows[0], rows[1]))
        assert row["valid"] == "False" and row["min_n"] == "5055"


class TestSvg:
    def test_well_formed(self, deviation):
        svg = rep.tail_svg(deviation)
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg")
        ns = "{http://www.w3.org/2000/svg}"
        assert len(root.findall(f"{ns}circle")) == len([p for p in deviation.tail_curve if p[1] > 0])
        assert root.findall(f"{ns}line")
        assert "href" not in svg
