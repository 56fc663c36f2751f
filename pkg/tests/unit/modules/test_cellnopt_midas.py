import pytest

import saltext.cellnopt.modules.cellnopt_midas as cellnopt_midas

MEASUREMENTS = [
    {"protein": "AKT", "time": 0, "stimuli": {"EGFR": 1}, "inhibitors": {"AKT": 0}, "value": 0.1},
    {"protein": "AKT", "time": 10, "stimuli": {"EGFR": 1}, "inhibitors": {"AKT": 0}, "value": 0.9},
]


@pytest.fixture
def configure_loader_modules():
    return {cellnopt_midas: {}}


def test_read(midas_file):
    assert cellnopt_midas.read(midas_file) == {
        "cell_line": "Cell",
        "stimuli": ["Input1", "Input2"],
        "inhibitors": [],
        "signals": ["Output"],
        "experiments": ["experiment_0", "experiment_1", "experiment_2", "experiment_3"],
        "times": [0.0, 10.0],
    }


def test_read_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("TR:EGF,DA:ALL,DV:AKT\n2,0,0.1\n")
    assert "treatment must be 0 or 1" in cellnopt_midas.read(str(path))["error"]


def test_condition(midas_file):
    assert cellnopt_midas.condition(midas_file, "experiment_1") == {
        "stimuli": {"Input1": 1, "Input2": 0},
        "inhibited": [],
    }
    assert "error" in cellnopt_midas.condition(midas_file, "experiment_9")


def test_timecourse(midas_file):
    assert cellnopt_midas.timecourse(midas_file, "experiment_3", "Output") == [
        [0.0, 0.0],
        [10.0, 1.0],
    ]
    assert "error" in cellnopt_midas.timecourse(midas_file, "experiment_3", "ERK")


def test_build_text():
    text = cellnopt_midas.build(MEASUREMENTS)
    assert text.splitlines() == [
        "TR:Cell:CellLine,TR:EGFR,TR:AKTi,DA:ALL,DV:AKT",
        "1,1,0,0,0.1",
        "1,1,0,10,0.9",
    ]


def test_build_file(tmp_path):
    out = str(tmp_path / "data.csv")
    assert cellnopt_midas.build(MEASUREMENTS, out=out, cell_line="HeLa") == {
        "path": out,
        "measurements": 2,
    }
    assert cellnopt_midas.read(out)["cell_line"] == "HeLa"


def test_build_errors():
    assert "error" in cellnopt_midas.build([{"protein": "AKT", "time": -1}])
    assert "error" in cellnopt_midas.build([{"protein": "AKT", "colour": "red"}])
