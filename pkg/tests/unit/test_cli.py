import io

import pytest
import salt.utils.json

from saltext.cellnopt import cli


@pytest.fixture
def run():
    def _run(*argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        code = cli.main(list(argv), stdout=stdout, stderr=stderr)
        return code, stdout.getvalue(), stderr.getvalue()

    return _run


@pytest.fixture
def quick_config(tmp_path):
    path = tmp_path / "quick.conf"
    path.write_text("ga.population_size=20\nga.max_generations=40\n")
    return str(path)


def test_validate(run, pkn_file, midas_file):
    assert run("validate", "--pkn", pkn_file, "--midas", midas_file) == (
        0,
        "INFO: [validate] OK\n",
        "",
    )


def test_validate_json(run, pkn_file, tmp_path):
    midas = tmp_path / "bad.csv"
    midas.write_text("TR:EGF,DA:ALL,DV:Output\n1,10,0.5\n")
    code, out, _ = run("validate", "--pkn", pkn_file, "--midas", str(midas), "--json")
    assert code == 1
    assert salt.utils.json.loads(out) == [
        {"level": "error", "message": "MIDAS stimulus EGF is not a PKN node", "stage": "validate"}
    ]


def test_preprocess(run, pkn_file, midas_file):
    code, out, _ = run("preprocess", "--pkn", pkn_file, "--midas", midas_file, "--no-expand")
    assert code == 0
    assert out.splitlines() == [
        "raw\t4 nodes\t3 reactions",
        "nonc\t4 nodes\t3 reactions",
        "compressed\t3 nodes\t2 reactions",
        "expanded\t3 nodes\t2 reactions",
    ]


def test_train(run, pkn_file, midas_file, out_dir, quick_config):
    code, out, _ = run(
        "train",
        "--pkn",
        pkn_file,
        "--midas",
        midas_file,
        "--out",
        out_dir,
        "--config",
        quick_config,
        "--seed",
        "3",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "best\t110"
    assert lines[1].startswith("score\t")
    assert lines[2] in {f"stopped_by\t{reason}" for reason in ("max_generations", "stall")}


def test_train_runtime_error(run, pkn_file, tmp_path, quick_config):
    midas = tmp_path / "rest.csv"
    midas.write_text("TR:Input1,DA:ALL,DV:Output\n1,0,0.5\n")
    code, _, err = run(
        "train", "--pkn", pkn_file, "--midas", str(midas), "--config", quick_config
    )
    assert code == 3
    assert err.startswith("cellnopt train: No data point can be compared")


def test_simulate(run, pkn_file):
    code, out, _ = run("simulate", "--pkn", pkn_file, "--on", "Input2", "--inhibit", "Interm")
    assert code == 0
    assert out == "Input1\t0\nInput2\t1\nInterm\t0\nOutput\t0\n"


def test_simulate_unknown_node(run, pkn_file):
    assert run("simulate", "--pkn", pkn_file, "--on", "EGF") == (
        1,
        "",
        "cellnopt simulate: Unknown node(s): EGF\n",
    )


def test_export(run, pkn_file):
    code, out, _ = run("export", "--pkn", pkn_file)
    assert code == 0
    assert out == "Input2\t1\tInterm\nInput1\t1\tOutput\nInterm\t1\tOutput\n"


def test_input_format_error(run, tmp_path, midas_file):
    pkn = tmp_path / "bad.sif"
    pkn.write_text("A 1 B\nA 2 B\n")
    code, _, err = run("preprocess", "--pkn", str(pkn), "--midas", midas_file)
    assert code == 2
    assert err.startswith("cellnopt read-pkn: ")
    assert "line 2" in err


def test_usage_errors(run, pkn_file):
    assert run("train", "--pkn", pkn_file)[0] == 1
    assert run("export")[0] == 1
    assert run("simulate", "--pkn", pkn_file, "--max-iter", "lots")[0] == 1


def test_validate_parse_errors_exit_2(run, tmp_path, midas_file):
    pkn = tmp_path / "bad.sif"
    pkn.write_text("A 1 B\nA 2 B\n")
    code, out, _ = run("validate", "--pkn", str(pkn), "--midas", midas_file)
    assert code == 2
    assert out.startswith("ERROR: [read-pkn] ")


def test_validate_missing_pkn_exit_2(run, tmp_path):
    code, out, _ = run("validate", "--pkn", str(tmp_path / "missing.sif"))
    assert code == 2
    assert out.startswith("ERROR: [read-pkn] Cannot read PKN")


def test_missing_config_file(run, pkn_file, midas_file, tmp_path):
    missing = tmp_path / "nope.conf"
    code, out, err = run(
        "preprocess", "--pkn", pkn_file, "--midas", midas_file, "--config", str(missing)
    )
    assert (code, out) == (1, "")
    assert err == (
        f"cellnopt preprocess: Cannot read configuration file {missing}: "
        "No such file or directory\n"
    )


@pytest.mark.parametrize("command", ["preprocess", "train"])
def test_out_under_a_regular_file(run, pkn_file, midas_file, tmp_path, quick_config, command):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory\n")
    code, _, err = run(
        command,
        "--pkn",
        pkn_file,
        "--midas",
        midas_file,
        "--out",
        str(blocker / "sub"),
        "--config",
        quick_config,
    )
    assert code == 1
    assert err.startswith(f"cellnopt report: Cannot write artifacts to {blocker / 'sub'}: ")
