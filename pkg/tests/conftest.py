import logging
import os

import pytest

from saltext.cellnopt import PACKAGE_ROOT

# Reset the root logger to its default level(because salt changed it)
logging.root.setLevel(logging.WARNING)


# This swallows all logging to stdout.
# To show select logs, set --log-cli-level=<level>
for handler in logging.root.handlers[:]:  # pragma: no cover
    logging.root.removeHandler(handler)
    handler.close()


# Output <- Input1 OR Interm, Interm <- Input2
TOY_SIF = "Input1\t1\tOutput\nInput2\t1\tInterm\nInterm\t1\tOutput\n"

# Output is Input1 OR Input2 at t=10, everything rests at t=0
TOY_MIDAS = """TR:Cell:CellLine,TR:Input1,TR:Input2,DA:ALL,DV:Output
1,0,0,0,0
1,0,0,10,0
1,1,0,0,0
1,1,0,10,1
1,0,1,0,0
1,0,1,10,1
1,1,1,0,0
1,1,1,10,1
"""


@pytest.fixture(scope="session")
def salt_factories_config():  # pragma: no cover
    """
    Return a dictionary with the keyword arguments for FactoriesManager
    """
    return {
        "code_dir": str(PACKAGE_ROOT),
        "inject_sitecustomize": "COVERAGE_PROCESS_START" in os.environ,
        "start_timeout": 120 if os.environ.get("CI") else 60,
    }


@pytest.fixture
def toy_sif():
    return TOY_SIF


@pytest.fixture
def toy_midas():
    return TOY_MIDAS


@pytest.fixture
def pkn_file(tmp_path):
    path = tmp_path / "toy.sif"
    path.write_text(TOY_SIF)
    return str(path)


@pytest.fixture
def midas_file(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text(TOY_MIDAS)
    return str(path)


@pytest.fixture
def out_dir(tmp_path):
    return str(tmp_path / "run")
