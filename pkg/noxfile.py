import datetime
import os
import shutil
from importlib import metadata
from pathlib import Path

import nox
from nox.command import CommandFailed

nox.options.reuse_existing_virtualenvs = True
nox.options.error_on_missing_interpreters = False
if tuple(map(int, metadata.version("nox").split("."))) >= (2024, 3):
    nox.options.default_venv_backend = "uv|virtualenv"

PYTHON_VERSIONS = ("3", "3.9", "3.10", "3.11")
CI_RUN = (
    os.environ.get("JENKINS_URL") or os.environ.get("CI") or os.environ.get("DRONE") is not None
)
PIP_INSTALL_SILENT = CI_RUN is False
SKIP_REQUIREMENTS_INSTALL = os.environ.get("SKIP_REQUIREMENTS_INSTALL", "0") == "1"

COVERAGE_REQUIREMENT = os.environ.get("COVERAGE_REQUIREMENT") or "coverage==7.6.4"
SALT_REQUIREMENT = os.environ.get("SALT_REQUIREMENT") or "salt>=3006"
if SALT_REQUIREMENT == "salt==master":
    SALT_REQUIREMENT = "git+https://github.com/saltstack/salt.git@master"

os.environ["PYTHONDONTWRITEBYTECODE"] = "1"

REPO_ROOT = Path(__file__).resolve().parent
os.chdir(str(REPO_ROOT))

ARTIFACTS_DIR = REPO_ROOT / "artifacts"
ARTIFACTS_DIR.mkdir(parents=True, exist_ok=True)
CUR_TIME = datetime.datetime.now().strftime("%Y%m%d%H%M%S.%f")
RUNTESTS_LOGFILE = ARTIFACTS_DIR / f"runtests-{CUR_TIME}.log"
COVERAGE_REPORT_DB = REPO_ROOT / ".coverage"
COVERAGE_REPORT_PROJECT = ARTIFACTS_DIR.relative_to(REPO_ROOT) / "coverage-project.xml"
JUNIT_REPORT = ARTIFACTS_DIR.relative_to(REPO_ROOT) / "junit-report.xml"
SOURCE_GLOB = "src/saltext/cellnopt/*"


def _install(session, extras=(), install_salt=True, install_coverage=True):
    if SKIP_REQUIREMENTS_INSTALL:
        return
    session.install("--progress-bar=off", "wheel", silent=PIP_INSTALL_SILENT)
    if install_coverage:
        session.install("--progress-bar=off", COVERAGE_REQUIREMENT, silent=PIP_INSTALL_SILENT)
    if install_salt:
        session.install("--progress-bar=off", SALT_REQUIREMENT, silent=PIP_INSTALL_SILENT)
    pkg = "."
    if extras:
        pkg += f"[{','.join(extras)}]"
    session.install("-e", pkg, silent=PIP_INSTALL_SILENT)


@nox.session(python=PYTHON_VERSIONS)
def tests(session):
    """
    Run the test suite under coverage
    """
    _install(session, extras=["tests"])
    env = {"COVERAGE_FILE": str(COVERAGE_REPORT_DB)}
    args = [
        "--rootdir",
        str(REPO_ROOT),
        f"--log-file={RUNTESTS_LOGFILE.relative_to(REPO_ROOT)}",
        "--log-file-level=debug",
        "--show-capture=no",
        f"--junitxml={JUNIT_REPORT}",
        "-ra",
    ]
    args.extend(session.posargs or ["tests/"])
    session.run("coverage", "erase")
    try:
        session.run("coverage", "run", "-m", "pytest", *args, env=env)
    finally:
        try:
            session.run("coverage", "combine", env=env)
        except CommandFailed:
            pass
        session.run(
            "coverage",
            "xml",
            "-o",
            str(COVERAGE_REPORT_PROJECT),
            "--omit=tests/*",
            f"--include={SOURCE_GLOB}",
            env=env,
        )
        try:
            session.run("coverage", "report", "--show-missing", f"--include={SOURCE_GLOB}", env=env)
        finally:
            if COVERAGE_REPORT_DB.exists():
                shutil.move(str(COVERAGE_REPORT_DB), str(ARTIFACTS_DIR / COVERAGE_REPORT_DB.name))


@nox.session(python="3")
def lint(session):
    """
    Run PyLint against the code and the test suite
    """
    _install(session, extras=["lint", "tests"], install_coverage=False)
    env = {"PYTHONPATH": str(REPO_ROOT / "src"), "PYTHONUNBUFFERED": "1"}
    session.run("pylint", "--disable=I", "noxfile.py", "src/", env=env)
    session.run(
        "pylint",
        "--disable=I,redefined-outer-name,missing-module-docstring,"
        "missing-function-docstring,missing-class-docstring,unused-argument",
        "tests/",
        env=env,
    )


@nox.session(python="3")
def docs(session):
    """
    Build Docs
    """
    _install(session, extras=["docs"], install_coverage=False)
    build_dir = Path("docs", "_build", "html")
    if build_dir.exists():
        shutil.rmtree(build_dir)
    session.run("sphinx-build", "-W", "-b", "html", "docs", str(build_dir))
