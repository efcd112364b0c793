from pathlib import Path

import orjson
import pytest
from dotenv import load_dotenv

from couette_lab import CouetteLab, SolverConfig

load_dotenv()

REPORTS_DIR = Path(__file__).parent / "reports"


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run tests marked slow (full-level acceptance criteria).",
    )
    parser.addoption(
        "--save-reports",
        action="store_true",
        default=False,
        help="Save JSON reports to tests/reports/.",
    )
    parser.addoption(
        "--clean-reports",
        action="store_true",
        default=False,
        help="Remove all saved reports from tests/reports/ and exit.",
    )


def pytest_sessionstart(session):
    if session.config.getoption("--clean-reports"):
        import shutil

        if REPORTS_DIR.exists():
            shutil.rmtree(REPORTS_DIR)
        session.config._clean_reports_done = True


def pytest_collection_modifyitems(config, items):
    if getattr(config, "_clean_reports_done", False):
        items.clear()
        return
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def save_report(request):
    """Fixture that returns a function to save a report as JSON.

    Keeps two versions per test for comparison:
        {test_name}.prev.json    previous run
        {test_name}.latest.json  current run

    On each run, latest is moved to prev, and new data is saved as latest.
    Only saves when --save-reports flag is passed.
    """
    def _save(data):
        if not request.config.getoption("--save-reports"):
            return
        REPORTS_DIR.mkdir(exist_ok=True)
        name = request.node.name
        latest = REPORTS_DIR / f"{name}.latest.json"
        prev = REPORTS_DIR / f"{name}.prev.json"

        if latest.exists():
            prev.write_bytes(latest.read_bytes())

        latest.write_bytes(
            orjson.dumps(
                data,
                option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
                default=str,
            )
        )

    return _save


@pytest.fixture
def solver_config():
    return SolverConfig()


@pytest.fixture
async def lab(solver_config):
    # CSPEC_JOBS (from the environment or .env) selects the worker count.
    async with CouetteLab(config=solver_config) as lab:
        yield lab
