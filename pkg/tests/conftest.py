from __future__ import annotations

from pathlib import Path

import pytest

from dtforge.instance import table_from_rows
from dtforge.mock_registry import MockRegistry, MockSpec
from dtforge.schema_store import SchemaStore, StoreConfig

HERE = Path(__file__).parent
ROOT = HERE.parent
GOLDEN = HERE / "golden" / "iris_ttest.jsonld"
REMOTE_DOCS = HERE / "fixtures" / "remote"
MANIFESTS = ROOT / "manifests"

GC_URL = "https://doi.org/21.T11969/b9335ce2c99ed87735a6"
DA_URL = "https://doi.org/21.T11969/feeb33ad3e4440682a4d"
REMOTE_SUFFIX = "5a1b2c3d4e5f60718293"
REMOTE_URL = f"https://doi.org/21.T11969/{REMOTE_SUFFIX}"
MALFORMED_SUFFIX = "0badd0c0000000000000"

TTEST_ROW = [-49.98618625709594, 58.60939453226036, 9.26962758534569e-50]


@pytest.fixture(autouse=True)
def _no_env_offline(monkeypatch):
    monkeypatch.delenv("DTFORGE_OFFLINE", raising=False)


@pytest.fixture
def offline_store() -> SchemaStore:
    return SchemaStore(StoreConfig(offline=True))


@pytest.fixture(scope="session")
def gc_bundle():
    return SchemaStore(StoreConfig(offline=True)).load_datatype(GC_URL)


@pytest.fixture(scope="session")
def da_bundle():
    return SchemaStore(StoreConfig(offline=True)).load_datatype(DA_URL)


def build_iris_analysis(dt_gc, dt_da):
    """The Python use-case listing, step by step, including the label mutation."""
    df_results = table_from_rows(["t", "df", "p"], [TTEST_ROW])
    instance_gc = dt_gc.group_comparison(
        label="t-test Iris petal length setosa vs virginica",
        executes=dt_gc.software_method(
            label="ttest_ind",
            is_implemented_by="ttest_ind(setosa, virginica, equal_var = False)",
            part_of=dt_gc.software_library(
                label="scipy",
                version_info="1.15.1",
                part_of=dt_gc.software(label="Python", version_info="3.12.5"),
            ),
        ),
        targets=dt_gc.component(label="petal length (cm)"),
        has_input=dt_gc.data_item(label="iris", source_url="data_url"),
        has_output=dt_gc.data_item(source_table=df_results),
    )
    instance_gc.has_input.label = "Iris petal length setosa virginica"
    return dt_da.data_analysis(is_implemented_by="code_url", has_part=instance_gc)


@pytest.fixture
def iris_analysis(gc_bundle, da_bundle):
    return build_iris_analysis(gc_bundle, da_bundle)


@pytest.fixture
def mock_registry(tmp_path):
    spec = MockSpec(doc_dir=REMOTE_DOCS, fail_suffixes={"f00dfa11ed0000000000"})
    with MockRegistry(spec) as registry:
        yield registry


@pytest.fixture
def online_store(mock_registry):
    from dtforge.identifier import Registry

    cfg = StoreConfig(registry_endpoints={Registry.EPIC: mock_registry.base_url, Registry.ORKG: mock_registry.base_url})
    return SchemaStore(cfg)


# one PASS/FAIL line per acceptance criterion in the terminal summary

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")
