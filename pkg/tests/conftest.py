import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from loopsight.codegen import ClassLabel, GeneratorConfig, evolve, write_corpus  # noqa: E402
from loopsight.dataset import build_dataset  # noqa: E402

# criterion id -> (title, [outcomes])
_CRITERIA: dict[str, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(ident, title): test backs a numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    ident, title = marker.args
    entry = _CRITERIA.setdefault(ident, (title, []))
    if report.when == "call" or report.outcome != "passed":
        entry[1].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for ident in sorted(_CRITERIA, key=lambda s: int(s.lstrip("AC"))):
        title, outcomes = _CRITERIA[ident]
        if "failed" in outcomes:
            verdict = "FAIL"
        elif outcomes and all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"{ident:<5}{verdict:<6}{title}")


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """Two small evolved corpora (30 programs each) and their dataset cache."""
    root = tmp_path_factory.mktemp("tiny")
    dirs = {}
    for offset, label in enumerate((ClassLabel.INDEPENDENT, ClassLabel.AMBIGUOUS)):
        cfg = GeneratorConfig(label, population_size=40, generations=2, hof_size=30, seed=5 + offset)
        hof, curve = evolve(cfg)
        dirs[label] = root / "corpus" / label.slug
        write_corpus(hof, curve, dirs[label], cfg)
    build_dataset([dirs[ClassLabel.INDEPENDENT]], [dirs[ClassLabel.AMBIGUOUS]], root / "dataset")
    return root
