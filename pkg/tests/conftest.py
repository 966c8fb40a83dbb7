import numpy as np
import pytest

from corrsketch.datagen import make_paper_datasets
from corrsketch.stream import StreamSource


@pytest.fixture(scope="session")
def desk_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    make_paper_datasets(out, "desk", seed=0)
    return out


@pytest.fixture
def diag2():
    """n=2 stream [(1,1),(2,2)]."""
    return np.array([[1, 1], [2, 2]])


def dependent_fixture(n=8, N=400, seed=3):
    """Fixed dependent stream: mostly on the diagonal plus uniform noise."""
    rng = np.random.default_rng(seed)
    i = rng.integers(1, n + 1, size=N)
    j = np.where(rng.random(N) < 0.6, i, rng.integers(1, n + 1, size=N))
    return np.stack([i, j], axis=1)


def product_stream(p_counts, q_counts, scale=1):
    """Exact product stream: count(i, j) = p_counts[i] * q_counts[j] * scale."""
    pairs = [(i + 1, j + 1)
             for i, a in enumerate(p_counts) for j, b in enumerate(q_counts)
             for _ in range(a * b * scale)]
    return np.array(pairs, dtype=np.int64)


def source(n, pairs):
    return StreamSource.from_pairs(n, pairs)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
