import numpy as np
import pytest

from rosette.potential import RosetteParams

_ACCEPTANCE: dict[str, list[tuple[str, bool, str]]] = {}


def record(criterion: str, part: str, ok: bool, detail: str = "") -> None:
    _ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE, key=lambda c: int(c.split()[0])):
        parts = _ACCEPTANCE[crit]
        ok = all(p[1] for p in parts)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {crit}")
        for part, pok, detail in parts:
            if not pok:
                tr.write_line(f"        failed: {part}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_params(rng, n_range=(2, 10), eps_range=(0.05, 0.95), mu_range=(0.0, 3.0)):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    return RosetteParams(n, float(rng.uniform(*eps_range)), float(rng.uniform(*mu_range)))
