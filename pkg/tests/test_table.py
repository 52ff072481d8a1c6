import time

import pytest

from qslkit.fixtures import CASE_IDS, KNOWN_CONFLICTS, TABLE1_ROWS, case_state, reference_cells
from qslkit.errors import ValidationError
from qslkit.table import check_table, compute_table

CELLS = list(reference_cells())


@pytest.fixture(scope="module")
def table():
    t0 = time.perf_counter()
    cells = compute_table()
    return cells, check_table(cells), time.perf_counter() - t0


def _check(report, case, se, col):
    return next(c for c in report.checks
                if (c.cell.case, c.cell.sqrt_fidelity, c.cell.column) == (case, se, col))


@pytest.mark.parametrize("case,se,col", [c[:3] for c in CELLS if c[:3] not in KNOWN_CONFLICTS])
def test_reproducible_cell(table, case, se, col):
    chk = _check(table[1], case, se, col)
    assert chk.ok, (chk.printed, chk.cell.result.value, chk.cell.result.p_used, chk.note)


@pytest.mark.parametrize("key", sorted(KNOWN_CONFLICTS))
def test_known_conflicts_are_the_only_failures(table, key):
    chk = _check(table[1], *key)
    assert not chk.ok and chk.known_conflict


def test_failures_are_all_known(table):
    keys = {(c.cell.case, c.cell.sqrt_fidelity, c.cell.column) for c in table[1].failures}
    assert keys == set(KNOWN_CONFLICTS)


def test_order_is_printed_order(table):
    assert [(c.case, c.sqrt_fidelity, c.column) for c in table[0]] == [c[:3] for c in CELLS]


def test_runtime_budget(table):
    assert table[2] < 60.0


def test_lz_small_value_state_g(table):
    cell = _check(table[1], "g", "0.99", "LZ").cell
    assert cell.result.value == pytest.approx(2.7e-14, rel=0.02)
    assert cell.result.p_used == pytest.approx(0.19, abs=0.05)


def test_cz_state_f(table):
    cell = _check(table[1], "f", "0.20", "CZ").cell
    assert cell.result.value == pytest.approx(2.5970, rel=5e-3)
    assert cell.path == "finite_limit"


def test_divergent_cells(table):
    for col in ("LC", "CZ"):
        assert _check(table[1], "e", "0.19", col).cell.result.divergent


def test_fixture_states():
    assert set(CASE_IDS) == {r[0] for r in TABLE1_ROWS}
    assert case_state("b").n == 2048 and case_state("c").n == 2048
    assert list(case_state("g").energies[:2]) == [0.0, 1.0]
    with pytest.raises(ValidationError):
        case_state("h")
