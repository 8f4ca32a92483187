"""Unit tests for the bundled MCS / CQI table data."""

import hashlib
from importlib import resources

import pytest

from nrlinksim.tables import (CqiEntry, McsEntry, N_CQI, N_MCS, load_cqi_table,
                              load_mcs_table)

# Content digests pin the bundled data files against accidental edits.
DATA_SHA256 = {
    "mcs_pdsch.csv": "0ad23aedf6dbe0c819a752812208fb4f305bdd511405863f4d1cc844251a8717",
    "cqi_4bit.csv": "3d9c72f0274d2b2b8d26c7047db1de01c8ea5d36e4bfb90b8b90ebe4f52d8421",
}


def test_data_file_digests():
    for name, want in DATA_SHA256.items():
        blob = resources.files("nrlinksim").joinpath("data", name).read_bytes()
        assert hashlib.sha256(blob).hexdigest() == want, name


class TestMcsTable:
    def test_row_count(self):
        assert len(load_mcs_table()) == N_MCS == 29

    def test_indices_contiguous(self):
        assert [e.index for e in load_mcs_table()] == list(range(29))

    @pytest.mark.parametrize("index,qm,rate,eff", [
        (0, 2, 120, 0.234375),
        (9, 2, 679, 1.326171875),
        (10, 4, 340, 1.328125),
        (16, 4, 658, 2.5703125),
        (17, 6, 438, 2.56640625),
        (28, 6, 948, 5.5546875),
    ])
    def test_known_rows(self, index, qm, rate, eff):
        e = load_mcs_table()[index]
        assert e == McsEntry(index, qm, rate, eff)

    def test_efficiency_identity_exact(self):
        for e in load_mcs_table():
            assert e.efficiency == e.modulation_order * e.rate_x1024 / 1024.0

    def test_modulation_orders(self):
        assert {e.modulation_order for e in load_mcs_table()} == {2, 4, 6}

    def test_efficiency_shape(self):
        # The modulation switch from row 16 (16QAM) to 17 (64QAM) steps the
        # efficiency down slightly; everywhere else it increases.
        effs = [e.efficiency for e in load_mcs_table()]
        dips = [i for i in range(28) if effs[i + 1] <= effs[i]]
        assert dips == [16]
        assert effs[17] < effs[16]

    def test_cached(self):
        assert load_mcs_table() is load_mcs_table()


class TestCqiTable:
    def test_row_count(self):
        assert len(load_cqi_table()) == N_CQI == 16

    def test_zero_row(self):
        assert load_cqi_table()[0] == CqiEntry(0, 0, 0, 0.0)

    @pytest.mark.parametrize("index,qm,rate,eff", [
        (1, 2, 78, 0.15234375),
        (4, 2, 308, 0.6015625),
        (7, 4, 378, 1.4765625),
        (10, 6, 466, 2.73046875),
        (15, 6, 948, 5.5546875),
    ])
    def test_known_rows(self, index, qm, rate, eff):
        e = load_cqi_table()[index]
        assert e == CqiEntry(index, qm, rate, eff)

    def test_strictly_increasing_after_zero(self):
        effs = [e.efficiency for e in load_cqi_table()]
        assert all(b > a for a, b in zip(effs[1:], effs[2:]))

    def test_efficiency_identity_exact(self):
        for e in load_cqi_table()[1:]:
            assert e.efficiency == e.modulation_order * e.rate_x1024 / 1024.0

    def test_top_rows_match_mcs_top(self):
        # Identical modulation/coding at the very top of both tables.
        assert load_cqi_table()[15].efficiency == load_mcs_table()[28].efficiency

    def test_cached(self):
        assert load_cqi_table() is load_cqi_table()
