"""FCIDUMP parsing, serialization round-trips and spin-orbital expansion."""

import numpy as np
import pytest

from qsegf.integrals import (
    FcidumpError,
    MolecularIntegrals,
    dump_fcidump,
    parse_fcidump,
    to_spin_orbitals,
)

MINIMAL = """&FCI NORB=2,NELEC=2,MS2=0,
&END
0.6744 1 1 1 1
0.1813 2 1 2 1
0.6636 2 2 1 1
0.6975 2 2 2 2
-1.2524 1 1 0 0
-0.4759 2 2 0 0
0.713753 0 0 0 0
"""


class TestParse:
    def test_header_fields(self):
        mi = parse_fcidump(MINIMAL)
        assert (mi.n_spatial, mi.n_electrons, mi.ms2) == (2, 2, 0)

    def test_core_energy_line(self):
        assert parse_fcidump(MINIMAL).e_core == 0.713753

    def test_one_body_symmetrized(self):
        mi = parse_fcidump(MINIMAL)
        assert mi.h[0, 0] == -1.2524
        assert mi.h[0, 1] == mi.h[1, 0] == 0.0

    def test_eightfold_images_populated(self):
        mi = parse_fcidump(MINIMAL)
        val = 0.6636  # stored as (22|11)
        for idx in [(1, 1, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0)]:
            assert mi.v[idx] == val
        assert mi.v[1, 0, 1, 0] == mi.v[0, 1, 0, 1] == 0.1813

    def test_orbital_energy_lines_ignored(self):
        mi = parse_fcidump(MINIMAL + "-0.5 1 0 0 0\n")
        assert mi.e_core == 0.713753

    def test_scientific_notation(self):
        mi = parse_fcidump("&FCI NORB=1,NELEC=1,MS2=1,\n&END\n-1.25e-1 1 1 0 0\n")
        assert mi.h[0, 0] == -0.125

    def test_missing_header_field(self):
        with pytest.raises(FcidumpError, match="NELEC"):
            parse_fcidump("&FCI NORB=2,\n&END\n")

    def test_unterminated_header(self):
        with pytest.raises(FcidumpError, match="not terminated"):
            parse_fcidump("&FCI NORB=2,NELEC=2\n0.5 1 1 0 0\n" * 2)

    def test_index_out_of_range(self):
        with pytest.raises(FcidumpError, match="out of range"):
            parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 3 1 0 0\n")

    def test_conflicting_duplicates(self):
        text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 1 1 0 0\n0.7 1 1 0 0\n"
        with pytest.raises(FcidumpError, match="conflicting"):
            parse_fcidump(text)

    def test_agreeing_duplicates_ok(self):
        text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 1 1 0 0\n0.5 1 1 0 0\n"
        assert parse_fcidump(text).h[0, 0] == 0.5

    def test_malformed_line(self):
        with pytest.raises(FcidumpError, match="malformed"):
            parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 1 1\n")

    def test_h2_fixture(self, h2_integrals):
        assert h2_integrals.n_spatial == 2
        assert h2_integrals.n_electrons == 2
        assert h2_integrals.e_core == pytest.approx(0.6962858038197368, abs=1e-12)


class TestRoundTrip:
    def test_bitwise_round_trip(self, h2_integrals, h4_integrals):
        for mi in (h2_integrals, h4_integrals):
            again = parse_fcidump(dump_fcidump(mi))
            assert np.array_equal(again.h, mi.h)
            assert np.array_equal(again.v, mi.v)
            assert again.e_core == mi.e_core
            assert (again.n_spatial, again.n_electrons, again.ms2) == (
                mi.n_spatial, mi.n_electrons, mi.ms2,
            )


class TestSpinOrbitals:
    def test_counts_and_blocks(self, h2_integrals):
        soh = to_spin_orbitals(h2_integrals)
        assert soh.n_so == 4
        assert np.array_equal(soh.h_so[:2, :2], h2_integrals.h)
        assert soh.h_so[2, 3] == h2_integrals.h[0, 1]
        assert np.all(soh.h_so[:2, 2:] == 0.0)

    def test_spin_block_sparsity_exact(self, h2_integrals):
        soh = to_spin_orbitals(h2_integrals)
        n = 2
        spin = np.arange(4) // n
        for p in range(4):
            for q in range(4):
                for r in range(4):
                    for s in range(4):
                        if spin[p] != spin[r] or spin[q] != spin[s]:
                            assert soh.v_so[p, q, r, s] == 0.0

    def test_hermiticity(self, h4_integrals):
        soh = to_spin_orbitals(h4_integrals)
        assert np.array_equal(
            soh.v_so, np.transpose(soh.v_so, (2, 3, 0, 1))
        )

    def test_invalid_electron_count(self):
        with pytest.raises(ValueError, match="electron count"):
            MolecularIntegrals(1, 3, 0, 0.0, np.zeros((1, 1)), np.zeros((1, 1, 1, 1)))

    def test_asymmetric_h_rejected(self):
        h = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError, match="symmetric"):
            MolecularIntegrals(2, 2, 0, 0.0, h, np.zeros((2, 2, 2, 2)))
