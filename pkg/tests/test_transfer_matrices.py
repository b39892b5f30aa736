"""Standard/periodic row transfer and factored slab transfer operators."""
import numpy as np
import pytest

from capacitylab import (BitsetRows, CapacityLimitError, brute_count_box,
                         build_row_transfer_2d, build_slab_transfer_3d,
                         export_operator_text, import_operator_text,
                         quadratic_form_count)


@pytest.fixture(scope="module")
def t22(hs2):
    return build_row_transfer_2d(hs2, 2, "open")


class TestRowTransfer:
    def test_n2_matrix(self, t22):
        assert [t22.states.word_str(i) for i in range(3)] == ["12", "21", "22"]
        m = t22.to_csr().toarray()
        assert m.tolist() == [[0, 1, 1], [1, 0, 1], [1, 1, 1]]

    def test_apply_row_sums(self, t22):
        assert t22.apply([1, 1, 1]) == [2, 2, 3]
        assert t22.apply([0, 0, 0]) == [0, 0, 0]

    def test_entry_and_successors(self, t22):
        assert t22.entry(0, 0) == 0
        assert t22.entry(2, 1) == 1
        assert t22.row_successors(2) == [0, 1, 2]

    def test_quadratic_form_counts(self, t22, hs2):
        assert quadratic_form_count(t22, 0) == 3
        assert quadratic_form_count(t22, 1) == 7
        for n in range(2, 5):
            op = build_row_transfer_2d(hs2, n)
            for q in range(1, 5):
                assert quadratic_form_count(op, q - 1) == \
                    brute_count_box(hs2, (n, q)).value

    def test_periodic_principal_submatrix(self, hs2):
        for n in range(3, 7):
            full = build_row_transfer_2d(hs2, n, "open")
            per = build_row_transfer_2d(hs2, n, "periodic")
            idx = [full.states.index_of_code(int(c)) for c in per.states.codes]
            sub = full.to_csr().toarray()[np.ix_(idx, idx)]
            assert np.array_equal(sub, per.to_csr().toarray())

    def test_n1_restricts_isolated_colours(self):
        from capacitylab import ConstraintGraph, ConstraintSystem
        g = ConstraintGraph.from_edges(3, [(1, 2), (2, 1), (2, 2)])  # 3 isolated
        sys_ = ConstraintSystem((g, g), name="iso")
        op = build_row_transfer_2d(sys_, 1)
        assert [op.states.word_str(i) for i in range(op.dimension)] == ["1", "2"]
        assert np.array_equal(op.to_csr().toarray(),
                              np.array([[0, 1], [1, 1]]))

    def test_build_limit_guard(self, hs2):
        with pytest.raises(CapacityLimitError):
            build_row_transfer_2d(hs2, 25)  # F(27) = 196418 states

    def test_descriptor_hash_distinguishes(self, hs2):
        a = build_row_transfer_2d(hs2, 3, "open")
        b = build_row_transfer_2d(hs2, 3, "periodic")
        c = build_row_transfer_2d(hs2, 4, "open")
        assert len({a.descriptor_hash, b.descriptor_hash,
                    c.descriptor_hash}) == 3


class TestSlabTransfer:
    def test_factored_equals_explicit(self, hs3):
        op = build_slab_transfer_3d(hs3, 2, 2)
        m = op.to_csr().toarray()
        # direct pairwise compatibility on the same state order
        d = op.states.digits()
        e3 = hs3.graph(3).adj
        want = np.ones((len(op.states),) * 2, dtype=np.int64)
        for p in range(4):
            want &= e3[d[:, None, p], d[None, :, p]]
        assert np.array_equal(m, want)

    def test_counts_match_oracle(self, hs3):
        for n1, n2, m in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)]:
            op = build_slab_transfer_3d(hs3, n1, n2)
            assert quadratic_form_count(op, m - 1) == \
                brute_count_box(hs3, (n1, n2, m)).value

    def test_periodic_counts_match_oracle(self, hs3):
        for bc in [("periodic", "open"), ("periodic", "periodic")]:
            op = build_slab_transfer_3d(hs3, 3, 2, bc)
            want = brute_count_box(hs3, (3, 2, 2),
                                   (bc[0], bc[1], "open")).value
            assert quadratic_form_count(op, 1) == want

    def test_bad_boundary_rejected(self, hs3):
        with pytest.raises(ValueError):
            build_slab_transfer_3d(hs3, 2, 2, ("open", "helical"))


class TestRepresentations:
    def test_bitset_apply_matches(self, hs2):
        op = build_row_transfer_2d(hs2, 5)
        bits = BitsetRows.from_operator(op)
        v = list(range(1, op.dimension + 1))
        assert bits.apply(v) == op.apply(v)

    def test_export_import_round_trip(self, tmp_path, hs2):
        op = build_row_transfer_2d(hs2, 4)
        path = tmp_path / "op.txt"
        export_operator_text(op, path)
        mat = import_operator_text(path)
        assert np.array_equal(mat.toarray(), op.to_csr().toarray())
