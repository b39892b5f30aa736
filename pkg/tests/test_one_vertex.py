"""Shift-and-append (1-vertex) operators in 2D and 3D."""
import pytest
from mpmath import mp, mpf

from capacitylab import (IterationConfig, brute_count_slanted_2d,
                         brute_count_slanted_3d, build_one_vertex_2d,
                         build_one_vertex_3d, build_row_transfer_2d,
                         perron_radius, quadratic_form_count)


@pytest.fixture(scope="module")
def s22(hs2):
    return build_one_vertex_2d(hs2, 2)


class TestStructure2d:
    def test_n2_transitions(self, s22):
        names = [s22.states.word_str(i) for i in range(3)]
        assert names == ["12", "21", "22"]
        succ = {names[i]: {names[j] for j in s22.successors(i)}
                for i in range(3)}
        assert succ == {"12": {"22"}, "21": {"12"}, "22": {"21", "22"}}

    def test_successor_count_at_most_k(self, hs2, md2):
        for sys_, n in [(hs2, 5), (md2, 3)]:
            op = build_one_vertex_2d(sys_, n)
            for i in range(op.dimension):
                assert len(op.successors(i)) <= sys_.k

    def test_n2_radius_is_cubic_root(self, s22):
        est = perron_radius(s22, IterationConfig(precision_digits=30))
        # real root of x^3 = x^2 + 1
        with mp.workdps(40):
            root = mp.findroot(lambda x: x ** 3 - x ** 2 - 1, 1.5)
            assert abs(est.value - root) < mpf(10) ** -20

    def test_apply_row_sums(self, s22):
        assert s22.apply([1, 1, 1]) == [1, 1, 2]


class TestCountingIdentities2d:
    def test_slanted_counts(self, hs2, md2):
        for sys_ in (hs2, md2):
            for n in range(2, 5):
                op = build_one_vertex_2d(sys_, n)
                for q in range(1, 4):
                    assert quadratic_form_count(op, (q - 1) * n) == \
                        brute_count_slanted_2d(sys_, n, q).value

    def test_sandwich_count_inequalities(self, hs2):
        for n in range(2, 5):
            s = build_one_vertex_2d(hs2, n)
            t = build_row_transfer_2d(hs2, n, "open")
            tper = build_row_transfer_2d(hs2, n - 1, "periodic") \
                if n >= 3 else None
            for q in range(2, 5):
                mid = quadratic_form_count(s, (q - 1) * n)
                assert mid <= quadratic_form_count(t, q - 1)
                if tper is not None:
                    assert quadratic_form_count(tper, q - 1) <= mid


class TestOneVertex3d:
    def test_counting_identities(self, hs3):
        for n1, n2, m in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2),
                          (3, 3, 2)]:
            op = build_one_vertex_3d(hs3, n1, n2)
            assert quadratic_form_count(op, (m - 1) * n1 * n2) == \
                brute_count_slanted_3d(hs3, n1, n2, m).value

    def test_order_sensitivity(self, hs3):
        a = build_one_vertex_3d(hs3, 2, 3)
        b = build_one_vertex_3d(hs3, 3, 2)
        assert a.dimension != b.dimension or \
            a.descriptor_hash != b.descriptor_hash

    def test_successors_bounded(self, hs3):
        op = build_one_vertex_3d(hs3, 3, 3)
        for i in range(op.dimension):
            assert len(op.successors(i)) <= hs3.k

    def test_minimum_sizes(self, hs2, hs3):
        with pytest.raises(ValueError):
            build_one_vertex_2d(hs2, 1)
