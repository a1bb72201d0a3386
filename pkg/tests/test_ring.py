import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npscalar import InputShapeError, ModVector, Ring, mask, product_trace, unmask

R64 = Ring()
R7 = Ring(7)


def vec(entries, ring=R64):
    return ModVector(entries, ring)


class TestProductTrace:
    def test_binary_vectors(self):
        assert product_trace([vec([1, 0, 1]), vec([1, 1, 0])], R64) == 1

    def test_three_vectors(self):
        vs = [vec([1, 2]), vec([3, 4]), vec([5, 6])]
        assert product_trace(vs, R64) == 63  # 1*3*5 + 2*4*6

    def test_zero_vector_annihilates(self):
        vs = [vec([0, 0, 0]), vec([5, 6, 7]), vec([1, 2, 3])]
        assert product_trace(vs, R64) == 0

    def test_all_ones_gives_length(self):
        for n in (2, 3, 5):
            vs = [vec([1] * 4)] * n
            assert product_trace(vs, R64) == 4

    def test_length_mismatch(self):
        with pytest.raises(InputShapeError):
            product_trace([vec([1, 2]), vec([1, 2, 3])], R64)


class TestMask:
    def test_zero_mask(self):
        assert mask(vec([2, 3]), vec([0, 0])).entries == (2, 3)

    def test_wraps_modulus(self):
        assert mask(ModVector([5], R7), ModVector([3], R7)).entries == (1,)

    def test_unmask_inverts(self):
        v, r = vec([10, 20, 30]), vec([7, (1 << 64) - 1, 123])
        assert unmask(mask(v, r), r) == v

    def test_length_mismatch(self):
        with pytest.raises(InputShapeError):
            mask(vec([1]), vec([1, 2]))


elements = st.integers(min_value=0, max_value=(1 << 64) - 1)


@st.composite
def triples(draw, length=3):
    return [
        ModVector([draw(elements) for _ in range(length)], R64) for _ in range(3)
    ]


class TestRingProperties:
    @given(a=elements, b=elements, c=elements)
    def test_ring_axioms(self, a, b, c):
        assert R64.add(a, b) == R64.add(b, a)
        assert R64.mul(a, b) == R64.mul(b, a)
        assert R64.add(R64.add(a, b), c) == R64.add(a, R64.add(b, c))
        assert R64.mul(R64.mul(a, b), c) == R64.mul(a, R64.mul(b, c))
        assert R64.mul(a, R64.add(b, c)) == R64.add(R64.mul(a, b), R64.mul(a, c))

    @settings(max_examples=50)
    @given(vs=triples())
    def test_trace_multilinear(self, vs):
        a, b, c = vs
        lhs = product_trace([a.add(b), c], R64)
        rhs = R64.add(product_trace([a, c], R64), product_trace([b, c], R64))
        assert lhs == rhs

    @settings(max_examples=50)
    @given(vs=triples())
    def test_trace_permutation_invariant(self, vs):
        a, b, c = vs
        assert product_trace([a, b, c], R64) == product_trace([c, a, b], R64)
        assert product_trace([a, b, c], R64) == product_trace([b, a, c], R64)


def test_entries_reduced_on_construction():
    assert ModVector([9, 15], R7).entries == (2, 1)


def test_modulus_lower_bound():
    with pytest.raises(ValueError):
        Ring(1)
