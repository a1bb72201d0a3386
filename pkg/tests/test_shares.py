import random

import pytest

from npscalar import (
    InstanceShapeError,
    MaskIdAllocator,
    Ring,
    Rng,
    generate_share_bundles,
    product_trace,
    split_value,
)

R64 = Ring()
R7 = Ring(7)


class TestSplitValue:
    def test_single_share_is_value(self):
        assert split_value(42, 1, R64, Rng(0)) == [42]

    def test_shares_sum_to_value(self):
        shares = split_value(10, 3, R64, Rng(5))
        assert sum(shares) % R64.modulus == 10

    def test_zero_splits_to_additive_inverses(self):
        a, b = split_value(0, 2, R64, Rng(9))
        assert (a + b) % R64.modulus == 0

    def test_rejects_zero_shares(self):
        with pytest.raises(InstanceShapeError):
            split_value(1, 0, R64, Rng(0))


class TestShareBundles:
    def test_complement_share_identity_mod_7(self):
        # masks (3,) and (5,): trace 15 = 1 mod 7; share 4 forces complement 4
        from npscalar import ModVector

        trace = product_trace([ModVector([3], R7), ModVector([5], R7)], R7)
        assert trace == 1
        assert R7.sub(trace, 4) == 4

    def test_share_sum_matches_mask_trace(self):
        for n, length, seed in [(2, 1, 0), (3, 4, 1), (5, 2, 2), (8, 16, 3)]:
            bundles = generate_share_bundles(n, length, R64, Rng(seed))
            trace = product_trace([b.mask for b in bundles], R64)
            assert sum(b.share for b in bundles) % R64.modulus == trace

    def test_share_sum_identity_random_grid(self):
        r = random.Random(2024)
        for _ in range(200):
            n = r.randint(2, 8)
            length = r.randint(1, 16)
            ring = r.choice([R64, R7, Ring(251)])
            bundles = generate_share_bundles(n, length, ring, Rng(r.randrange(2**32)))
            trace = product_trace([b.mask for b in bundles], ring)
            assert sum(b.share for b in bundles) % ring.modulus == trace

    def test_seed_replay_is_identical(self):
        a = generate_share_bundles(4, 3, R64, Rng(77))
        b = generate_share_bundles(4, 3, R64, Rng(77))
        assert [(x.mask.entries, x.share) for x in a] == [
            (x.mask.entries, x.share) for x in b
        ]

    def test_fresh_ids(self):
        alloc = MaskIdAllocator()
        a = generate_share_bundles(3, 1, R64, Rng(0), ids=alloc)
        b = generate_share_bundles(3, 1, R64, Rng(1), ids=alloc)
        ids = [x.mask_id for x in a + b]
        assert len(set(ids)) == 6

    def test_rejects_tiny_instances(self):
        with pytest.raises(InstanceShapeError):
            generate_share_bundles(1, 1, R64, Rng(0))
        with pytest.raises(InstanceShapeError):
            generate_share_bundles(2, 0, R64, Rng(0))


def test_rng_streams_are_reproducible():
    a, b = Rng(123), Rng(123)
    assert [a.element(R64) for _ in range(10)] == [b.element(R64) for _ in range(10)]
    assert a.vector(R7, 5).entries == b.vector(R7, 5).entries
