import numpy as np
import pytest

from gapsurvey.qmc import (LatticeSequence, genvec_checksum, korobov_vector,
                           lattice_point, lattice_points_block,
                           parse_generating_vector, radical_inverse_base2,
                           random_shift, splitmix64_stream)


def test_radical_inverse_trivials():
    assert radical_inverse_base2(0, 20) == 0.0
    assert radical_inverse_base2(1, 20) == 0.5
    assert radical_inverse_base2(3, 20) == 0.75
    assert radical_inverse_base2(3, 2) == 0.75
    assert radical_inverse_base2(0, 0) == 0.0
    with pytest.raises(ValueError):
        radical_inverse_base2(4, 2)
    with pytest.raises(ValueError):
        radical_inverse_base2(-1, 4)


def test_radical_inverse_is_permutation():
    m = 6
    vals = [radical_inverse_base2(i, m) for i in range(1 << m)]
    assert sorted(vals) == [k / 2.0**m for k in range(1 << m)]


def test_splitmix64_reference_values():
    # first outputs for seed 0 of the documented recurrence
    out = splitmix64_stream(0, 3)
    assert out[0] == 0xE220A8397B1DCDAF
    assert out[1] == 0x6E789E6AA1B965F4
    assert out[2] == 0x06C45D188009454F


def test_random_shift_range_and_seeding():
    s1 = random_shift(1, 64)
    s2 = random_shift(2, 64)
    assert np.all((s1 >= 0.0) & (s1 < 1.0))
    assert not np.array_equal(s1, s2)
    assert np.array_equal(s1, random_shift(1, 64))  # reproducible
    with pytest.raises(ValueError):
        random_shift(1, 0)


def test_lattice_point_analytic_values():
    seq = LatticeSequence.create(np.array([1, 433461, 315689]), 20, 3, no_shift=True)
    assert np.array_equal(lattice_point(seq, 0).values, np.full(3, -0.5))
    assert np.array_equal(lattice_point(seq, 1).values, np.zeros(3))
    seq2 = LatticeSequence.create(np.array([1, 3]), 2, 2, no_shift=True)
    assert lattice_point(seq2, 3).values.tolist() == [0.25, -0.25]
    with pytest.raises(ValueError):
        lattice_point(seq2, 4)


def test_points_in_half_open_cube():
    seq = LatticeSequence.create(korobov_vector(10, 10), 10, 10, seed=3)
    pts = lattice_points_block(seq, np.arange(1 << 10))
    assert pts.min() >= -0.5
    assert pts.max() < 0.5


def test_prefix_lattice_property_exhaustive():
    # every dyadic prefix of the unshifted stream is the rank-1 lattice
    # {frac(k z / 2^m)} as a set, for all m <= m_max
    z = np.array([1, 5, 9, 13])
    seq = LatticeSequence.create(z, 8, 4, no_shift=True)
    for m in range(9):
        n = 1 << m
        pts = lattice_points_block(seq, np.arange(n)) + 0.5
        direct = np.array([[(k * int(zz)) % n / n for zz in z] for k in range(n)])
        assert sorted(map(tuple, pts)) == sorted(map(tuple, direct))


def test_points_distinct_with_odd_first_component():
    seq = LatticeSequence.create(korobov_vector(3, 10), 10, 3, no_shift=True)
    pts = lattice_points_block(seq, np.arange(1 << 10))
    assert len({tuple(r) for r in pts}) == 1 << 10


def test_shift_translates_point_set():
    z = np.array([1, 5, 9, 13])
    plain = LatticeSequence.create(z, 6, 4, no_shift=True)
    shifted = LatticeSequence.create(z, 6, 4, seed=9)
    n = 1 << 6
    p0 = lattice_points_block(plain, np.arange(n)) + 0.5
    p1 = lattice_points_block(shifted, np.arange(n)) + 0.5
    translated = np.mod(p0 + shifted.shift[None, :], 1.0)
    a = np.array(sorted(map(tuple, p1)))
    b = np.array(sorted(map(tuple, translated)))
    assert np.allclose(a, b, rtol=0, atol=1e-12)


def test_block_and_scalar_paths_identical():
    seq = LatticeSequence.create(korobov_vector(5, 12), 12, 5, seed=7)
    blk = lattice_points_block(seq, np.arange(64))
    for i in range(64):
        assert np.array_equal(blk[i], lattice_point(seq, i).values)
    # determinism across constructions
    seq2 = LatticeSequence.create(korobov_vector(5, 12), 12, 5, seed=7)
    assert np.array_equal(blk, lattice_points_block(seq2, np.arange(64)))


def test_parse_generating_vector_formats():
    assert parse_generating_vector("1\n433461\n315689\n").tolist() == [1, 433461, 315689]
    assert parse_generating_vector("1 1\n2 433461\n").tolist() == [1, 433461]
    assert parse_generating_vector("# comment\n1\n3 # tail\n").tolist() == [1, 3]
    with pytest.raises(ValueError):
        parse_generating_vector("")
    with pytest.raises(ValueError, match="line 2"):
        parse_generating_vector("1\nfoo\n")
    with pytest.raises(ValueError, match="need 4"):
        parse_generating_vector("1\n3\n5\n", s=4)
    with pytest.warns(UserWarning, match="even"):
        parse_generating_vector("1\n4\n")


def test_sequence_validation():
    with pytest.raises(ValueError):
        LatticeSequence.create(np.array([1, 3]), 33, 2)
    with pytest.raises(ValueError):
        LatticeSequence.create(np.array([1]), 4, 2)  # too short for s
    with pytest.warns(UserWarning, match="even"):
        LatticeSequence.create(np.array([1, 2]), 4, 2, no_shift=True)
    seq = LatticeSequence.create(np.array([1, 3]), 0, 2, no_shift=True)
    assert seq.n_max == 1  # degenerate single-point stream


def test_korobov_vector_structure():
    z = korobov_vector(100, 20)
    assert z[0] == 1
    assert np.all(z % 2 == 1)
    assert len(set(z.tolist())) == 100  # no repeats within the first dims
    with pytest.raises(ValueError):
        korobov_vector(10, 20, a=4)


def test_genvec_checksum_stable():
    z = korobov_vector(10, 10)
    assert genvec_checksum(z) == genvec_checksum(z.copy())
    assert genvec_checksum(z) != genvec_checksum(z + 2)
    assert len(genvec_checksum(z)) == 64
