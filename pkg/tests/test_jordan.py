# test_jordan.py

import numpy as np
import pytest

from chshlab.errors import ValidationError
from chshlab.linalg.jordan import (
    extended_reflections, jordan_decompose, jordan_isometry, reconstruct,
)
from chshlab.linalg.operators import X, Z, dagger, random_reflection


def test_commuting_pair_gives_zero_angle():
    blocks = jordan_decompose(Z, Z)
    assert len(blocks) == 1
    assert blocks[0].theta == pytest.approx(0.0)


def test_z_and_x_give_quarter_pi():
    blocks = jordan_decompose(Z, X)
    assert len(blocks) == 1
    assert blocks[0].theta == pytest.approx(np.pi / 4)
    assert not blocks[0].padded


def test_restricted_operators_in_block_basis(rng):
    r0, r1 = random_reflection(6, rng, rank=3), random_reflection(6, rng, rank=3)
    for block in jordan_decompose(r0, r1):
        if block.padded:
            continue
        basis = block.basis
        assert np.allclose(dagger(basis) @ r0 @ basis, block.restricted(0), atol=1e-9)
        assert np.allclose(dagger(basis) @ r1 @ basis, block.restricted(1), atol=1e-9)
        # invariance: both reflections keep the block inside its span
        projector = block.projector()
        assert np.allclose(projector @ r1 @ basis, r1 @ basis, atol=1e-9)


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_random_pairs_reconstruct(dim, make_rng):
    rng = make_rng(f"jordan/{dim}")
    for _ in range(167):
        r0, r1 = random_reflection(dim, rng), random_reflection(dim, rng)
        blocks = jordan_decompose(r0, r1)
        assert sum(b.rank for b in blocks) == dim
        assert all(0 <= b.theta <= np.pi / 2 + 1e-12 for b in blocks)
        assert np.allclose(reconstruct(blocks, 0), r0, atol=1e-9)
        assert np.allclose(reconstruct(blocks, 1), r1, atol=1e-9)


def test_degenerate_pairs_reconstruct(rng):
    # identity and its negation force one-dimensional blocks on both sides
    r0 = np.diag([1.0, 1.0, -1.0, -1.0, 1.0]).astype(complex)
    r1 = np.diag([1.0, -1.0, -1.0, 1.0, 1.0]).astype(complex)
    blocks = jordan_decompose(r0, r1)
    assert np.allclose(reconstruct(blocks, 0), r0, atol=1e-9)
    assert np.allclose(reconstruct(blocks, 1), r1, atol=1e-9)
    assert sum(1 for b in blocks if b.padded) == 1


def test_isometry_intertwines_extended_reflections(rng):
    r0, r1 = random_reflection(5, rng), random_reflection(5, rng)
    blocks = jordan_decompose(r0, r1)
    w = jordan_isometry(blocks)
    big0, big1 = extended_reflections(blocks)
    assert np.allclose(dagger(w) @ w, np.eye(5), atol=1e-9)
    assert np.allclose(w @ r0, big0 @ w, atol=1e-9)
    assert np.allclose(w @ r1, big1 @ w, atol=1e-9)


def test_non_reflection_rejected():
    with pytest.raises(ValidationError):
        jordan_decompose(0.5 * Z, X)
