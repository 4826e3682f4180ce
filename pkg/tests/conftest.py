"""Shared test fixtures: seeded generators and the basis corpus."""

import numpy as np
import pytest

from qcausal.linalg import BiDims, haar_unitary
from qcausal.measurements import (
    OrthogonalBasis,
    bell_basis,
    causal_grid_basis,
    completion_basis,
    conditional_basis,
    haar_basis,
    product_basis,
    rotate_basis,
    semicausal_partition_basis,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def build_corpus(seed: int = 11) -> list[tuple[str, OrthogonalBasis]]:
    """Random plus structured complete bases with local dimensions in {2, 3, 4}.

    Mix of generically signaling (Haar), one-way, and fully causal instances;
    the labels record the construction, not the expected verdict.
    """
    rng = np.random.default_rng(seed)
    corpus: list[tuple[str, OrthogonalBasis]] = [
        ("bell", bell_basis()),
        ("conditional", conditional_basis()),
        ("completion", completion_basis()),
        ("product-2x2", product_basis(BiDims(2, 2))),
        ("product-2x3", product_basis(BiDims(2, 3))),
        ("product-3x3", product_basis(BiDims(3, 3))),
    ]
    for k, (na, nb) in enumerate([(2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 2),
                                  (4, 3), (3, 4), (4, 4)]):
        corpus.append((f"haar-{na}x{nb}-{k}", haar_basis(BiDims(na, nb), rng)))
    for k, (na, nb) in enumerate([(2, 2), (2, 3), (3, 3), (2, 4), (4, 4), (3, 2), (4, 3)]):
        corpus.append((f"rotated-product-{k}",
                       rotate_basis(product_basis(BiDims(na, nb)),
                                    haar_unitary(na, rng), haar_unitary(nb, rng))))
    partitions = [
        ((2, 2), (2,)), ((2, 2), (1, 1)), ((2, 3), (2,)), ((2, 3), (1, 1)),
        ((3, 3), (2, 1)), ((3, 3), (3,)), ((4, 4), (2, 2)), ((4, 4), (3, 1)),
        ((2, 4), (2,)), ((4, 2), (2, 1, 1)), ((3, 4), (2, 1)), ((4, 3), (3, 1)),
        ((4, 4), (4,)), ((3, 2), (2, 1)),
    ]
    for k, (dims, parts) in enumerate(partitions):
        corpus.append((f"partition-{k}",
                       semicausal_partition_basis(BiDims(*dims), parts, rng)))
    grids = [((2, 2), 1), ((2, 2), 2), ((3, 3), 1), ((3, 3), 3), ((2, 4), 2),
             ((4, 2), 2), ((4, 4), 2), ((4, 4), 4), ((2, 3), 1), ((3, 4), 1)]
    for k, (dims, d) in enumerate(grids):
        corpus.append((f"grid-{k}", causal_grid_basis(BiDims(*dims), d, rng)))
    # mixtures of structure and noise: random product rotations of structured ones
    for k, (dims, parts) in enumerate([((3, 3), (2, 1)), ((4, 4), (2, 2)),
                                       ((2, 4), (1, 1)), ((4, 3), (2, 2))]):
        base = semicausal_partition_basis(BiDims(*dims), parts)
        corpus.append((f"rotated-partition-{k}",
                       rotate_basis(base, haar_unitary(dims[0], rng),
                                    haar_unitary(dims[1], rng))))
    for k in range(10):
        na, nb = [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)][k % 5]
        corpus.append((f"haar-extra-{k}", haar_basis(BiDims(na, nb), rng)))
    assert len(corpus) >= 50
    return corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()
