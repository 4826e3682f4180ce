"""Quantum operations as Kraus lists: validation, application, composition, Choi states.

Only trace-preserving operations are modeled. Channel equality is decided on
Choi states, never on Kraus lists (Kraus representations are not unique).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .linalg import ATOL, BiDims, as_matrix, dag, frobenius, kron_all, mat_close, max_entangled


@dataclass(frozen=True)
class KrausChannel:
    """A quantum operation ``rho -> sum_k M_k rho M_k^dag`` on a bipartite space."""

    kraus: tuple[np.ndarray, ...]
    dims: BiDims

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("channel needs at least one Kraus operator")
        mats = tuple(as_matrix(k) for k in self.kraus)
        n = self.dims.total
        for k in mats:
            if k.shape != (n, n):
                raise ValueError(f"Kraus operator shape {k.shape} != ({n}, {n})")
        object.__setattr__(self, "kraus", mats)

    @property
    def dim(self) -> int:
        return self.dims.total

    def stacked(self) -> np.ndarray:
        """All Kraus operators as one (k, n, n) array."""
        return np.stack(self.kraus)


class TPReport(NamedTuple):
    tp: bool
    deviation: float


@dataclass(frozen=True)
class ChoiState:
    """Channel fingerprint on reference (x) system (x) reference factors.

    ``matrix`` lives on the four ordered factors R (x) A (x) B (x) S where R
    probes A and S probes B, built from unnormalized maximally entangled pairs;
    its trace is dim_a * dim_b for a trace-preserving channel. Two channels are
    equal iff their Choi states match.
    """

    matrix: np.ndarray
    dims: BiDims

    @property
    def factor_dims(self) -> tuple[int, int, int, int]:
        na, nb = self.dims
        return (na, na, nb, nb)


def validate(ch: KrausChannel, tol: float = ATOL) -> TPReport:
    """Check the trace-preservation condition ``sum_k M_k^dag M_k == I``."""
    acc = sum(dag(k) @ k for k in ch.kraus)
    deviation = frobenius(acc - np.eye(ch.dim))
    return TPReport(bool(deviation < tol), float(deviation))


def apply(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the operator sum ``sum_k M_k rho M_k^dag``."""
    mat = as_matrix(rho)
    if mat.shape != (ch.dim, ch.dim):
        raise ValueError(f"state shape {mat.shape} != ({ch.dim}, {ch.dim})")
    ks = ch.stacked()
    return np.einsum("kij,jl,kml->im", ks, mat, ks.conj(), optimize=True)


def apply_to_vector(ch: KrausChannel, psi: np.ndarray) -> np.ndarray:
    """Channel output on a pure-state input given as a vector."""
    vecs = ch.stacked() @ np.asarray(psi, dtype=complex)
    return np.einsum("ki,kj->ij", vecs, vecs.conj())


def compose(e2: KrausChannel, e1: KrausChannel) -> KrausChannel:
    """The composition e2 after e1, with the product Kraus list {M2_j M1_k}."""
    if e1.dims != e2.dims:
        raise ValueError(f"cannot compose channels with dims {e1.dims} and {e2.dims}")
    kraus = tuple(m2 @ m1 for m2 in e2.kraus for m1 in e1.kraus)
    return KrausChannel(kraus, e1.dims)


def convex_mixture(channels: Sequence[KrausChannel], probs: Sequence[float]) -> KrausChannel:
    """Probabilistic mixture of channels; Kraus lists scaled by sqrt(p)."""
    if len(channels) != len(probs) or not channels:
        raise ValueError("need equally many channels and probabilities")
    if abs(sum(probs) - 1.0) > 1e-12 or min(probs) < 0:
        raise ValueError("probabilities must be nonnegative and sum to 1")
    dims = channels[0].dims
    if any(ch.dims != dims for ch in channels):
        raise ValueError("mixture components must share dims")
    kraus = tuple(np.sqrt(p) * k for ch, p in zip(channels, probs) for k in ch.kraus)
    return KrausChannel(kraus, dims)


def identity_channel(dims: BiDims) -> KrausChannel:
    return KrausChannel((np.eye(dims.total, dtype=complex),), dims)


def _probe_vector(dims: BiDims) -> np.ndarray:
    # |Phi>_RA (x) |Phi'>_BS in (R, A, B, S) factor order, unnormalized.
    return kron_all(max_entangled(dims.dim_a, normalized=False).reshape(-1, 1),
                    max_entangled(dims.dim_b, normalized=False).reshape(-1, 1)).reshape(-1)


def choi(ch: KrausChannel) -> ChoiState:
    """Choi state from unnormalized entangled probes on both factors."""
    na, nb = ch.dims
    probe = _probe_vector(ch.dims)
    ir = np.eye(na, dtype=complex)
    i_s = np.eye(nb, dtype=complex)
    out = np.zeros((probe.size, probe.size), dtype=complex)
    for k in ch.kraus:
        v = kron_all(ir, k, i_s) @ probe
        out += np.outer(v, v.conj())
    return ChoiState(out, ch.dims)


def choi_of_map(f: Callable[[np.ndarray], np.ndarray], dims: BiDims) -> ChoiState:
    """Choi state of an arbitrary linear map, assembled from matrix units.

    Independent of :func:`choi`; used to cross-check channel constructions.
    """
    na, nb = dims
    n = dims.total
    out = np.zeros((na * n * nb, na * n * nb), dtype=complex)
    t = out.reshape(na, n, nb, na, n, nb)
    unit = np.zeros((n, n), dtype=complex)
    for i in range(na):
        for k in range(na):
            for j in range(nb):
                for ell in range(nb):
                    unit[:] = 0
                    unit[i * nb + j, k * nb + ell] = 1.0
                    t[i, :, j, k, :, ell] += f(unit)
    return ChoiState(out, dims)


def choi_distance(c1: ChoiState, c2: ChoiState) -> float:
    if c1.dims != c2.dims:
        raise ValueError("choi states have different dims")
    return frobenius(c1.matrix - c2.matrix)


def channels_equal(e1: KrausChannel, e2: KrausChannel, tol: float = ATOL) -> bool:
    return choi_distance(choi(e1), choi(e2)) < tol


def measurement_channel(basis) -> KrausChannel:
    """Complete measurement superoperator of an orthonormal basis.

    Kraus operators are the rank-1 projectors onto the basis states;
    the channel decoheres any input in that basis.
    """
    kraus = tuple(np.outer(v, v.conj()) for v in basis.vectors)
    return KrausChannel(kraus, basis.dims)


def choi_is_psd(c: ChoiState, tol: float = ATOL) -> bool:
    """Complete-positivity certificate: the Choi state has no negative eigenvalues."""
    mat = c.matrix
    if not mat_close(mat, dag(mat), tol * mat.shape[0]):
        return False
    return bool(np.linalg.eigvalsh((mat + dag(mat)) / 2).min() > -tol * mat.shape[0])
