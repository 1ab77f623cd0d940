"""Completely positive trace-nonincreasing maps on two qubits.

A channel is held either as a weighted Kraus set ``E(rho) = sum_i w_i
K_i rho K_i_dag`` or as a 16x16 process matrix ``chi`` in a declared
operator basis. In the standard basis, ``chi`` is stored directly as the
density matrix of the channel's associated four-qubit state (acting the
channel on half of two unnormalized maximally entangled pairs), so
converting between the two representations is an eigendecomposition in
one direction and a sum of coefficient-vector outer products in the
other. No renormalization ever happens implicitly; trace-decreasing and
rate-scaled channels keep their scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import BASIS_KINDS, STANDARD, OperatorBasis, build_basis
from .linalg import dagger, kron, permutation_operator

@dataclass
class KrausSet:
    """Weighted Kraus operators ``[(w_i, K_i)]`` of a CP map on two qubits.

    Weights are kept separate from the operators so that mixing
    probabilities stay visible to the fitting layer. When ``physical``
    is set, the trace-nonincreasing condition (largest eigenvalue of
    ``sum_i w_i K_i_dag K_i`` at most 1) is enforced at construction.
    """

    items: list[tuple[float, np.ndarray]]
    physical: bool = False

    def __post_init__(self) -> None:
        cleaned = []
        for w, k in self.items:
            w = float(w)
            if w < 0.0:
                raise ValueError("Kraus weights must be nonnegative")
            k = np.asarray(k, dtype=complex)
            if k.shape != (4, 4):
                raise ValueError(f"Kraus operator has shape {k.shape}, expected (4, 4)")
            cleaned.append((w, k))
        self.items = cleaned
        if self.physical:
            top = float(np.linalg.eigvalsh(self.total_effect())[-1])
            if top > 1.0 + 1e-9:
                raise ValueError(f"map increases trace: max eigenvalue {top} of sum w K_dag K")

    def total_effect(self) -> np.ndarray:
        """The effect operator ``sum_i w_i K_i_dag K_i``."""
        return sum(w * (dagger(k) @ k) for w, k in self.items)


@dataclass
class ProcessMatrix:
    """A 16x16 Hermitian process matrix together with its basis tag."""

    basis: str
    m: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.basis not in BASIS_KINDS:
            raise ValueError(f"unknown basis tag {self.basis!r}")
        self.m = np.asarray(self.m, dtype=complex)
        if self.m.shape != (16, 16):
            raise ValueError(f"process matrix has shape {self.m.shape}, expected (16, 16)")
        scale = max(1.0, float(np.max(np.abs(self.m))))
        if np.max(np.abs(self.m - dagger(self.m))) > 1e-8 * scale:
            raise ValueError("process matrix is not Hermitian")


@dataclass
class MapTable:
    """Channel outputs on all 16 standard basis elements, indexed by [kl]."""

    outputs: list[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.outputs) != 16:
            raise ValueError("a map table needs all 16 outputs")
        self.outputs = [np.asarray(o, dtype=complex) for o in self.outputs]


def to_coeff_vector(op: np.ndarray) -> np.ndarray:
    """Expansion coefficients of a two-qubit operator in the standard basis.

    Component ``[kl] = 4*k + l`` equals ``Tr((X_k (x) X_l)_dag K)``; for
    matrix units this is a fixed reindexing of the operator's entries.
    """
    op = np.asarray(op, dtype=complex)
    return op.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(16)


def from_coeff_vector(c: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_coeff_vector`."""
    c = np.asarray(c, dtype=complex)
    return c.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def apply_kraus(ks: KrausSet, rho: np.ndarray) -> np.ndarray:
    """Apply the operator sum ``sum_i w_i K_i rho K_i_dag``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"state has shape {rho.shape}, expected (4, 4)")
    out = np.zeros((4, 4), dtype=complex)
    for w, k in ks.items:
        out += w * (k @ rho @ dagger(k))
    return out


def apply_process_matrix(chi: ProcessMatrix, basis: OperatorBasis, rho: np.ndarray) -> np.ndarray:
    """Apply ``E(rho) = sum_ab chi[a,b] A_a rho A_b_dag`` in the given basis."""
    if chi.basis != basis.kind:
        raise ValueError(f"process matrix is tagged {chi.basis!r} but basis is {basis.kind!r}")
    el = np.stack(basis.elements)
    return np.einsum("ab,aij,jk,blk->il", chi.m, el, np.asarray(rho, dtype=complex), el.conj())


def choi_from_kraus(ks: KrausSet) -> ProcessMatrix:
    """Standard-basis process matrix of a Kraus set.

    Expanding each operator in the standard basis gives coefficient
    vectors ``c_i``; the process matrix is the weighted sum of their
    outer products, hence Hermitian, PSD and of rank at most the number
    of Kraus items.
    """
    m = np.zeros((16, 16), dtype=complex)
    for w, k in ks.items:
        c = to_coeff_vector(k)
        m += w * np.outer(c, c.conj())
    return ProcessMatrix(STANDARD, m)


def kraus_from_process_matrix(chi: ProcessMatrix, tol: float = 1e-6) -> KrausSet:
    """Extract a Kraus set from a standard-basis process matrix by eigendecomposition.

    The tolerance is interpreted relative to the trace of ``chi`` (an
    absolute tolerance on the unit-trace normalization). Eigenvalues below
    ``-tol`` mean the matrix is not completely positive and raise
    ``ValueError``; eigenpairs with eigenvalue above ``tol`` become
    ``(weight, operator)`` items.
    """
    if chi.basis != STANDARD:
        raise ValueError("Kraus extraction expects a standard-basis process matrix")
    m = 0.5 * (chi.m + dagger(chi.m))
    tr = float(np.trace(m).real)
    ref = tr if tr > 0.0 else 1.0
    w, v = np.linalg.eigh(m)
    if w[0] < -tol * ref:
        raise ValueError(
            f"not completely positive: eigenvalue {w[0]:.3e} below -{tol:.1e} x trace"
        )
    items = [
        (float(w[a]), from_coeff_vector(v[:, a]))
        for a in range(16)
        if w[a] > tol * ref
    ]
    return KrausSet(items)


def map_on_standard_basis(ks: KrausSet) -> MapTable:
    """Evaluate the channel on every standard basis element ``X_k (x) X_l``."""
    outputs = []
    for k in range(4):
        for l in range(4):
            x = kron(_unit(k), _unit(l))
            outputs.append(apply_kraus(ks, x))
    return MapTable(outputs)


def _unit(k: int) -> np.ndarray:
    u = np.zeros((2, 2), dtype=complex)
    u[k // 2, k % 2] = 1.0
    return u


# Reordering between the two natural four-qubit layouts of the associated
# state: (in1, out1, in2, out2) interleaved for the process matrix versus
# (in1, in2, out1, out2) for the map-table sum. Built once.
_REORDER = (
    permutation_operator(4, 1, 2)
    @ permutation_operator(4, 0, 1)
    @ permutation_operator(4, 2, 3)
)


def assemble_choi_from_map(mt: MapTable) -> ProcessMatrix:
    """Build the standard-basis process matrix from a table of channel outputs.

    The 16x16 matrix ``sum_kl X_k (x) X_l (x) E(X_k (x) X_l)`` orders the
    four qubits as inputs-then-outputs; conjugating with the inverse of
    the fixed qubit reordering brings it to the interleaved layout whose
    matrix in the standard state basis is exactly the process matrix.
    This is the reconstruction route used by tomography: it needs only
    the outputs on the standard elements, no matrix inversion.
    """
    d_tilde = np.zeros((16, 16), dtype=complex)
    for k in range(4):
        for l in range(4):
            d_tilde += kron(_unit(k), _unit(l), mt.outputs[4 * k + l])
    m = dagger(_REORDER) @ d_tilde @ _REORDER
    return ProcessMatrix(STANDARD, m)


def transform_process_matrix(chi: ProcessMatrix, target: OperatorBasis | str) -> ProcessMatrix:
    """Re-express a process matrix in another operator basis.

    Transformation is by conjugation with the target basis unitary
    (``u_dag chi u`` going out of the standard basis), so eigenvalues and
    trace are preserved and round trips are exact to rounding.
    """
    if isinstance(target, str):
        target = build_basis(target)
    m = chi.m
    if chi.basis != STANDARD:
        u_src = build_basis(chi.basis).u_matrix
        m = u_src @ m @ dagger(u_src)
    if target.kind != STANDARD:
        m = dagger(target.u_matrix) @ m @ target.u_matrix
    return ProcessMatrix(target.kind, m)
