"""Coincidence-measurement simulation and linear-inversion reconstruction.

The measurement protocol prepares the 16 separable products of the four
single-qubit states {|0>, |1>, |+>, |L>} (|+> = (|0>+|1>)/sqrt2,
|L> = (|0>+i|1>)/sqrt2), sends each through the channel and projects the
output onto the same 16 product states. Reconstruction is purely linear:
each output state comes back through the dual frame of the projector
set, the channel's action on the standard operator basis follows by
linear combination, and the process matrix is assembled from those
outputs directly. Nothing is renormalized, so an overall count-rate
factor propagates into the reconstructed matrix unchanged, and nothing
forces positivity; PSD repair is an explicit, optional post-step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import KrausSet, MapTable, ProcessMatrix, apply_kraus, assemble_choi_from_map
from .linalg import dagger, kron, projector

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET1 = np.array([0.0, 1.0], dtype=complex)
_KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_KET_CIRC = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class InputStateSet:
    """The four single-qubit preparation states and their 16 products.

    ``products[4*i + j] = singles[i] (x) singles[j]``. The products are
    linearly independent; ``gram_condition`` reports the condition number
    of their Gram matrix as a health figure for the inversion.
    """

    singles: tuple[np.ndarray, ...]
    products: tuple[np.ndarray, ...]
    gram_condition: float


@dataclass
class CountTable:
    """Coincidence record: one row per input state, one column per projector."""

    counts: np.ndarray
    total_scale: float = 1.0
    noise_seed: int | None = None

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=float)
        if self.counts.shape != (16, 16):
            raise ValueError(f"count table has shape {self.counts.shape}, expected (16, 16)")
        if np.any(self.counts < 0.0):
            raise ValueError("counts must be nonnegative")


@dataclass(frozen=True)
class DecompositionCoefficients:
    """Coefficients writing each standard element as a combination of inputs.

    ``coeffs[[kl], n]`` satisfies ``X_k (x) X_l = sum_n coeffs[[kl], n]
    products[n]`` exactly; verified at construction.
    """

    coeffs: np.ndarray


def build_input_set() -> InputStateSet:
    """The standard four-state preparation set and its 16 two-qubit products."""
    singles = tuple(projector(k) for k in (_KET0, _KET1, _KET_PLUS, _KET_CIRC))
    products = tuple(kron(singles[i], singles[j]) for i in range(4) for j in range(4))
    flat = np.stack([p.reshape(16) for p in products])
    gram = flat.conj() @ flat.T
    cond = float(np.linalg.cond(gram))
    if not np.isfinite(cond):
        raise ValueError("input product states are linearly dependent")
    return InputStateSet(singles=singles, products=products, gram_condition=cond)


def _single_qubit_duals(singles: tuple[np.ndarray, ...]) -> list[np.ndarray]:
    # Rows of b are the vectorized projectors; the dual-frame operators are
    # the columns of b^-1, Hermitized to kill rounding asymmetry.
    b = np.stack([s.conj().reshape(4) for s in singles])
    inv = np.linalg.inv(b)
    duals = []
    for n in range(4):
        d = inv[:, n].reshape(2, 2)
        duals.append(0.5 * (d + dagger(d)))
    return duals


def decompose_standard(inputs: InputStateSet) -> DecompositionCoefficients:
    """Solve for the input-state combinations that realize each standard element.

    The single-qubit problem (four coefficients per element) is solved
    once and the two-qubit coefficients are the tensor products of the
    single-qubit solutions. The reconstruction identity is checked to
    1e-12 before returning.
    """
    b = np.stack([s.reshape(4) for s in inputs.singles]).T
    single_coeffs = np.empty((4, 4), dtype=complex)
    for k in range(4):
        x = np.zeros((2, 2), dtype=complex)
        x[k // 2, k % 2] = 1.0
        single_coeffs[k] = np.linalg.solve(b, x.reshape(4))

    coeffs = np.empty((16, 16), dtype=complex)
    for k in range(4):
        for l in range(4):
            coeffs[4 * k + l] = np.kron(single_coeffs[k], single_coeffs[l])

    for k in range(4):
        for l in range(4):
            x = kron(_unit(k), _unit(l))
            combo = sum(
                coeffs[4 * k + l, n] * inputs.products[n] for n in range(16)
            )
            if np.max(np.abs(combo - x)) > 1e-12:
                raise ValueError("input set failed to reproduce the standard elements")
    return DecompositionCoefficients(coeffs=coeffs)


def _unit(k: int) -> np.ndarray:
    u = np.zeros((2, 2), dtype=complex)
    u[k // 2, k % 2] = 1.0
    return u


def expectation_values(rho: np.ndarray, projectors: tuple[np.ndarray, ...]) -> np.ndarray:
    """Real expectation values ``Tr(Pi rho)`` for a tuple of projectors."""
    return np.array([float(np.trace(p @ rho).real) for p in projectors])


def simulate_counts(
    channel: KrausSet,
    inputs: InputStateSet,
    projectors: tuple[np.ndarray, ...] | None = None,
    total_scale: float = 1.0,
    noise: str | None = None,
    seed: int | None = None,
) -> CountTable:
    """Simulate the coincidence record of the measurement protocol.

    Expected rate for input n and projector m is
    ``total_scale * Tr(Pi_m E(rho_n))``. With ``noise="poisson"`` each
    entry is replaced by a Poisson draw with that mean, reproducibly for
    a given seed; the default is the noiseless expected-rate table.
    """
    if total_scale <= 0.0:
        raise ValueError("total_scale must be positive")
    if noise not in (None, "poisson"):
        raise ValueError(f"unknown noise mode {noise!r}")
    if projectors is None:
        projectors = inputs.products
    counts = np.empty((16, 16), dtype=float)
    for n, rho_in in enumerate(inputs.products):
        rho_out = apply_kraus(channel, rho_in)
        counts[n] = total_scale * np.clip(expectation_values(rho_out, projectors), 0.0, None)
    if noise == "poisson":
        rng = np.random.default_rng(seed)
        counts = rng.poisson(counts).astype(float)
    return CountTable(counts=counts, total_scale=total_scale, noise_seed=seed)


def reconstruct_state(
    expectations: np.ndarray, inputs: InputStateSet
) -> np.ndarray:
    """Invert 16 product-projector expectations into a two-qubit matrix.

    Linear inversion through the tensor product of the single-qubit dual
    frames: exact on noiseless data, Hermitian by construction, and
    deliberately not forced positive (noise can produce negative
    eigenvalues, which callers may repair explicitly). The overall scale
    of the expectations is preserved, so count-rate data reconstructs a
    rate-scaled, unnormalized matrix.
    """
    m = np.asarray(expectations, dtype=float)
    if m.shape != (16,):
        raise ValueError(f"expected 16 expectation values, got shape {m.shape}")
    duals = _single_qubit_duals(inputs.singles)
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            rho += m[4 * i + j] * kron(duals[i], duals[j])
    return rho


def reconstruct_process(ct: CountTable, inputs: InputStateSet) -> ProcessMatrix:
    """Reconstruct the standard-basis process matrix from a count table.

    Pipeline: invert each input row into an (unnormalized) output state,
    combine the outputs into the channel's action on the standard
    elements using the decomposition coefficients, and assemble the
    process matrix from that map table. On noiseless data this equals the
    process matrix of the true channel times ``total_scale``.
    """
    coeffs = decompose_standard(inputs).coeffs
    outputs_per_input = [reconstruct_state(ct.counts[n], inputs) for n in range(16)]
    table = []
    for a in range(16):
        e_out = np.zeros((4, 4), dtype=complex)
        for n in range(16):
            e_out += coeffs[a, n] * outputs_per_input[n]
        table.append(e_out)
    return assemble_choi_from_map(MapTable(table))
