"""Truncated-Hilbert-space operators for the three quantum model families."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .models import BasisInfo, ModelKind, ModelSpec, Side, StateVector

__all__ = [
    "SparseOperator",
    "HamiltonianSet",
    "boson_ops",
    "collective_spin_ops",
    "build_hamiltonians",
    "excitation_operator",
    "build_multimode_harmonic",
]


@dataclass(frozen=True)
class SparseOperator:
    """Complex sparse matrix acting on a truncated Hilbert space.

    Thin wrapper over a CSR matrix carrying a hermiticity flag; entries are
    exposed as (row, col, value) triples for inspection.
    """

    matrix: sp.csr_matrix
    hermitian: bool

    def __post_init__(self) -> None:
        mat = sp.csr_matrix(self.matrix, dtype=complex)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError("operator must be square")
        object.__setattr__(self, "matrix", mat)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def entries(self):
        """Iterate over (row, col, value) for every stored entry."""
        coo = self.matrix.tocoo()
        yield from zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())

    def hermiticity_defect(self) -> float:
        """Largest entrywise deviation from self-adjointness."""
        diff = self.matrix - self.matrix.getH()
        if diff.nnz == 0:
            return 0.0
        return float(np.max(np.abs(diff.data)))

    def dagger(self) -> "SparseOperator":
        return SparseOperator(sp.csr_matrix(self.matrix.getH()), self.hermitian)

    def expectation(self, state: np.ndarray) -> float:
        """Real expectation value <state| O |state> (operator assumed hermitian)."""
        return float(np.real(np.vdot(state, self.matrix @ state)))

    def __matmul__(self, other: np.ndarray) -> np.ndarray:
        return self.matrix @ other


@dataclass(frozen=True)
class HamiltonianSet:
    """Charger, battery, and coupling Hamiltonians of one quantum model.

    ``h_total = h_a + h_b + h_1`` is the generator during the charging window,
    where the coupling switch is held at one.  Both local Hamiltonians have
    zero ground-state energy.
    """

    h_a: SparseOperator
    h_b: SparseOperator
    h_1: SparseOperator
    h_total: SparseOperator
    basis: BasisInfo

    def __post_init__(self) -> None:
        dims = {op.dimension for op in (self.h_a, self.h_b, self.h_1, self.h_total)}
        if len(dims) != 1 or dims.pop() != self.basis.dimension:
            raise ValueError("all Hamiltonian parts must share the basis dimension")

    @property
    def dimension(self) -> int:
        return self.basis.dimension


def boson_ops(cutoff: int) -> SparseOperator:
    """Lowering operator on a Fock space truncated at occupation ``cutoff - 1``.

    Nonzero elements ``a[n-1, n] = sqrt(n)``; the raising operator is the
    conjugate transpose.  The truncated commutator ``[a, a+]`` equals the
    identity except for the bottom-right entry ``-(cutoff - 1)``.
    """
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    roots = np.sqrt(np.arange(1, cutoff, dtype=float))
    mat = sp.diags(roots, offsets=1, shape=(cutoff, cutoff), dtype=complex)
    return SparseOperator(sp.csr_matrix(mat), hermitian=False)


def collective_spin_ops(n_units: int) -> tuple[SparseOperator, SparseOperator, SparseOperator]:
    """Spin-J matrices (J_x, J_y, J_z) for J = n_units / 2.

    Basis ordering: J_z eigenstates with eigenvalue m = -J ... +J ascending,
    so ``J_z`` is diagonal and ``J_+`` populates the first subdiagonal below
    the transpose convention ``J_+[m+1, m] = sqrt(J(J+1) - m(m+1))``.
    """
    if n_units < 1:
        raise ValueError("n_units must be at least 1")
    j = n_units / 2.0
    m = np.arange(-j, j + 1)
    raise_elems = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp = sp.diags(raise_elems, offsets=-1, shape=(n_units + 1, n_units + 1), dtype=complex)
    jm = jp.conj().T
    jx = sp.csr_matrix((jp + jm) / 2.0)
    jy = sp.csr_matrix((jp - jm) / 2.0j)
    jz = sp.csr_matrix(sp.diags(m, dtype=complex))
    return (
        SparseOperator(jx, hermitian=True),
        SparseOperator(jy, hermitian=True),
        SparseOperator(jz, hermitian=True),
    )


def _hermitian(mat) -> SparseOperator:
    return SparseOperator(sp.csr_matrix(mat), hermitian=True)


def _harmonic_sector_hamiltonians(spec: ModelSpec) -> HamiltonianSet:
    # Exact bright-mode reduction restricted to the conserved N-excitation
    # sector, basis |k>_A |N-k>_B with k the charger occupation.
    n = spec.n_units
    w0 = spec.omega0
    g_n = spec.g * math.sqrt(n)
    k = np.arange(n + 1, dtype=float)
    h_a = sp.diags(w0 * k, dtype=complex)
    h_b = sp.diags(w0 * (n - k), dtype=complex)
    # a B+ |k, N-k> = sqrt(k (N-k+1)) |k-1, N-k+1>
    hop = g_n * np.sqrt(k[1:] * (n - k[1:] + 1.0))
    h_1 = sp.diags([hop, hop], offsets=[1, -1], dtype=complex)
    basis = BasisInfo(("charger_excitation",), (n + 1,))
    return HamiltonianSet(
        _hermitian(h_a), _hermitian(h_b), _hermitian(h_1),
        _hermitian(h_a + h_b + h_1), basis,
    )


def _spin_hamiltonians(spec: ModelSpec) -> HamiltonianSet:
    n = spec.n_units
    w0 = spec.omega0
    jx, jy, jz = (op.matrix for op in collective_spin_ops(n))
    eye = sp.identity(n + 1, dtype=complex, format="csr")
    shift = jz + (n / 2.0) * eye
    h_a = sp.kron(w0 * shift, eye, format="csr")
    h_b = sp.kron(eye, w0 * shift, format="csr")
    h_1 = 4.0 * spec.g * (sp.kron(jx, jx, format="csr") + sp.kron(jy, jy, format="csr"))
    basis = BasisInfo(("charger_spin", "battery_spin"), (n + 1, n + 1))
    return HamiltonianSet(
        _hermitian(h_a), _hermitian(h_b), _hermitian(h_1),
        _hermitian(h_a + h_b + h_1), basis,
    )


def _dicke_hamiltonians(spec: ModelSpec, cutoff: int) -> HamiltonianSet:
    n = spec.n_units
    w0 = spec.omega0
    if cutoff < n + 1:
        raise ValueError("cutoff must be at least n_units + 1 to host the charger Fock state")
    a = boson_ops(cutoff).matrix
    number = a.getH() @ a
    jx, _, jz = (op.matrix for op in collective_spin_ops(n))
    eye_ph = sp.identity(cutoff, dtype=complex, format="csr")
    eye_sp = sp.identity(n + 1, dtype=complex, format="csr")
    h_a = sp.kron(w0 * number, eye_sp, format="csr")
    h_b = sp.kron(eye_ph, w0 * (jz + (n / 2.0) * eye_sp), format="csr")
    h_1 = 2.0 * spec.g * sp.kron(a + a.getH(), jx, format="csr")
    basis = BasisInfo(("cavity", "battery_spin"), (cutoff, n + 1))
    return HamiltonianSet(
        _hermitian(h_a), _hermitian(h_b), _hermitian(h_1),
        _hermitian(h_a + h_b + h_1), basis,
    )


def build_hamiltonians(spec: ModelSpec, cutoff: int | None = None) -> HamiltonianSet:
    """Assemble (H_A, H_B, H_1, H_total) for a quantum model spec.

    For the Dicke family a photon cutoff must be supplied either through the
    spec or the ``cutoff`` argument (the engine resolves automatic cutoffs
    before calling).
    """
    if spec.side is not Side.QUANTUM:
        raise ValueError("build_hamiltonians requires a quantum spec")
    if spec.kind is ModelKind.HARMONIC:
        return _harmonic_sector_hamiltonians(spec)
    if spec.kind is ModelKind.SPIN:
        return _spin_hamiltonians(spec)
    if spec.kind is ModelKind.DICKE:
        nc = cutoff if cutoff is not None else spec.cutoff
        if nc is None:
            raise ValueError("quantum Dicke Hamiltonians need a photon cutoff")
        return _dicke_hamiltonians(spec, nc)
    raise ValueError(f"unsupported model kind {spec.kind!r}")


def excitation_operator(spec: ModelSpec, ham: HamiltonianSet) -> SparseOperator | None:
    """Conserved excitation number, where one exists.

    Harmonic: total occupation of charger plus bright mode (constant on the
    sector basis).  Spin: J_z of charger plus battery.  The Dicke coupling
    does not conserve any excitation number, so ``None`` is returned.
    """
    if spec.kind is ModelKind.HARMONIC:
        n = spec.n_units
        return _hermitian(sp.identity(n + 1, dtype=complex) * float(n))
    if spec.kind is ModelKind.SPIN:
        n = spec.n_units
        _, _, jz = collective_spin_ops(n)
        eye = sp.identity(n + 1, dtype=complex, format="csr")
        total = sp.kron(jz.matrix, eye, format="csr") + sp.kron(eye, jz.matrix, format="csr")
        return _hermitian(total)
    return None


def build_multimode_harmonic(spec: ModelSpec) -> tuple[HamiltonianSet, StateVector]:
    """Full (1 + N)-mode harmonic model without the bright-mode reduction.

    Per-mode cutoff N + 1 is exact here: the dynamics conserves the total
    excitation number N, so no reachable state has a mode occupation above N.
    Intended as a small-N cross-check of the sector-reduced simulation; the
    dimension grows as (N+1)^(N+1).
    """
    if spec.kind is not ModelKind.HARMONIC or spec.side is not Side.QUANTUM:
        raise ValueError("multimode construction applies to the quantum harmonic model")
    n = spec.n_units
    if n > 4:
        raise ValueError("multimode cross-check is intended for n_units <= 4")
    w0 = spec.omega0
    per_mode = n + 1
    a = boson_ops(per_mode).matrix
    number = a.getH() @ a
    eye = sp.identity(per_mode, dtype=complex, format="csr")

    def embed(op, position: int):
        factors = [eye] * (n + 1)
        factors[position] = op
        out = factors[0]
        for f in factors[1:]:
            out = sp.kron(out, f, format="csr")
        return out

    h_a = w0 * embed(number, 0)
    h_b = sp.csr_matrix((per_mode ** (n + 1),) * 2, dtype=complex)
    h_1 = sp.csr_matrix((per_mode ** (n + 1),) * 2, dtype=complex)
    a_charger = embed(a, 0)
    for i in range(1, n + 1):
        h_b = h_b + w0 * embed(number, i)
        b_i = embed(a, i)
        h_1 = h_1 + spec.g * (a_charger @ b_i.getH() + a_charger.getH() @ b_i)
    basis = BasisInfo(
        ("charger",) + tuple(f"battery_{i}" for i in range(1, n + 1)),
        (per_mode,) * (n + 1),
    )
    ham = HamiltonianSet(
        _hermitian(h_a), _hermitian(h_b), _hermitian(h_1),
        _hermitian(h_a + h_b + h_1), basis,
    )
    amp = np.zeros(per_mode ** (n + 1), dtype=complex)
    amp[n * per_mode**n] = 1.0  # charger occupation N, all batteries empty
    return ham, StateVector(amp, basis)
