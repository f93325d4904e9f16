"""
Dense complex Hermitian linear algebra.

Eigendecomposition through LAPACK with a cyclic complex Jacobi fallback,
fractional matrix powers through the spectral decomposition, positivity
tests, and reproducible samplers for positive matrices, unitaries and
contractions.

All matrix types are immutable after construction; the spectral
decomposition of a matrix is computed once and cached on the instance.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg as sla

from .errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

# eig_tol = EIG_TOL_FACTOR * dim
EIG_TOL_FACTOR = 1e-12
MAX_SWEEPS = 100
# Negative powers need min_eig >= STRICT_FLOOR_FACTOR * ||X||_2
STRICT_FLOOR_FACTOR = 1e-10
PSD_TOL = 1e-12
DEFAULT_COND_CAP = 1e3

# Sweeping stops once the off-diagonal Frobenius mass drops below this
# fraction of ||H||_F.
_OFFDIAG_STOP = 1e-15


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, k: int, l: int) -> None:
    """Annihilate a[k, l] (and a[l, k]) in place with a complex rotation"""
    akl = a[k, l]
    mag = abs(akl)
    if mag == 0.0:
        return

    # Phase D = diag(1, conj(phase)) makes the pivot real, then a real
    # Jacobi rotation finishes the job.
    phase = akl / mag
    diff = (a[l, l] - a[k, k]).real
    if mag < abs(diff) * 1.0e-36:
        t = mag / diff
    else:
        theta = diff / (2.0 * mag)
        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])

    idx = [k, l]
    a[:, idx] = a[:, idx] @ rot
    a[idx, :] = rot.conj().T @ a[idx, :]
    a[k, l] = 0.0
    a[l, k] = 0.0
    a[k, k] = a[k, k].real
    a[l, l] = a[l, l].real
    v[:, idx] = v[:, idx] @ rot


def jacobi_eigh(h: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Args:
        h: Hermitian matrix (only Hermitian input gives meaningful output)
        max_sweeps: Maximum number of full cyclic sweeps

    Returns:
        Tuple of (eigenvalues ascending, eigenvectors as columns)

    Raises:
        ConvergenceError: if the off-diagonal mass is still above tolerance
            after max_sweeps sweeps
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    threshold = _OFFDIAG_STOP * scale
    # A sweep that no longer reduces the off-diagonal mass is roundoff-bound;
    # accept it once it is within eig_tol.
    stagnation_floor = EIG_TOL_FACTOR * n * scale

    sweeps = 0
    off = _offdiag_norm(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps", off
            )
        for k in range(n - 1):
            for l in range(k + 1, n):
                _jacobi_rotate(a, v, k, l)
        sweeps += 1
        previous, off = off, _offdiag_norm(a)
        if off >= previous and off <= stagnation_floor:
            break

    logger.debug(f"Jacobi converged after {sweeps} sweeps (dim={n})")
    eigenvalues = np.diag(a).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)"""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def map(self, values: np.ndarray) -> np.ndarray:
        """Return V diag(values) V*"""
        return (self.eigenvectors * values) @ self.eigenvectors.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.map(self.eigenvalues)

    def orthonormality_residual(self) -> float:
        v = self.eigenvectors
        return float(np.linalg.norm(v.conj().T @ v - np.eye(self.dim)))


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """
    Square complex matrix with exact Hermitian symmetry.

    The constructor copies its input and symmetrizes it as (H + H*)/2, so
    entries[i, j] == conj(entries[j, i]) holds bit for bit.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DomainError(f"Expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("Matrix has non-finite entries")
        arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return eig(self)

    @property
    def spectral_norm(self) -> float:
        lam = self.spectrum.eigenvalues
        return float(max(abs(lam[0]), abs(lam[-1])))

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _check_same_dim(self, other)
        return HermitianMatrix(self.entries + other.entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        _check_same_dim(self, other)
        return HermitianMatrix(self.entries - other.entries)

    def __mul__(self, factor: float) -> "HermitianMatrix":
        return HermitianMatrix(float(factor) * self.entries)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class PsdMatrix(HermitianMatrix):
    """
    Positive semidefinite Hermitian matrix.

    Construction fails when the smallest eigenvalue is below
    -PSD_TOL * ||X||_2. Operations needing strict positivity check
    `min_eig >= strict_floor` themselves.
    """

    def __post_init__(self):
        super().__post_init__()
        if self.min_eig < -PSD_TOL * self.spectral_norm:
            raise DomainError(
                f"Matrix is not positive semidefinite: smallest eigenvalue "
                f"{self.min_eig:.6e} (spectral norm {self.spectral_norm:.6e})"
            )

    @classmethod
    def from_spectrum(cls, eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> "PsdMatrix":
        """Build V diag(eigenvalues) V* and reuse the given decomposition"""
        order = np.argsort(eigenvalues, kind="stable")
        spectrum = SpectralDecomposition(
            np.asarray(eigenvalues, dtype=float)[order], np.asarray(eigenvectors)[:, order]
        )
        matrix = cls.__new__(cls)
        object.__setattr__(matrix, "entries", spectrum.reconstruct())
        HermitianMatrix.__post_init__(matrix)
        # Symmetrization perturbs entries at roundoff level only
        matrix.__dict__["spectrum"] = spectrum
        if matrix.min_eig < -PSD_TOL * matrix.spectral_norm:
            raise DomainError(f"Spectrum has negative eigenvalue {matrix.min_eig:.6e}")
        return matrix

    @classmethod
    def _unchecked(cls, entries: np.ndarray) -> "PsdMatrix":
        """Wrap entries known to be PSD by construction; the spectrum stays lazy"""
        matrix = cls.__new__(cls)
        object.__setattr__(matrix, "entries", entries)
        HermitianMatrix.__post_init__(matrix)
        return matrix

    @classmethod
    def from_hermitian(cls, h: HermitianMatrix) -> "PsdMatrix":
        """Promote a HermitianMatrix, reusing its spectrum when already computed"""
        if isinstance(h, PsdMatrix):
            return h
        matrix = cls.__new__(cls)
        object.__setattr__(matrix, "entries", h.entries)
        if "spectrum" in h.__dict__:
            matrix.__dict__["spectrum"] = h.__dict__["spectrum"]
        PsdMatrix.__post_init__(matrix)
        return matrix

    @property
    def min_eig(self) -> float:
        return float(self.spectrum.eigenvalues[0])

    @property
    def strict_floor(self) -> float:
        return STRICT_FLOOR_FACTOR * self.spectral_norm

    @property
    def is_strict(self) -> bool:
        """True when the matrix is admissible for negative powers"""
        return self.spectral_norm > 0.0 and self.min_eig >= self.strict_floor

    @property
    def condition_number(self) -> float:
        if self.min_eig <= 0.0:
            return float("inf")
        return self.spectral_norm / self.min_eig

    @property
    def base(self) -> HermitianMatrix:
        return HermitianMatrix(self.entries)

    def scaled(self, factor: float) -> "PsdMatrix":
        if factor <= 0:
            raise DomainError(f"Scaling factor must be positive, got {factor}")
        spectrum = self.spectrum
        return PsdMatrix.from_spectrum(factor * spectrum.eigenvalues, spectrum.eigenvectors)


@dataclass(frozen=True)
class PsdReport:
    """Outcome of a positivity test; truthy iff the matrix passed"""

    holds: bool
    min_eig: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class RandomSpec:
    """Seed, dimension and condition-number cap for a sampler"""

    seed: int
    dim: int
    cond_cap: float = DEFAULT_COND_CAP

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not self.cond_cap > 1.0:
            raise ValueError(f"cond_cap must exceed 1, got {self.cond_cap}")


@dataclass(frozen=True)
class PolarDilation:
    """Unitary of doubled dimension whose top-left block is `contraction`"""

    unitary: np.ndarray
    contraction: np.ndarray
    scale: float


def _check_same_dim(x: HermitianMatrix, y: HermitianMatrix) -> None:
    if x.dim != y.dim:
        raise DomainError(f"Dimension mismatch: {x.dim} vs {y.dim}")


class EigSolver(str, Enum):
    LAPACK = "lapack"
    JACOBI = "jacobi"


def eig(
    h: HermitianMatrix, solver: Union[EigSolver, str] = EigSolver.LAPACK
) -> SpectralDecomposition:
    """
    Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    LAPACK (zheevd through scipy) is the default. A LAPACK failure falls
    back to the cyclic Jacobi solver, which raises ConvergenceError when
    it cannot reach eig_tol either.
    """
    solver = EigSolver(solver)
    if solver is EigSolver.LAPACK:
        try:
            values, vectors = sla.eigh(h.entries, check_finite=False)
            return SpectralDecomposition(values, vectors)
        except np.linalg.LinAlgError as e:
            logger.warning(f"LAPACK eigh failed ({e}), retrying with Jacobi (dim={h.dim})")
    values, vectors = jacobi_eigh(h.entries)
    return SpectralDecomposition(values, vectors)


def _powered_eigenvalues(x: PsdMatrix, r: float) -> np.ndarray:
    lam = x.spectrum.eigenvalues
    if float(r).is_integer() and r > 0:
        return lam ** int(r)
    if r < 0:
        if not x.is_strict:
            raise DomainError(
                f"Power r={r} needs a strictly positive matrix: eigenvalue "
                f"{x.min_eig:.6e} is below the floor {x.strict_floor:.6e}"
            )
        return lam ** float(r)
    # Kernel directions: 0^r := 0 for r > 0
    return np.where(lam > 0.0, lam, 0.0) ** float(r)


def mat_pow(x: PsdMatrix, r: float) -> HermitianMatrix:
    """
    Matrix power X^r through the spectral decomposition.

    r == 0 gives the identity exactly; positive integer powers use repeated
    multiplication; other powers map the eigenvalues. Negative powers
    require `x.is_strict`, positive non-integer powers treat eigenvalues
    in [-PSD_TOL*||X||, 0] as zero.
    """
    if r == 0:
        return HermitianMatrix.identity(x.dim)
    if float(r).is_integer() and r > 0:
        return HermitianMatrix(np.linalg.matrix_power(x.entries, int(r)))
    return HermitianMatrix(x.spectrum.map(_powered_eigenvalues(x, r)))


def power_trace(x: PsdMatrix, r: float) -> float:
    """Tr[X^r] from the eigenvalues, with the domain rules of mat_pow"""
    if r == 0:
        return float(x.dim)
    return float(np.sum(_powered_eigenvalues(x, r)))


def is_psd(h: HermitianMatrix, tol: float = PSD_TOL) -> PsdReport:
    """True iff the smallest eigenvalue is >= -tol * max(1, ||H||_2)"""
    min_eig = float(h.spectrum.eigenvalues[0])
    threshold = tol * max(1.0, h.spectral_norm)
    return PsdReport(holds=min_eig >= -threshold, min_eig=min_eig, tolerance=threshold)


def convex_combination(x1: PsdMatrix, x2: PsdMatrix, lam: float) -> PsdMatrix:
    """lam * x1 + (1 - lam) * x2 for lam in [0, 1]"""
    _check_same_dim(x1, x2)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"Convex weight must lie in [0, 1], got {lam}")
    return PsdMatrix._unchecked(lam * x1.entries + (1.0 - lam) * x2.entries)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Counter-based generator keyed by `seed`.

    `stream` selects an independent substream (trial index, grid index...),
    so tasks never share generator state.
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *stream: int) -> int:
    """A 64-bit seed for a substream, stable across runs"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return int(sequence.generate_state(1, np.uint64)[0])


def ginibre(rng: np.random.Generator, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Complex Gaussian matrix with unit-variance entries"""
    cols = rows if cols is None else cols
    real = rng.standard_normal((rows, cols))
    imag = rng.standard_normal((rows, cols))
    return (real + 1j * imag) / np.sqrt(2.0)


def random_psd(spec: RandomSpec, rng: Optional[np.random.Generator] = None) -> PsdMatrix:
    """
    Sample X = G G* + delta I with delta chosen so that cond(X) <= cond_cap.

    Without an explicit `rng` the sample depends on `spec.seed` only.
    """
    rng = make_rng(spec.seed) if rng is None else rng
    g = ginibre(rng, spec.dim)
    gram = HermitianMatrix(g @ g.conj().T)
    lam = gram.spectrum.eigenvalues
    lo, hi = float(lam[0]), float(lam[-1])
    if hi <= 0.0:
        return PsdMatrix(np.eye(spec.dim))
    shift = max(0.0, (hi - spec.cond_cap * lo) / (spec.cond_cap - 1.0)) * (1.0 + 1e-9)
    return PsdMatrix.from_spectrum(np.maximum(lam, 0.0) + shift, gram.spectrum.eigenvectors)


def random_unitary(spec: RandomSpec, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre matrix with the phases of R removed"""
    rng = make_rng(spec.seed) if rng is None else rng
    z = ginibre(rng, spec.dim)
    q, r = sla.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_contraction(
    spec: RandomSpec, rng: Optional[np.random.Generator] = None, norm: float = 0.5
) -> np.ndarray:
    """Ginibre matrix rescaled to spectral norm `norm`"""
    if not 0.0 < norm <= 1.0:
        raise DomainError(f"Contraction norm must lie in (0, 1], got {norm}")
    rng = make_rng(spec.seed) if rng is None else rng
    g = ginibre(rng, spec.dim)
    return g * (norm / np.linalg.norm(g, 2))


def unitarity_residual(u: np.ndarray) -> float:
    """||U*U - I||_F"""
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])))


def polar_dilation(k: np.ndarray) -> PolarDilation:
    """
    Embed a contraction K as the corner of a unitary of doubled dimension.

    With K = W|K| the polar decomposition and S = W sqrt(1 - |K|^2), the
    block matrix [[K, S], [-S, K]] is unitary. Inputs with ||K||_2 > 1 are
    rescaled first and the factor is reported in `scale`.
    """
    k = np.array(k, dtype=complex)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {k.shape}")
    n = k.shape[0]

    scale = 1.0
    norm = float(np.linalg.norm(k, 2))
    if norm > 1.0:
        scale = 1.0 / norm
        k = k * scale
        logger.info(f"Rescaled input to a contraction (factor {scale:.6e})")

    w, modulus = sla.polar(k, side="right")
    defect = HermitianMatrix(np.eye(n) - modulus @ modulus)
    # Roundoff can push eigenvalues of 1 - |K|^2 slightly below zero
    root = defect.spectrum.map(np.sqrt(np.clip(defect.spectrum.eigenvalues, 0.0, None)))
    s = w @ root
    unitary = np.block([[k, s], [-s, k]])
    return PolarDilation(unitary=unitary, contraction=k, scale=scale)


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    return sla.block_diag(*blocks)
