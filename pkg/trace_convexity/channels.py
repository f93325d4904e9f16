"""
Quantum channels in Kraus form and data-processing checks for the
alpha-z relative Renyi entropies.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla

from .errors import ConsistencyError, DomainError
from .functionals import renyi_alpha_z
from .linalg import (
    DEFAULT_COND_CAP,
    PSD_TOL,
    HermitianMatrix,
    PsdMatrix,
    RandomSpec,
    derive_seed,
    ginibre,
    make_rng,
    random_psd,
)
from .session import ordered_map

logger = logging.getLogger(__name__)

TRACE_PRESERVATION_TOL = 1e-10
# Singular outputs get REGULARIZATION * (1 + ||X||) * I added, then are renormalized;
# the mixed smallest eigenvalue must clear the strict-positivity floor
REGULARIZATION = 1e-10
# dpi tolerance = DPI_TOL_FACTOR * (1 + |d_before|)
DPI_TOL_FACTOR = 1e-8
ALPHA_GUARD = 1e-3
_KNOWN_REGION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely positive trace-preserving map sum_j K_j rho K_j*"""

    kraus_ops: Tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise DomainError("A channel needs at least one Kraus operator")
        shapes = {k.shape for k in ops}
        if len(shapes) != 1 or ops[0].ndim != 2:
            raise DomainError(f"Kraus operators must share one 2-d shape, got {sorted(shapes)}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        residual = self.trace_preservation_residual()
        if residual > TRACE_PRESERVATION_TOL:
            raise DomainError(f"Kraus family is not trace preserving: residual {residual:.3e}")

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls((np.eye(dim),))

    @classmethod
    def unitary(cls, u: np.ndarray) -> "QuantumChannel":
        """rho -> U rho U*"""
        return cls((u,))

    @classmethod
    def fully_depolarizing(cls, dim_in: int, dim_out: Optional[int] = None) -> "QuantumChannel":
        """rho -> Tr(rho) I / dim_out, Kraus operators |i><j| / sqrt(dim_out)"""
        dim_out = dim_in if dim_out is None else dim_out
        ops = []
        for i in range(dim_out):
            for j in range(dim_in):
                k = np.zeros((dim_out, dim_in), dtype=complex)
                k[i, j] = 1.0 / math.sqrt(dim_out)
                ops.append(k)
        return cls(tuple(ops))

    @property
    def dim_in(self) -> int:
        return int(self.kraus_ops[0].shape[1])

    @property
    def dim_out(self) -> int:
        return int(self.kraus_ops[0].shape[0])

    def trace_preservation_residual(self) -> float:
        """||sum_j K_j* K_j - I||_F"""
        total = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.linalg.norm(total - np.eye(self.dim_in)))

    def apply(self, rho: PsdMatrix) -> PsdMatrix:
        """
        sum_j K_j rho K_j*, with eigenvalues in [-PSD_TOL ||rho||, 0] clamped to 0.

        Raises:
            DomainError: dimension mismatch
            ConsistencyError: the trace was not preserved
        """
        if rho.dim != self.dim_in:
            raise DomainError(f"Channel expects dimension {self.dim_in}, got {rho.dim}")
        out = HermitianMatrix(sum(k @ rho.entries @ k.conj().T for k in self.kraus_ops))
        spectrum = out.spectrum
        floor = -PSD_TOL * rho.spectral_norm
        lam = spectrum.eigenvalues
        if lam[0] < floor:
            raise ConsistencyError(f"Channel output has eigenvalue {lam[0]:.3e} below {floor:.3e}")
        result = PsdMatrix.from_spectrum(np.maximum(lam, 0.0), spectrum.eigenvectors)
        before, after = rho.trace(), result.trace()
        if abs(after - before) > TRACE_PRESERVATION_TOL * max(abs(before), 1e-300):
            raise ConsistencyError(f"Trace changed from {before!r} to {after!r}")
        return result


def apply(ch: QuantumChannel, rho: PsdMatrix) -> PsdMatrix:
    return ch.apply(rho)


def random_channel(
    dim_in: int,
    dim_out: int,
    env_dim: int,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> QuantumChannel:
    """
    Kraus family cut from a Haar-random isometry C^dim_in -> C^dim_out (x) C^env_dim.

    The isometry is the Q factor of a Gaussian matrix with the phases of R
    removed; its dim_out-row blocks are the Kraus operators.
    """
    if min(dim_in, dim_out, env_dim) < 1:
        raise DomainError(f"Dimensions must be positive, got {(dim_in, dim_out, env_dim)}")
    if dim_out * env_dim < dim_in:
        raise DomainError(
            f"An isometry needs dim_out * env_dim >= dim_in, got {dim_out} * {env_dim} < {dim_in}"
        )
    rng = make_rng(seed) if rng is None else rng
    z = ginibre(rng, dim_out * env_dim, dim_in)
    q, r = sla.qr(z, mode="economic")
    d = np.diag(r)
    isometry = q * (d / np.abs(d))
    ops = tuple(isometry[e * dim_out : (e + 1) * dim_out, :] for e in range(env_dim))
    return QuantumChannel(ops)


def random_state(
    dim: int,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
    cond_cap: float = DEFAULT_COND_CAP,
) -> PsdMatrix:
    """Trace-1 strictly positive matrix"""
    spec = RandomSpec(seed=seed, dim=dim, cond_cap=cond_cap)
    x = random_psd(spec, rng)
    return x.scaled(1.0 / x.trace())


def is_known_monotone(alpha: float, z: float) -> bool:
    """
    (alpha, z) where data processing is known to hold:
    z = alpha/2 with 1 < alpha <= 2; 0 < alpha <= 1 with z >= max(alpha, 1 - alpha);
    1 <= alpha <= 2 with z = 1; alpha >= 1 with z = alpha.
    """
    tol = _KNOWN_REGION_TOL

    def close(x: float, y: float) -> bool:
        return abs(x - y) <= tol * max(1.0, abs(y))

    return (
        (1.0 < alpha <= 2.0 + tol and close(z, alpha / 2.0))
        or (0.0 < alpha <= 1.0 + tol and z >= max(alpha, 1.0 - alpha) - tol)
        or (1.0 - tol <= alpha <= 2.0 + tol and close(z, 1.0))
        or (alpha >= 1.0 - tol and close(z, alpha))
    )


@dataclass(frozen=True)
class DpiResult:
    """d_before - d_after for one (rho, sigma, channel)"""

    d_before: float
    d_after: float
    alpha: float
    z: float
    tolerance: float
    regularized: bool = False

    @property
    def margin(self) -> float:
        return self.d_before - self.d_after

    @property
    def violated(self) -> bool:
        return self.margin < -self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["margin"] = self.margin
        data["violated"] = self.violated
        return data


def _check_state(name: str, x: PsdMatrix) -> None:
    if abs(x.trace() - 1.0) > TRACE_PRESERVATION_TOL:
        raise DomainError(f"{name} must have unit trace, got {x.trace()!r}")
    if not x.is_strict:
        raise DomainError(f"{name} is singular: smallest eigenvalue {x.min_eig:.3e}")


def _regularize(x: PsdMatrix) -> PsdMatrix:
    mixed = x.entries + REGULARIZATION * (1.0 + x.spectral_norm) * np.eye(x.dim)
    return PsdMatrix(mixed / np.trace(mixed).real)


def dpi_check(
    rho: PsdMatrix,
    sigma: PsdMatrix,
    alpha: float,
    ch: QuantumChannel,
    z: Optional[float] = None,
) -> DpiResult:
    """
    Data processing for D_{alpha,z}: compare D(rho||sigma) with D(E(rho)||E(sigma)).

    With z omitted, z = alpha/2 and alpha must lie in (1, 2]. Any other z runs
    the same comparison for exploratory scans. Singular outputs are mixed with
    REGULARIZATION * (1 + ||X||) * I, both arguments alike.

    Raises:
        DomainError: alpha/z out of range, non-normalized or singular inputs
        ConsistencyError: outputs stay singular after regularization
    """
    alpha = float(alpha)
    if z is None:
        if not 1.0 < alpha <= 2.0:
            raise DomainError(f"alpha must lie in (1, 2] for z = alpha/2, got {alpha}")
        z = alpha / 2.0
    z = float(z)
    if abs(alpha - 1.0) < ALPHA_GUARD:
        raise DomainError(f"alpha={alpha} is inside the guard band |alpha - 1| < {ALPHA_GUARD}")
    _check_state("rho", rho)
    _check_state("sigma", sigma)

    d_before = renyi_alpha_z(rho, sigma, alpha, z)
    out_rho, out_sigma = ch.apply(rho), ch.apply(sigma)
    regularized = False
    if not (out_rho.is_strict and out_sigma.is_strict):
        logger.warning("Channel output is singular; mixing both outputs with the identity")
        out_rho, out_sigma = _regularize(out_rho), _regularize(out_sigma)
        regularized = True
        if not (out_rho.is_strict and out_sigma.is_strict):
            raise ConsistencyError("Channel outputs remain singular after regularization")
    d_after = renyi_alpha_z(out_rho, out_sigma, alpha, z)

    return DpiResult(
        d_before=d_before,
        d_after=d_after,
        alpha=alpha,
        z=z,
        tolerance=DPI_TOL_FACTOR * (1.0 + abs(d_before)),
        regularized=regularized,
    )


@dataclass(frozen=True)
class DpiConfig:
    """Sampling budget of a DPI scan; trials cycle through `dims`"""

    dims: Tuple[int, ...] = (2, 3, 4)
    trials: int = 200
    env_dim: int = 2
    seed: int = 0
    cond_cap: float = DEFAULT_COND_CAP

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or min(self.dims) < 1:
            raise ValueError(f"dims must be positive integers, got {self.dims}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.env_dim < 1:
            raise ValueError(f"env_dim must be positive, got {self.env_dim}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.cond_cap > 1.0:
            raise ValueError(f"cond_cap must exceed 1, got {self.cond_cap}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DpiConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Unknown DPI settings: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["dims"] = list(self.dims)
        return data

    def replace(self, **changes: Any) -> "DpiConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class DpiRow:
    index: int
    alpha: float
    z: float
    known_monotone: bool
    trials: int = 0
    violations: int = 0
    worst_margin: Optional[float] = None
    error: Optional[str] = None

    @property
    def alarming(self) -> bool:
        """A violation where monotonicity is known"""
        return self.known_monotone and self.violations > 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class DpiReport:
    rows: Tuple[DpiRow, ...]
    config: DpiConfig

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def has_violation(self) -> bool:
        return any(row.alarming for row in self.rows)

    def counts(self) -> Dict[str, int]:
        return {
            "points": len(self.rows),
            "known_monotone": sum(row.known_monotone for row in self.rows),
            "violations": sum(row.violations for row in self.rows),
            "alarming": sum(row.alarming for row in self.rows),
            "errors": sum(row.error is not None for row in self.rows),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "counts": self.counts(),
            "rows": [row.to_dict() for row in self.rows],
        }


def _dpi_point(index: int, alpha: float, z: float, cfg: DpiConfig) -> DpiRow:
    known = is_known_monotone(alpha, z)
    point_seed = derive_seed(cfg.seed, index)
    violations = 0
    worst = math.inf
    try:
        for trial in range(cfg.trials):
            rng = make_rng(point_seed, trial)
            dim = cfg.dims[trial % len(cfg.dims)]
            rho = random_state(dim, rng=rng, cond_cap=cfg.cond_cap)
            sigma = random_state(dim, rng=rng, cond_cap=cfg.cond_cap)
            ch = random_channel(dim, dim, cfg.env_dim, rng=rng)
            result = dpi_check(rho, sigma, alpha, ch, z=z)
            violations += result.violated
            worst = min(worst, result.margin / (1.0 + abs(result.d_before)))
    except Exception as e:
        logger.error(f"DPI point alpha={alpha}, z={z} failed: {e}")
        return DpiRow(index, alpha, z, known, error=str(e))

    row = DpiRow(index, alpha, z, known, cfg.trials, violations, worst)
    if row.alarming:
        logger.warning(f"{violations} DPI violations at known-monotone alpha={alpha}, z={z}")
    return row


def dpi_scan(
    alpha_grid: Sequence[float],
    z_grid: Optional[Sequence[float]],
    cfg: DpiConfig,
    workers: Optional[int] = None,
) -> DpiReport:
    """
    Random data-processing search at every (alpha, z) of the grid.

    With `z_grid` None every alpha is paired with z = alpha/2. `worst_margin`
    is normalized by 1 + |d_before|. Points outside the known monotone set
    are exploratory and never alarming.
    """
    if z_grid is None:
        pairs = [(float(a), float(a) / 2.0) for a in alpha_grid]
    else:
        pairs = [(float(a), float(z)) for a in alpha_grid for z in z_grid]
    if not pairs:
        raise DomainError("DPI grid is empty")
    for alpha, z in pairs:
        if not (alpha > 0.0 and z > 0.0):
            raise DomainError(f"alpha and z must be positive, got alpha={alpha}, z={z}")
        if abs(alpha - 1.0) < ALPHA_GUARD:
            raise DomainError(f"alpha={alpha} is inside the guard band |alpha - 1| < {ALPHA_GUARD}")
    points: List[Tuple[int, float, float]] = [(i, a, z) for i, (a, z) in enumerate(pairs)]
    logger.info(f"DPI scan over {len(points)} points ({cfg.trials} trials each)")
    rows = ordered_map(lambda item: _dpi_point(item[0], item[1], item[2], cfg), points, workers)
    report = DpiReport(rows=tuple(rows), config=cfg)
    logger.info(f"DPI scan finished: {report.counts()}")
    return report
