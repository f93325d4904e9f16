"""
Randomized probes of joint convexity and concavity.

A probe draws pairs of argument tuples, forms convex combinations with the
configured weights and records the most negative normalized gap

    lam f(x1) + (1 - lam) f(x2) - f(lam x1 + (1 - lam) x2)

(negated for concavity). Trace-valued maps normalize by
max(1, |f(x1)|, |f(x2)|, |f(mid)|); operator-valued maps use the smallest
eigenvalue of the gap over the largest operator norm involved. When
sampling finds no violation a deterministic coordinate refinement tries to
push the margin below tolerance.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, ProbeError, TraceConvexityError
from .functionals import (
    Exponent,
    ParamPoint,
    TripleParams,
    parse_exponent,
    phi,
    psi,
    sandwich,
    triple_trace,
)
from .linalg import (
    DEFAULT_COND_CAP,
    HermitianMatrix,
    PsdMatrix,
    RandomSpec,
    block_diag,
    convex_combination,
    derive_seed,
    is_psd,
    make_rng,
    mat_pow,
    power_trace,
    random_psd,
    random_unitary,
)
from .regions import RegionPair, RegionStatus, RegionVerdict, classify
from .serialization import decode_matrix, encode_matrix
from .session import ordered_map

logger = logging.getLogger(__name__)

# Exponents within this distance of q = 0- (or p = 0-) or of s = 1/(p+q)
# are sampled with the tighter condition cap.
NEAR_BOUNDARY_WIDTH = 0.05
NEAR_BOUNDARY_COND_CAP = 1e2
# Samples are scaled by exp(U(-LOG_SCALE_RANGE, LOG_SCALE_RANGE))
LOG_SCALE_RANGE = 2.0
NEAR_RANK_ONE_FRACTION = 0.25
REFINE_INITIAL_STEP = 0.1
REFINE_SHRINK = 0.5
EMBEDDING_SAMPLES = 10


class Direction(str, Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


@dataclass(frozen=True)
class ProbeConfig:
    """Sampling budget and tolerances of a probe"""

    dim: int = 2
    trials: int = 200
    lambdas: Tuple[float, ...] = (0.5,)
    tol_rel: float = 1e-8
    seed: int = 0
    cond_cap: float = DEFAULT_COND_CAP
    refine_iterations: int = 200

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        if self.dim < 2:
            raise ValueError(f"dim must be at least 2, got {self.dim}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if not self.lambdas:
            raise ValueError("At least one convex weight is required")
        for lam in self.lambdas:
            if not 0.0 < lam < 1.0:
                raise ValueError(f"Convex weights must lie in (0, 1), got {lam}")
        if not self.tol_rel > 0.0:
            raise ValueError(f"tol_rel must be positive, got {self.tol_rel}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.cond_cap > 1.0:
            raise ValueError(f"cond_cap must exceed 1, got {self.cond_cap}")
        if self.refine_iterations < 0:
            raise ValueError(
                f"refine_iterations must be non-negative, got {self.refine_iterations}"
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProbeConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Unknown probe settings: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["lambdas"] = list(self.lambdas)
        return data

    def replace(self, **changes: Any) -> "ProbeConfig":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Witness:
    """
    Two argument tuples and a weight at which a probe was evaluated.

    `fixed` holds the matrices a probe keeps constant (K for the psi probe,
    D for the Epstein probe).
    """

    kind: str
    first: Tuple[np.ndarray, ...]
    second: Tuple[np.ndarray, ...]
    lam: float
    fixed: Tuple[np.ndarray, ...] = ()

    @property
    def dim(self) -> int:
        return int(self.first[0].shape[0])

    def embed(self, extra: int = 1, padding: float = 1.0) -> "Witness":
        """
        Block-diagonal embedding into dim + extra, padding every argument with
        padding * I. Both points get the same padding, so trace gaps are unchanged.
        """
        if extra < 1:
            raise DomainError(f"extra must be positive, got {extra}")
        pad = padding * np.eye(extra)

        def grow(ms: Tuple[np.ndarray, ...], block: np.ndarray) -> Tuple[np.ndarray, ...]:
            return tuple(block_diag(m, block) for m in ms)

        return Witness(
            kind=self.kind,
            first=grow(self.first, pad),
            second=grow(self.second, pad),
            lam=self.lam,
            fixed=grow(self.fixed, np.eye(extra)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "lam": float(self.lam).hex(),
            "first": [encode_matrix(m) for m in self.first],
            "second": [encode_matrix(m) for m in self.second],
            "fixed": [encode_matrix(m) for m in self.fixed],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Witness":
        return cls(
            kind=data["kind"],
            first=tuple(decode_matrix(m) for m in data["first"]),
            second=tuple(decode_matrix(m) for m in data["second"]),
            lam=float.fromhex(data["lam"]),
            fixed=tuple(decode_matrix(m) for m in data.get("fixed", [])),
        )


@dataclass(frozen=True)
class ConvexityVerdict:
    """Outcome of a probe: violated iff worst_margin < -tol_rel"""

    kind: str
    direction: Direction
    violated: bool
    worst_margin: float
    witness: Optional[Witness]
    trials_run: int
    tol_rel: float
    refined: bool = False

    def to_dict(self, include_witness: bool = True) -> Dict[str, Any]:
        data = {
            "kind": self.kind,
            "direction": self.direction.value,
            "violated": self.violated,
            "worst_margin": self.worst_margin,
            "trials_run": self.trials_run,
            "tol_rel": self.tol_rel,
            "refined": self.refined,
        }
        if include_witness:
            data["witness"] = self.witness.to_dict() if self.witness is not None else None
        return data


def sample_psd(rng: np.random.Generator, dim: int, cond_cap: float) -> PsdMatrix:
    """
    Mixture sampler: a dense G G* + delta I sample or, with probability
    NEAR_RANK_ONE_FRACTION, a spectrum with one dominant eigenvalue. Both
    respect cond_cap and are rescaled by a log-uniform factor.
    """
    scale = math.exp(rng.uniform(-LOG_SCALE_RANGE, LOG_SCALE_RANGE))
    spec = RandomSpec(seed=0, dim=dim, cond_cap=cond_cap)
    if dim > 1 and rng.random() < NEAR_RANK_ONE_FRACTION:
        tail = rng.uniform(1.0 / cond_cap, min(1.0, 4.0 / cond_cap), dim - 1)
        eigenvalues = np.concatenate(([1.0], tail))
        return PsdMatrix.from_spectrum(scale * eigenvalues, random_unitary(spec, rng))
    return random_psd(spec, rng).scaled(scale)


def _hermitian_coordinates(dim: int) -> List[np.ndarray]:
    coords = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1.0
        coords.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            re = np.zeros((dim, dim), dtype=complex)
            re[i, j] = re[j, i] = 1.0
            im = np.zeros((dim, dim), dtype=complex)
            im[i, j], im[j, i] = 1j, -1j
            coords.extend([re, im])
    return coords


def _near_boundary(params: ParamPoint) -> bool:
    p, q, s = params.as_floats()
    if -NEAR_BOUNDARY_WIDTH < p < 0.0 or -NEAR_BOUNDARY_WIDTH < q < 0.0:
        return True
    return p + q != 0.0 and abs(s * (p + q) - 1.0) < NEAR_BOUNDARY_WIDTH


Point = Tuple[PsdMatrix, ...]


class BaseProbe(ABC):
    """
    Common sampling, refinement and witness handling.

    Subclasses define `kind` and `margin`; `arity` is the number of matrix
    arguments of the map under test.
    """

    arity = 2

    def __init__(self, cfg: ProbeConfig, direction: Direction = Direction.CONVEX):
        self.cfg = cfg
        self.direction = Direction(direction)
        self.sign = 1.0 if self.direction is Direction.CONVEX else -1.0

    @property
    @abstractmethod
    def kind(self) -> str:
        """Probe identifier stored in witnesses"""

    @abstractmethod
    def margin(self, first: Point, second: Point, lam: float) -> float:
        """Normalized gap at (first, second, lam); negative means the inequality fails"""

    @property
    def cond_cap(self) -> float:
        return self.cfg.cond_cap

    @property
    def fixed(self) -> Tuple[np.ndarray, ...]:
        return ()

    def sample_point(self, rng: np.random.Generator) -> Point:
        return tuple(sample_psd(rng, self.cfg.dim, self.cond_cap) for _ in range(self.arity))

    def margin_of(self, witness: Witness) -> float:
        """Re-evaluate a (possibly deserialized) witness"""
        if witness.kind != self.kind:
            raise DomainError(f"Witness of kind '{witness.kind}' given to a '{self.kind}' probe")
        first = tuple(PsdMatrix(m) for m in witness.first)
        second = tuple(PsdMatrix(m) for m in witness.second)
        return self.margin(first, second, witness.lam)

    def _margin_at(self, first: Point, second: Point, lam: float, trial: int) -> float:
        try:
            return self.margin(first, second, lam)
        except TraceConvexityError as e:
            raise ProbeError(f"{self.kind} probe evaluation failed: {e}", trial) from e

    def _refine(
        self, best: Tuple[Point, Point, float], worst: float
    ) -> Tuple[float, Tuple[Point, Point, float]]:
        first, second, lam = best
        point = list(first) + list(second)
        steps = [REFINE_INITIAL_STEP * m.spectral_norm for m in point]
        coords = _hermitian_coordinates(self.cfg.dim)
        n_coords = len(point) * len(coords)
        improved = False

        for iteration in range(self.cfg.refine_iterations):
            index = iteration % n_coords
            if index == 0 and iteration > 0:
                if not improved:
                    steps = [REFINE_SHRINK * step for step in steps]
                improved = False
            which, c = divmod(index, len(coords))
            for sign in (1.0, -1.0):
                try:
                    candidate = PsdMatrix(point[which].entries + sign * steps[which] * coords[c])
                except DomainError:
                    continue
                if not candidate.is_strict or candidate.condition_number > self.cond_cap:
                    continue
                trial_point = list(point)
                trial_point[which] = candidate
                try:
                    value = self.margin(
                        tuple(trial_point[: self.arity]), tuple(trial_point[self.arity :]), lam
                    )
                except TraceConvexityError:
                    continue
                if value < worst:
                    worst, point, improved = value, trial_point, True
                    break
            if worst < -self.cfg.tol_rel:
                logger.debug(f"Refinement reached a violation after {iteration + 1} steps")
                break

        return worst, (tuple(point[: self.arity]), tuple(point[self.arity :]), lam)

    def run(self) -> ConvexityVerdict:
        cfg = self.cfg
        worst = math.inf
        best: Optional[Tuple[Point, Point, float]] = None

        for trial in range(cfg.trials):
            rng = make_rng(cfg.seed, trial)
            first = self.sample_point(rng)
            second = self.sample_point(rng)
            for lam in cfg.lambdas:
                value = self._margin_at(first, second, lam, trial)
                if value < worst:
                    worst, best = value, (first, second, lam)

        refined = False
        if worst >= -cfg.tol_rel and cfg.refine_iterations > 0:
            worst, best = self._refine(best, worst)
            refined = True

        first, second, lam = best
        witness = Witness(
            kind=self.kind,
            first=tuple(m.entries for m in first),
            second=tuple(m.entries for m in second),
            lam=lam,
            fixed=self.fixed,
        )
        verdict = ConvexityVerdict(
            kind=self.kind,
            direction=self.direction,
            violated=worst < -cfg.tol_rel,
            worst_margin=worst,
            witness=witness,
            trials_run=cfg.trials,
            tol_rel=cfg.tol_rel,
            refined=refined,
        )
        logger.debug(
            f"{self.kind} probe ({self.direction.value}, dim={cfg.dim}, "
            f"trials={cfg.trials}): violated={verdict.violated} worst={worst:.3e}"
        )
        return verdict


class ScalarProbe(BaseProbe):
    """Probe of a real-valued map given by `value`"""

    def __init__(self, cfg: ProbeConfig, direction: Direction = Direction.CONVEX):
        super().__init__(cfg, direction)
        # Endpoint values, reused across the lambdas of one trial
        self._recent: List[Tuple[Point, float]] = []

    @abstractmethod
    def value(self, args: Point) -> float:
        """The map under test"""

    def _endpoint_value(self, args: Point) -> float:
        for cached_args, cached in self._recent:
            if cached_args is args:
                return cached
        result = self.value(args)
        self._recent = (self._recent + [(args, result)])[-2:]
        return result

    def margin(self, first: Point, second: Point, lam: float) -> float:
        mid = tuple(convex_combination(x1, x2, lam) for x1, x2 in zip(first, second))
        f1, f2 = self._endpoint_value(first), self._endpoint_value(second)
        fm = self.value(mid)
        gap = lam * f1 + (1.0 - lam) * f2 - fm
        return self.sign * gap / max(1.0, abs(f1), abs(f2), abs(fm))


class TraceProbe(ScalarProbe):
    """(A, B) -> phi(A, B)"""

    def __init__(self, params: ParamPoint, cfg: ProbeConfig, direction=Direction.CONVEX):
        super().__init__(cfg, direction)
        self.params = params

    @property
    def kind(self) -> str:
        return "trace"

    @property
    def cond_cap(self) -> float:
        if _near_boundary(self.params):
            return min(self.cfg.cond_cap, NEAR_BOUNDARY_COND_CAP)
        return self.cfg.cond_cap

    def value(self, args: Point) -> float:
        return phi(args[0], args[1], self.params)


class PsiProbe(TraceProbe):
    """(A, B) -> psi(K, A, B) for a fixed K"""

    def __init__(
        self, k: np.ndarray, params: ParamPoint, cfg: ProbeConfig, direction=Direction.CONVEX
    ):
        super().__init__(params, cfg, direction)
        self.k = np.array(k, dtype=complex)
        if self.k.shape != (cfg.dim, cfg.dim):
            raise DomainError(f"K has shape {self.k.shape}, expected {(cfg.dim, cfg.dim)}")

    @property
    def kind(self) -> str:
        return "psi"

    @property
    def fixed(self) -> Tuple[np.ndarray, ...]:
        return (self.k,)

    def value(self, args: Point) -> float:
        return psi(self.k, args[0], args[1], self.params)


class TripleProbe(ScalarProbe):
    """(A, B, C) -> Tr[A^{q/2} B^p A^{q/2} C^r]"""

    arity = 3

    def __init__(self, t: TripleParams, cfg: ProbeConfig, direction=Direction.CONVEX):
        super().__init__(cfg, direction)
        self.t = t

    @property
    def kind(self) -> str:
        return "triple"

    def value(self, args: Point) -> float:
        return triple_trace(args[0], args[1], args[2], self.t)


class EpsteinProbe(ScalarProbe):
    """A -> Tr[(D A^t D)^u] for a fixed positive D"""

    arity = 1

    def __init__(
        self, d: PsdMatrix, t: float, u: float, cfg: ProbeConfig, direction=Direction.CONCAVE
    ):
        super().__init__(cfg, direction)
        if not 0.0 < t <= 1.0:
            raise DomainError(f"Inner exponent must lie in (0, 1], got {t}")
        if not u > 0.0:
            raise DomainError(f"Outer exponent must be positive, got {u}")
        if d.dim != cfg.dim:
            raise DomainError(f"D has dimension {d.dim}, expected {cfg.dim}")
        self.d = d
        self.t = float(t)
        self.u = float(u)

    @property
    def kind(self) -> str:
        return "epstein"

    @property
    def fixed(self) -> Tuple[np.ndarray, ...]:
        return (self.d.entries,)

    def value(self, args: Point) -> float:
        d = self.d.entries
        inner = HermitianMatrix(d @ mat_pow(args[0], self.t).entries @ d)
        return power_trace(PsdMatrix.from_hermitian(inner), self.u)


class OperatorProbe(BaseProbe):
    """(A, B) -> A^{q/2} B^p A^{q/2} in the operator order"""

    def __init__(self, p: Exponent, q: Exponent, cfg: ProbeConfig, direction=Direction.CONVEX):
        super().__init__(cfg, direction)
        if p == 0 or q == 0:
            raise DomainError(f"p and q must be nonzero, got p={p}, q={q}")
        self.p = float(p)
        self.q = float(q)

    @property
    def kind(self) -> str:
        return "operator"

    def margin(self, first: Point, second: Point, lam: float) -> float:
        mid = tuple(convex_combination(x1, x2, lam) for x1, x2 in zip(first, second))
        f1 = sandwich(first[0], first[1], self.p, self.q)
        f2 = sandwich(second[0], second[1], self.p, self.q)
        fm = sandwich(mid[0], mid[1], self.p, self.q)
        gap = HermitianMatrix(self.sign * (lam * f1.entries + (1.0 - lam) * f2.entries - fm.entries))
        report = is_psd(gap, self.cfg.tol_rel)
        scale = max(1.0, f1.spectral_norm, f2.spectral_norm, fm.spectral_norm)
        return report.min_eig / scale


class MonotoneChainProbe(BaseProbe):
    """
    The three steps behind convexity of Tr[(B A^q B)^s] for -1 <= q < 0, s >= 1:

    1. (A, B) -> B A^q B is operator convex,
    2. X -> Tr[X^s] is monotone, so Tr[Y^s] >= Tr[X_mid^s] for Y the
       combination of the endpoint values,
    3. X -> Tr[X^s] is convex.

    The margin is the worst of the three normalized margins.
    """

    def __init__(self, q: Exponent, s: Exponent, cfg: ProbeConfig):
        super().__init__(cfg, Direction.CONVEX)
        if not -1.0 <= float(q) < 0.0:
            raise DomainError(f"q must lie in [-1, 0), got {q}")
        if not float(s) >= 1.0:
            raise DomainError(f"s must be at least 1, got {s}")
        self.q = float(q)
        self.s = float(s)

    @property
    def kind(self) -> str:
        return "monotone-chain"

    def _trace_power(self, h: HermitianMatrix) -> float:
        return power_trace(PsdMatrix.from_hermitian(h), self.s)

    def margin(self, first: Point, second: Point, lam: float) -> float:
        mid = tuple(convex_combination(x1, x2, lam) for x1, x2 in zip(first, second))
        x1 = sandwich(first[1], first[0], self.q, 2.0)
        x2 = sandwich(second[1], second[0], self.q, 2.0)
        xm = sandwich(mid[1], mid[0], self.q, 2.0)
        y = HermitianMatrix(lam * x1.entries + (1.0 - lam) * x2.entries)

        op_scale = max(1.0, x1.spectral_norm, x2.spectral_norm, xm.spectral_norm)
        operator_margin = is_psd(y - xm, self.cfg.tol_rel).min_eig / op_scale

        t1, t2 = self._trace_power(x1), self._trace_power(x2)
        ty, tm = self._trace_power(y), self._trace_power(xm)
        scale = max(1.0, abs(t1), abs(t2), abs(ty), abs(tm))
        monotone_margin = (ty - tm) / scale
        convex_margin = (lam * t1 + (1.0 - lam) * t2 - ty) / scale
        return min(operator_margin, monotone_margin, convex_margin)


def probe_trace_convexity(
    params: ParamPoint, cfg: ProbeConfig, direction: Direction = Direction.CONVEX
) -> ConvexityVerdict:
    """Joint convexity (or concavity) test of phi at the exponents `params`"""
    return TraceProbe(params, cfg, direction).run()


def probe_operator_convexity(
    p: Exponent, q: Exponent, cfg: ProbeConfig, direction: Direction = Direction.CONVEX
) -> ConvexityVerdict:
    return OperatorProbe(p, q, cfg, direction).run()


def probe_triple_convexity(
    t: TripleParams, cfg: ProbeConfig, direction: Direction = Direction.CONVEX
) -> ConvexityVerdict:
    return TripleProbe(t, cfg, direction).run()


def probe_psi_convexity(
    k: np.ndarray, params: ParamPoint, cfg: ProbeConfig, direction: Direction = Direction.CONVEX
) -> ConvexityVerdict:
    """Same sampling as probe_trace_convexity; K = I reproduces it bit for bit"""
    return PsiProbe(k, params, cfg, direction).run()


def epstein_probe(
    d: PsdMatrix,
    exponent_inner: float,
    exponent_outer: float,
    cfg: ProbeConfig,
    direction: Direction = Direction.CONCAVE,
) -> ConvexityVerdict:
    """Midpoint test of A -> Tr[(D A^t D)^u], concave side by default"""
    return EpsteinProbe(d, exponent_inner, exponent_outer, cfg, direction).run()


def probe_monotone_chain(q: Exponent, s: Exponent, cfg: ProbeConfig) -> ConvexityVerdict:
    return MonotoneChainProbe(q, s, cfg).run()


@dataclass(frozen=True)
class BlockEmbedding:
    """psi_swap(diag(A, B), diag(A, B)) against phi(A, B) + phi(B, A)"""

    embedded: float
    direct: float

    @property
    def relative_gap(self) -> float:
        return abs(self.embedded - self.direct) / max(abs(self.direct), 1e-300)


def swap_unitary(dim: int) -> np.ndarray:
    """[[0, I], [I, 0]] on C^dim + C^dim"""
    zero = np.zeros((dim, dim))
    eye = np.eye(dim)
    return np.block([[zero, eye], [eye, zero]]).astype(complex)


def block_embedding_values(a: PsdMatrix, b: PsdMatrix, params: ParamPoint) -> BlockEmbedding:
    """Both sides of the doubled-dimension identity, evaluated independently"""
    block = PsdMatrix(block_diag(a.entries, b.entries))
    embedded = psi(swap_unitary(a.dim), block, block, params)
    direct = phi(a, b, params) + phi(b, a, params)
    return BlockEmbedding(embedded=embedded, direct=direct)


@dataclass(frozen=True)
class PsiEquivalenceReport:
    """
    Cross-check of the equivalent formulations of convexity.

    `verdicts` holds phi at dim n, psi with a random unitary at dim n and phi
    at dim 2n. A psi witness is transported to a phi witness (B -> K*BK,
    then padded to dim 2n); its margin must stay negative.
    """

    params: ParamPoint
    verdicts: Dict[str, ConvexityVerdict]
    block_identity_gap: float
    transported_margin: Optional[float]

    @property
    def agreement(self) -> Dict[str, bool]:
        names = list(self.verdicts)
        return {
            f"{x}/{y}": self.verdicts[x].violated == self.verdicts[y].violated
            for i, x in enumerate(names)
            for y in names[i + 1 :]
        }

    @property
    def consistent(self) -> bool:
        return self.transported_margin is None or self.transported_margin < 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "verdicts": {k: v.to_dict(include_witness=False) for k, v in self.verdicts.items()},
            "agreement": self.agreement,
            "block_identity_gap": self.block_identity_gap,
            "transported_margin": self.transported_margin,
            "consistent": self.consistent,
        }


def _transport_psi_witness(witness: Witness, k: np.ndarray) -> Witness:
    """psi_K(A, B) = phi(A, K*BK) for unitary K; B -> K*BK is linear"""

    def conj(point: Tuple[np.ndarray, ...]) -> Tuple[np.ndarray, ...]:
        a, b = point
        return a, k.conj().T @ b @ k

    flat = Witness("trace", conj(witness.first), conj(witness.second), witness.lam)
    return flat.embed(extra=witness.dim)


def probe_psi_equivalences(
    params: ParamPoint, cfg: ProbeConfig, direction: Direction = Direction.CONVEX
) -> PsiEquivalenceReport:
    n = cfg.dim
    k = random_unitary(RandomSpec(seed=derive_seed(cfg.seed, 1), dim=n))
    verdicts = {
        "phi": probe_trace_convexity(params, cfg, direction),
        "psi_unitary": probe_psi_convexity(k, params, cfg, direction),
        "phi_doubled": probe_trace_convexity(params, cfg.replace(dim=2 * n), direction),
    }

    gap = 0.0
    for sample in range(min(cfg.trials, EMBEDDING_SAMPLES)):
        rng = make_rng(cfg.seed, sample, 2)
        a = sample_psd(rng, n, cfg.cond_cap)
        b = sample_psd(rng, n, cfg.cond_cap)
        gap = max(gap, block_embedding_values(a, b, params).relative_gap)

    transported = None
    psi_verdict = verdicts["psi_unitary"]
    if psi_verdict.violated:
        doubled = TraceProbe(params, cfg.replace(dim=2 * n), direction)
        transported = doubled.margin_of(_transport_psi_witness(psi_verdict.witness, k))
        if transported >= 0.0:
            logger.warning(f"Transported psi witness lost its violation: margin {transported:.3e}")

    return PsiEquivalenceReport(
        params=params,
        verdicts=verdicts,
        block_identity_gap=gap,
        transported_margin=transported,
    )


def parse_values(text: str) -> Tuple[Exponent, ...]:
    """Comma-separated exponents ("0.25,1/2,1"); an empty string is an empty grid axis"""
    text = text.strip()
    if not text:
        return ()
    return tuple(parse_exponent(item) for item in text.split(","))


@dataclass(frozen=True)
class GridSpec:
    """Cartesian grid over (p, q, s)"""

    p_values: Tuple[Exponent, ...]
    q_values: Tuple[Exponent, ...]
    s_values: Tuple[Exponent, ...]

    def __post_init__(self):
        for name in ("p_values", "q_values", "s_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for value in self.p_values + self.q_values:
            if value == 0:
                raise DomainError("Grid values of p and q must be nonzero")
        for value in self.s_values:
            if not value > 0:
                raise DomainError(f"Grid values of s must be positive, got {value}")

    @classmethod
    def parse(cls, p: str, q: str, s: str) -> "GridSpec":
        return cls(parse_values(p), parse_values(q), parse_values(s))

    def points(self) -> List[ParamPoint]:
        return [
            ParamPoint(p, q, s)
            for p in self.p_values
            for q in self.q_values
            for s in self.s_values
        ]

    def to_dict(self) -> Dict[str, List[str]]:
        return {
            "p": [str(v) for v in self.p_values],
            "q": [str(v) for v in self.q_values],
            "s": [str(v) for v in self.s_values],
        }


class ScanOutcome(str, Enum):
    AGREEMENT = "agreement"
    VIOLATION = "violation"
    WITNESS = "witness"
    INCONCLUSIVE = "inconclusive"
    OPEN = "open"
    ERROR = "error"


def scan_outcome(region: RegionVerdict, verdict: ConvexityVerdict) -> ScanOutcome:
    """
    Compare a probe with the known status. A violation on a proven region is
    the alarming case; no witness at a proven-negative point is inconclusive,
    never a contradiction.
    """
    if region.status is RegionStatus.OPEN_CONVEXITY:
        return ScanOutcome.OPEN
    if region.is_proven_positive:
        return ScanOutcome.VIOLATION if verdict.violated else ScanOutcome.AGREEMENT
    return ScanOutcome.WITNESS if verdict.violated else ScanOutcome.INCONCLUSIVE


@dataclass(frozen=True)
class RegionRow:
    index: int
    params: ParamPoint
    regions: Optional[RegionPair]
    convex: Optional[ConvexityVerdict]
    concave: Optional[ConvexityVerdict]
    error: Optional[str] = None

    @property
    def outcome_convex(self) -> ScanOutcome:
        if self.error is not None:
            return ScanOutcome.ERROR
        return scan_outcome(self.regions.convexity, self.convex)

    @property
    def outcome_concave(self) -> ScanOutcome:
        if self.error is not None:
            return ScanOutcome.ERROR
        return scan_outcome(self.regions.concavity, self.concave)

    @property
    def witness_id(self) -> Optional[str]:
        if self.error is None and (self.convex.violated or self.concave.violated):
            return f"w{self.index:05d}"
        return None

    def to_dict(self, include_witness: bool = True) -> Dict[str, Any]:
        data = {
            "index": self.index,
            "params": self.params.to_dict(),
            "regions": self.regions.to_dict() if self.regions is not None else None,
            "outcome_convex": self.outcome_convex.value,
            "outcome_concave": self.outcome_concave.value,
            "witness_id": self.witness_id,
            "error": self.error,
        }
        for side, verdict in (("convex", self.convex), ("concave", self.concave)):
            data[side] = (
                verdict.to_dict(include_witness=include_witness and verdict.violated)
                if verdict is not None
                else None
            )
        return data


@dataclass(frozen=True)
class RegionReport:
    """One row per grid point, in grid order"""

    rows: Tuple[RegionRow, ...]
    config: ProbeConfig

    def __len__(self) -> int:
        return len(self.rows)

    def counts(self) -> Dict[str, int]:
        counts = {outcome.value: 0 for outcome in ScanOutcome}
        for row in self.rows:
            counts[row.outcome_convex.value] += 1
            counts[row.outcome_concave.value] += 1
        return counts

    @property
    def has_violation(self) -> bool:
        return any(
            ScanOutcome.VIOLATION in (row.outcome_convex, row.outcome_concave)
            for row in self.rows
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "counts": self.counts(),
            "rows": [row.to_dict() for row in self.rows],
        }


def _scan_point(index: int, params: ParamPoint, cfg: ProbeConfig) -> RegionRow:
    point_cfg = cfg.replace(seed=derive_seed(cfg.seed, index))
    try:
        regions = classify(params)
        convex = probe_trace_convexity(params, point_cfg, Direction.CONVEX)
        concave = probe_trace_convexity(params, point_cfg, Direction.CONCAVE)
    except Exception as e:
        logger.error(f"Scan point {index} {params.to_dict()} failed: {e}")
        return RegionRow(index, params, None, None, None, error=str(e))

    row = RegionRow(index, params, regions, convex, concave)
    outcomes = (row.outcome_convex, row.outcome_concave)
    if ScanOutcome.VIOLATION in outcomes:
        logger.warning(f"Violation inside a proven region at {params.to_dict()}")
    elif ScanOutcome.INCONCLUSIVE in outcomes:
        logger.warning(f"No witness found at proven-negative point {params.to_dict()}")
    return row


def region_scan(
    grid: GridSpec, cfg: ProbeConfig, workers: Optional[int] = None
) -> RegionReport:
    """
    Classify and probe every grid point (both directions).

    Points run in parallel; each gets its own seed derived from (seed, index),
    so the report does not depend on the worker count.
    """
    points = grid.points()
    logger.info(f"Scanning {len(points)} grid points (dim={cfg.dim}, trials={cfg.trials})")
    rows = ordered_map(
        lambda item: _scan_point(item[0], item[1], cfg), list(enumerate(points)), workers
    )
    report = RegionReport(rows=tuple(rows), config=cfg)
    logger.info(f"Scan finished: {report.counts()}")
    return report
