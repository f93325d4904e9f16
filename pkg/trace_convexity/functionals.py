"""
Trace functionals of pairs and triples of positive matrices.

    phi(A, B)      = Tr[(A^{q/2} B^p A^{q/2})^s]
    psi(K, A, B)   = Tr[(A^{q/2} K* B^p K A^{q/2})^s]
    sandwich(A, B) = A^{q/2} B^p A^{q/2}
    triple_trace   = Tr[A^{q/2} B^p A^{q/2} C^r]

plus the variational representation of Tr[X^s] and the alpha-z relative
Renyi entropy.
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConsistencyError, DomainError
from .linalg import (
    STRICT_FLOOR_FACTOR,
    HermitianMatrix,
    PsdMatrix,
    make_rng,
    mat_pow,
    power_trace,
)

logger = logging.getLogger(__name__)

Exponent = Union[float, Fraction]
ExponentTriple = Tuple[float, float, float]

# Imaginary residue allowed on a trace, relative to its modulus
IMAG_TOL = 1e-10
# Relative agreement required between the variational certificate and Tr[X^s]
CERTIFICATE_TOL = 1e-10
DEFAULT_VARIATIONAL_STEPS = 500

_INTEGER_RE = re.compile(r"[+-]?\d+")


def parse_exponent(text: str) -> Exponent:
    """
    Parse an exponent given as a decimal ("0.5") or an exact rational
    ("2/3", "-1"). Rationals and integers come back as Fraction so that
    region boundaries can be compared exactly.
    """
    raw = str(text).strip()
    try:
        if "/" in raw or _INTEGER_RE.fullmatch(raw):
            return Fraction(raw)
        value = float(raw)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Invalid exponent '{text}'") from e
    if not math.isfinite(value):
        raise DomainError(f"Exponent must be finite, got '{text}'")
    return value


def _format_exponent(value: Exponent) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


@dataclass(frozen=True)
class ParamPoint:
    """Exponent triple (p, q, s) with p, q nonzero and s > 0"""

    p: Exponent
    q: Exponent
    s: Exponent

    def __post_init__(self):
        for name in ("p", "q", "s"):
            value = getattr(self, name)
            if not math.isfinite(float(value)):
                raise DomainError(f"{name} must be finite, got {value}")
        if self.p == 0 or self.q == 0:
            raise DomainError(f"p and q must be nonzero, got p={self.p}, q={self.q}")
        if not self.s > 0:
            raise DomainError(f"s must be positive, got s={self.s}")

    @classmethod
    def parse(cls, p: str, q: str, s: str) -> "ParamPoint":
        return cls(parse_exponent(p), parse_exponent(q), parse_exponent(s))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (self.p, self.q, self.s))

    def as_floats(self) -> ExponentTriple:
        return float(self.p), float(self.q), float(self.s)

    def swapped(self) -> "ParamPoint":
        return ParamPoint(self.q, self.p, self.s)

    def to_dict(self) -> Dict[str, str]:
        return {
            "p": _format_exponent(self.p),
            "q": _format_exponent(self.q),
            "s": _format_exponent(self.s),
        }


@dataclass(frozen=True)
class TripleParams:
    """Exponents (p, q, r) of Tr[A^{q/2} B^p A^{q/2} C^r], all nonzero"""

    p: Exponent
    q: Exponent
    r: Exponent

    def __post_init__(self):
        for name in ("p", "q", "r"):
            value = getattr(self, name)
            if value == 0 or not math.isfinite(float(value)):
                raise DomainError(f"{name} must be finite and nonzero, got {value}")

    def as_floats(self) -> ExponentTriple:
        return float(self.p), float(self.q), float(self.r)

    def to_dict(self) -> Dict[str, str]:
        return {
            "p": _format_exponent(self.p),
            "q": _format_exponent(self.q),
            "r": _format_exponent(self.r),
        }


def _exponents(params: Union[ParamPoint, Sequence[float]]) -> ExponentTriple:
    if isinstance(params, ParamPoint):
        return params.as_floats()
    p, q, s = params
    return float(p), float(q), float(s)


def _check_same_dim(*matrices: HermitianMatrix) -> None:
    dims = {m.dim for m in matrices}
    if len(dims) != 1:
        raise DomainError(f"Dimension mismatch: {[m.dim for m in matrices]}")


def real_trace(m: np.ndarray) -> float:
    """Trace of a product that is real in exact arithmetic"""
    value = complex(np.trace(m))
    if abs(value.imag) > IMAG_TOL * abs(value):
        raise ConsistencyError(
            f"Trace has imaginary residue {value.imag:.3e} (real part {value.real:.6e})"
        )
    return value.real


def sandwich(a: PsdMatrix, b: PsdMatrix, p: float, q: float) -> HermitianMatrix:
    """A^{q/2} B^p A^{q/2}, re-Hermitized"""
    _check_same_dim(a, b)
    a_half = mat_pow(a, float(q) / 2.0).entries
    b_pow = mat_pow(b, float(p)).entries
    return HermitianMatrix(a_half @ b_pow @ a_half)


def phi(a: PsdMatrix, b: PsdMatrix, params: Union[ParamPoint, Sequence[float]]) -> float:
    """Tr[(A^{q/2} B^p A^{q/2})^s]"""
    p, q, s = _exponents(params)
    inner = PsdMatrix.from_hermitian(sandwich(a, b, p, q))
    return power_trace(inner, s)


def psi(
    k: np.ndarray,
    a: PsdMatrix,
    b: PsdMatrix,
    params: Union[ParamPoint, Sequence[float]],
) -> float:
    """
    Tr[(A^{q/2} K* B^p K A^{q/2})^s].

    `params` may be a plain (p, q, s) tuple so that the sign-flipped triple
    (-p, -q, -s) can be evaluated. K = I takes the phi path and agrees
    with it bit for bit.
    """
    _check_same_dim(a, b)
    k = np.asarray(k, dtype=complex)
    if k.shape != (a.dim, a.dim):
        raise DomainError(f"K has shape {k.shape}, expected {(a.dim, a.dim)}")
    if np.array_equal(k, np.eye(a.dim)):
        return phi(a, b, params)

    p, q, s = _exponents(params)
    a_half = mat_pow(a, q / 2.0).entries
    b_pow = mat_pow(b, p).entries
    inner = HermitianMatrix(a_half @ k.conj().T @ b_pow @ k @ a_half)
    return power_trace(PsdMatrix.from_hermitian(inner), s)


def psi_sign_flipped(
    k: np.ndarray, a: PsdMatrix, b: PsdMatrix, params: Union[ParamPoint, Sequence[float]]
) -> float:
    """psi((K*)^{-1}, A, B, (-p, -q, -s)), equal to psi(K, A, B, (p, q, s))"""
    k = np.asarray(k, dtype=complex)
    p, q, s = _exponents(params)
    try:
        k_dual = np.linalg.inv(k.conj().T)
    except np.linalg.LinAlgError as e:
        raise DomainError("K must be invertible for the sign-flipped form") from e
    return psi(k_dual, a, b, (-p, -q, -s))


def triple_trace(a: PsdMatrix, b: PsdMatrix, c: PsdMatrix, t: TripleParams) -> float:
    """Tr[A^{q/2} B^p A^{q/2} C^r]"""
    _check_same_dim(a, b, c)
    p, q, r = t.as_floats()
    a_half = mat_pow(a, q / 2.0).entries
    product = a_half @ mat_pow(b, p).entries @ a_half @ mat_pow(c, r).entries
    return real_trace(product)


class VariationalMode(str, Enum):
    """sup for s > 1, inf for 0 < s < 1"""

    SUP = "sup"
    INF = "inf"


@dataclass(frozen=True)
class VariationalResult:
    """
    Analytic certificate Z* = X^s together with an iterative search.

    `value` is s times the objective at Z*, which must reproduce
    `trace_power` = Tr[X^s]. The search runs projected gradient steps
    from a perturbed start and must never beat the certificate.
    """

    mode: VariationalMode
    value: float
    optimizer: PsdMatrix
    trace_power: float
    search_value: float
    search_optimizer: PsdMatrix
    steps_run: int

    @property
    def certificate_gap(self) -> float:
        return abs(self.value - self.trace_power) / abs(self.trace_power)

    @property
    def search_excess(self) -> float:
        """Relative amount by which the search beat the certificate (<= 0 expected)"""
        if self.mode is VariationalMode.SUP:
            return (self.search_value - self.value) / abs(self.value)
        return (self.value - self.search_value) / abs(self.value)


def _check_variational_mode(s: float, mode: VariationalMode) -> None:
    if mode is VariationalMode.SUP and not s > 1.0:
        raise DomainError(f"The supremum formula needs s > 1, got s={s}")
    if mode is VariationalMode.INF and not 0.0 < s < 1.0:
        raise DomainError(f"The infimum formula needs 0 < s < 1, got s={s}")


def variational_objective(x: PsdMatrix, z: PsdMatrix, s: float) -> float:
    """s * (Tr[X Z^{1-1/s}] + (1/s - 1) Tr[Z])"""
    _check_same_dim(x, z)
    z_pow = mat_pow(z, 1.0 - 1.0 / s).entries
    return s * (real_trace(x.entries @ z_pow) + (1.0 / s - 1.0) * z.trace())


def _power_derivative_kernel(mu: np.ndarray, a: float) -> np.ndarray:
    """Divided differences of t -> t^a on the eigenvalues mu"""
    mi = mu[:, None]
    mj = mu[None, :]
    diff = mi - mj
    powered = mu**a
    close = np.abs(diff) <= 1e-12 * np.maximum(np.abs(mi), np.abs(mj))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(
            close,
            a * (0.5 * (mi + mj)) ** (a - 1.0),
            (powered[:, None] - powered[None, :]) / diff,
        )


def _objective_gradient(x: PsdMatrix, z: PsdMatrix, s: float) -> np.ndarray:
    a = 1.0 - 1.0 / s
    spectrum = z.spectrum
    v = spectrum.eigenvectors
    kernel = _power_derivative_kernel(spectrum.eigenvalues, a)
    grad = v @ (kernel * (v.conj().T @ x.entries @ v)) @ v.conj().T
    return s * (grad + (1.0 / s - 1.0) * np.eye(x.dim))


def _project(z: np.ndarray) -> PsdMatrix:
    h = HermitianMatrix(z)
    lam = h.spectrum.eigenvalues
    floor = STRICT_FLOOR_FACTOR * max(abs(lam[0]), abs(lam[-1]), 1e-300)
    return PsdMatrix.from_spectrum(np.maximum(lam, floor), h.spectrum.eigenvectors)


def trace_power_variational(
    x: PsdMatrix,
    s: float,
    mode: Union[VariationalMode, str],
    steps: int = DEFAULT_VARIATIONAL_STEPS,
    seed: int = 0,
) -> VariationalResult:
    """
    Tr[X^s] as s*sup (s > 1) or s*inf (0 < s < 1) over Z of
    Tr[X Z^{1-1/s}] + (1/s - 1) Tr[Z].

    Args:
        x: Strictly positive matrix
        s: Power, matching the mode
        mode: "sup" or "inf"
        steps: Projected gradient steps of the iterative search. The step starts
            at 1/||X||_2, grows by 1.2 after an accepted step and halves after
            a rejected one
        seed: Seed of the perturbation applied to the search's start

    Returns:
        VariationalResult with the certificate and the search outcome

    Raises:
        DomainError: mode/s mismatch or singular X
        ConsistencyError: the certificate does not reproduce Tr[X^s]
    """
    mode = VariationalMode(mode)
    s = float(s)
    _check_variational_mode(s, mode)
    if not x.is_strict:
        raise DomainError(f"X must be strictly positive, smallest eigenvalue {x.min_eig:.3e}")

    target = power_trace(x, s)
    optimizer = PsdMatrix.from_hermitian(mat_pow(x, s))
    value = variational_objective(x, optimizer, s)
    if abs(value - target) > CERTIFICATE_TOL * abs(target):
        raise ConsistencyError(
            f"Certificate value {value!r} does not reproduce Tr[X^s] = {target!r}"
        )

    # Search: start away from the optimizer, accept improving steps only
    rng = make_rng(seed)
    noise = rng.standard_normal((x.dim, x.dim)) + 1j * rng.standard_normal((x.dim, x.dim))
    noise = 0.5 * (noise + noise.conj().T)
    noise *= 0.25 * optimizer.spectral_norm / max(np.linalg.norm(noise, 2), 1e-300)
    z = _project(optimizer.entries + noise)
    current = variational_objective(x, z, s)

    direction = 1.0 if mode is VariationalMode.SUP else -1.0
    step = 1.0 / max(x.spectral_norm, 1e-12)
    steps_run = 0
    for steps_run in range(1, steps + 1):
        grad = _objective_gradient(x, z, s)
        candidate = _project(z.entries + direction * step * grad)
        trial = variational_objective(x, candidate, s)
        if direction * (trial - current) > 0.0:
            z, current = candidate, trial
            step *= 1.2
        else:
            step *= 0.5
        if step < 1e-14 / max(x.spectral_norm, 1e-12):
            break

    logger.debug(
        f"Variational search ({mode.value}, s={s}) finished after {steps_run} steps: "
        f"certificate={value!r} search={current!r}"
    )
    return VariationalResult(
        mode=mode,
        value=value,
        optimizer=optimizer,
        trace_power=target,
        search_value=current,
        search_optimizer=z,
        steps_run=steps_run,
    )


def renyi_alpha_z(rho: PsdMatrix, sigma: PsdMatrix, alpha: float, z: float) -> float:
    """
    alpha-z relative Renyi entropy

        D = ln( Tr[(sigma^{(1-a)/2z} rho^{a/z} sigma^{(1-a)/2z})^z] / Tr rho ) / (a - 1)

    Inputs need not be trace-normalized; Tr rho stays in the denominator.
    """
    alpha = float(alpha)
    z = float(z)
    if not alpha > 0.0 or alpha == 1.0:
        raise DomainError(f"alpha must be positive and different from 1, got {alpha}")
    if not z > 0.0:
        raise DomainError(f"z must be positive, got {z}")
    _check_same_dim(rho, sigma)
    for name, m in (("rho", rho), ("sigma", sigma)):
        if not m.is_strict:
            raise DomainError(f"{name} is singular: smallest eigenvalue {m.min_eig:.3e}")

    quasi = renyi_quasi_entropy(rho, sigma, alpha, z)
    return math.log(quasi / rho.trace()) / (alpha - 1.0)


def renyi_quasi_entropy(
    rho: PsdMatrix, sigma: PsdMatrix, alpha: float, z: Optional[float] = None
) -> float:
    """
    Tr[(sigma^{(1-a)/2z} rho^{a/z} sigma^{(1-a)/2z})^z]; z defaults to alpha/2.

    At z = alpha/2 this is phi(sigma, rho) with (p, q, s) = (2, 2(1-a)/a, a/2).
    """
    alpha = float(alpha)
    z = alpha / 2.0 if z is None else float(z)
    sigma_half = mat_pow(sigma, (1.0 - alpha) / (2.0 * z)).entries
    inner = HermitianMatrix(sigma_half @ mat_pow(rho, alpha / z).entries @ sigma_half)
    return power_trace(PsdMatrix.from_hermitian(inner), z)
