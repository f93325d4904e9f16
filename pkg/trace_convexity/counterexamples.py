"""
Explicit constructions behind the non-convexity and non-concavity results.

- negative_power_counterexample: X -> X^r Y X^r is not operator convex for
  r < 1/2, r != 0 (diagonal pair, limit t -> 0).
- mid_power_counterexample: the same for 0 < r < 1 (singular pair whose
  midpoint has eigenvalues (3 +- sqrt 5)/2).
- homogeneity_refutation: (A, B) -> A^{q/2} B^p A^{q/2} is not operator
  concave for 0 < p, q <= 1, p + q <= 1 (degrees q and p + q differ).
- dilation_limit: psi with a contraction K is a limit of psi with the unitary
  dilation of K at doubled dimension.
- rank_one_reduction: the triple trace with C -> rank-one projection reduces
  to a matrix element of the sandwich map.

Constructions that the command line can replay are registered with
@expose_construction and discovered by ConstructionCatalog.
"""

import inspect
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union, get_type_hints

import numpy as np
from scipy import optimize

from .errors import ConsistencyError, DomainError
from .functionals import Exponent, ParamPoint, TripleParams, psi, triple_trace
from .linalg import (
    HermitianMatrix,
    PsdMatrix,
    RandomSpec,
    block_diag,
    make_rng,
    mat_pow,
    polar_dilation,
    power_trace,
    random_contraction,
    random_psd,
)
from .probes import Witness
from .serialization import to_jsonable

logger = logging.getLogger(__name__)

# Closed form against matrix evaluation
CLOSED_FORM_TOL = 1e-10
# Final relative gap a limit schedule must reach
LIMIT_TOL = 1e-6
# Regularizing block of the singular B^p: EPS_FACTOR * ||B^p||_2
EPS_FACTOR = 1e-10
BISECTION_BRACKET = (1e-6, 1e6)
BISECTION_MAXITER = 60
# Default homogeneity scale, relative to the refutation threshold
HOMOGENEITY_SCALE_FRACTION = 0.1
DEFAULT_LIMIT_EXPONENTS = tuple(range(2, 18, 2))
# t * 1e-10 must stay below the unit eigenvalue of P + t P^perp
RANK_ONE_EXPONENTS = (2, 4, 6, 8, 9)


@dataclass(frozen=True)
class CounterexampleResult:
    """
    Outcome of an explicit construction.

    `margin` < 0 means the inequality the construction targets fails.
    `construction_data` keeps the exact matrices and vectors used.
    """

    name: str
    margin: float
    construction_data: Dict[str, np.ndarray]
    limit_parameter: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Witness] = None
    witness_exponents: Optional[Tuple[float, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "name": self.name,
            "margin": self.margin,
            "limit_parameter": self.limit_parameter,
            "details": to_jsonable(self.details),
            "construction_data": to_jsonable(self.construction_data),
        }
        if self.witness is not None:
            data["witness"] = self.witness.to_dict()
            data["witness_exponents"] = {
                "p": self.witness_exponents[0],
                "q": self.witness_exponents[1],
            }
        return data


@dataclass(frozen=True)
class LimitStep:
    t: float
    value: float
    gap: float


@dataclass(frozen=True)
class LimitReport:
    """
    Convergence of a schedule of approximants to a target value.

    Slow convergence is reported through `converged`, not raised.
    """

    name: str
    target: float
    steps: Tuple[LimitStep, ...]
    monotone: bool
    tolerance: float = LIMIT_TOL
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def final_gap(self) -> float:
        return self.steps[-1].gap

    @property
    def converged(self) -> bool:
        return self.final_gap <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "target": self.target,
            "steps": [{"t": s.t, "value": s.value, "gap": s.gap} for s in self.steps],
            "monotone": self.monotone,
            "final_gap": self.final_gap,
            "converged": self.converged,
            "tolerance": self.tolerance,
            "details": to_jsonable(self.details),
        }


def expose_construction(name: str, aliases: Sequence[str] = ()):
    """Register a function under `name` (and `aliases`) for ConstructionCatalog discovery"""

    def decorator(func):
        setattr(func, "__construction_name__", name)
        setattr(func, "__construction_aliases__", tuple(aliases))
        return func

    return decorator


def _quadratic_form(w: np.ndarray, m: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.conj(w) @ m @ v)


def _rank_one(v: np.ndarray) -> PsdMatrix:
    v = np.asarray(v, dtype=complex)
    return PsdMatrix(np.outer(v, v.conj()))


@expose_construction("negative-power", aliases=("lemma33-neg",))
def negative_power_counterexample(r: float, t: float = 1e-6) -> CounterexampleResult:
    """
    Diagonal pair refuting operator convexity of X -> X^r Y X^r.

    X1 = 2I, X2 = t diag(2, 4), Y = |v><v| with v = (1, 1). The vector
    w = (2^r, -1) annihilates X2^r v, so pairing the convexity inequality with
    |w><w| leaves 2^{2r-1}(2^r - 1)^2 - (2^r (1+t)^r - (1+2t)^r)^2, which tends
    to (2^{2r-1} - 1)(2^r - 1)^2 < 0 as t -> 0.

    Args:
        r: Power, r < 1/2 and r != 0
        t: Scale of the second matrix, t > 0

    Returns:
        CounterexampleResult with the margin at t and the limit margin in details
    """
    r = float(r)
    t = float(t)
    if r == 0.0 or not r < 0.5:
        raise DomainError(f"r must satisfy r < 1/2 and r != 0, got {r}")
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")

    x1 = PsdMatrix(np.diag([2.0, 2.0]))
    base2 = PsdMatrix(np.diag([2.0, 4.0]))
    x2 = base2.scaled(t)
    x_mid = PsdMatrix(0.5 * (x1.entries + x2.entries))
    v = np.array([1.0, 1.0], dtype=complex)
    w = np.array([2.0**r, -1.0], dtype=complex)

    def paired(x: PsdMatrix) -> float:
        return abs(_quadratic_form(w, mat_pow(x, r).entries, v)) ** 2

    lhs = paired(x_mid)
    rhs_first = 0.5 * paired(x1)
    # t^{2r} pulled out of the second term; <w|D^r|v> vanishes analytically
    null_residual = abs(_quadratic_form(w, mat_pow(base2, r).entries, v))
    rhs_second = 0.5 * t ** (2.0 * r) * null_residual**2
    margin = rhs_first + rhs_second - lhs

    limit_lhs = paired(x1.scaled(0.5))
    limit_margin = rhs_first - limit_lhs
    closed_limit = (2.0 ** (2.0 * r - 1.0) - 1.0) * (2.0**r - 1.0) ** 2

    logger.debug(f"negative-power r={r} t={t}: margin={margin!r} limit={limit_margin!r}")
    return CounterexampleResult(
        name="negative-power",
        margin=margin,
        construction_data={
            "X1": x1.entries,
            "X2": x2.entries,
            "v": v,
            "w": w,
        },
        limit_parameter=t,
        details={
            "r": r,
            "lhs": lhs,
            "rhs_first": rhs_first,
            "rhs_second": rhs_second,
            "null_space_residual": null_residual,
            "limit_margin": limit_margin,
            "closed_form_limit": closed_limit,
        },
        witness=Witness(
            kind="operator",
            first=(x1.entries, _rank_one(v).entries),
            second=(x2.entries, _rank_one(v).entries),
            lam=0.5,
        ),
        witness_exponents=(1.0, 2.0 * r),
    )


def mid_power_closed_form(r: float) -> float:
    """<w|X^r|v> = (lambda_+^{r-1} - lambda_-^{r-1}) / sqrt 5 for X = [[2, 1], [1, 1]]"""
    root5 = math.sqrt(5.0)
    lam_plus = (3.0 + root5) / 2.0
    lam_minus = (3.0 - root5) / 2.0
    return (lam_plus ** (r - 1.0) - lam_minus ** (r - 1.0)) / root5


@expose_construction("mid-power", aliases=("lemma33-mid",))
def mid_power_counterexample(r: float) -> CounterexampleResult:
    """
    Singular pair refuting operator convexity of X -> X^r Y X^r for 0 < r < 1.

    X1 = [[2, 2], [2, 2]] and X2 = diag(2, 0) with v = (0, 1), w = (1, -1):
    X1^r w = 0 and X2^r v = 0, while <w|X^r|v> != 0 at the midpoint.

    Args:
        r: Power in (0, 1)

    Raises:
        DomainError: r outside (0, 1)
        ConsistencyError: closed form and matrix evaluation disagree
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")

    x1 = PsdMatrix(np.array([[2.0, 2.0], [2.0, 2.0]]))
    x2 = PsdMatrix(np.array([[2.0, 0.0], [0.0, 0.0]]))
    x_mid = PsdMatrix(0.5 * (x1.entries + x2.entries))
    v = np.array([0.0, 1.0], dtype=complex)
    w = np.array([1.0, -1.0], dtype=complex)

    direct = _quadratic_form(w, mat_pow(x_mid, r).entries, v).real
    closed = mid_power_closed_form(r)
    if abs(direct - closed) > CLOSED_FORM_TOL * max(1.0, abs(closed)):
        raise ConsistencyError(
            f"Closed form {closed!r} and matrix evaluation {direct!r} disagree at r={r}"
        )

    first_term = abs(_quadratic_form(w, mat_pow(x1, r).entries, v)) ** 2
    second_term = abs(_quadratic_form(w, mat_pow(x2, r).entries, v)) ** 2
    margin = 0.5 * first_term + 0.5 * second_term - direct**2

    return CounterexampleResult(
        name="mid-power",
        margin=margin,
        construction_data={"X1": x1.entries, "X2": x2.entries, "v": v, "w": w},
        details={
            "r": r,
            "eigenvalues": list(x_mid.spectrum.eigenvalues),
            "closed_form": closed,
            "direct": direct,
            "first_term": first_term,
            "second_term": second_term,
        },
        witness=Witness(
            kind="operator",
            first=(x1.entries, _rank_one(v).entries),
            second=(x2.entries, _rank_one(v).entries),
            lam=0.5,
        ),
        witness_exponents=(1.0, 2.0 * r),
    )


def _homogeneity_sides(
    a_p: np.ndarray, b: PsdMatrix, v: np.ndarray, p: float, q: float
) -> Tuple[float, float]:
    """<v|B^{q/2} A^p B^{q/2}|v> and 2^{1-p-q} <v|B|v>^{p+q}"""
    b_half = mat_pow(b, q / 2.0).entries
    left = _quadratic_form(v, b_half @ a_p @ b_half, v).real
    right = 2.0 ** (1.0 - p - q) * _quadratic_form(v, b.entries, v).real ** (p + q)
    return left, right


@expose_construction("homogeneity")
def homogeneity_refutation(
    p: float, q: float, scale: Optional[float] = None, dim: int = 2, seed: int = 0
) -> CounterexampleResult:
    """
    Scaling argument against operator concavity of (A, B) -> A^{q/2} B^p A^{q/2}.

    A has kernel vector v; concavity would force
    <v|B^{q/2} A^p B^{q/2}|v> <= 2^{1-p-q} <v|B|v>^{p+q}. The left side has
    degree q in B, the right side degree p + q, so the inequality fails for
    B scaled below the threshold (L/R)^{1/p}.

    Args:
        p: Exponent in (0, 1]
        q: Exponent in (0, 1], p + q <= 1
        scale: Factor applied to B; defaults to HOMOGENEITY_SCALE_FRACTION
            times the computed threshold
        dim: Matrix dimension, at least 2
        seed: Seed of the random A and B

    Returns:
        CounterexampleResult; margin = R(scale B) - L(scale B)
    """
    p = float(p)
    q = float(q)
    if not (0.0 < p <= 1.0 and 0.0 < q <= 1.0 and p + q <= 1.0):
        raise DomainError(f"Need 0 < p, q <= 1 and p + q <= 1, got p={p}, q={q}")
    if scale is not None and not float(scale) > 0.0:
        raise DomainError(f"scale must be positive, got {scale}")
    if dim < 2:
        raise DomainError(f"A kernel vector needs dim >= 2, got {dim}")

    rng = make_rng(seed)
    spec = RandomSpec(seed=seed, dim=dim, cond_cap=10.0)
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    projector = np.eye(dim) - np.outer(v, v.conj())
    a = PsdMatrix(projector @ random_psd(spec, rng).entries @ projector)
    b = random_psd(spec, rng)
    a_p = mat_pow(a, p).entries

    left, right = _homogeneity_sides(a_p, b, v, p, q)
    analytic_threshold = (left / right) ** (1.0 / p)

    def normalized_gap(log_c: float) -> float:
        c = math.exp(log_c)
        lc, rc = _homogeneity_sides(a_p, b.scaled(c), v, p, q)
        return (rc - lc) / c**q

    lo, hi = (math.log(x) for x in BISECTION_BRACKET)
    threshold = None
    if normalized_gap(lo) < 0.0 < normalized_gap(hi):
        root, info = optimize.bisect(
            normalized_gap, lo, hi, xtol=1e-14, maxiter=BISECTION_MAXITER,
            full_output=True, disp=False,
        )
        threshold = math.exp(root)
        logger.debug(
            f"homogeneity threshold {threshold!r} after {info.iterations} bisection steps"
        )
    else:
        logger.warning(f"Scale threshold {analytic_threshold:.3e} lies outside the bracket")

    if scale is None:
        reference = analytic_threshold if threshold is None else threshold
        scale = HOMOGENEITY_SCALE_FRACTION * reference
    scale = float(scale)
    left_scaled, right_scaled = _homogeneity_sides(a_p, b.scaled(scale), v, p, q)
    margin = right_scaled - left_scaled

    scaled_b = b.scaled(scale).entries
    return CounterexampleResult(
        name="homogeneity",
        margin=margin,
        construction_data={"A": a.entries, "B": b.entries, "v": v},
        limit_parameter=scale,
        details={
            "p": p,
            "q": q,
            "left": left_scaled,
            "right": right_scaled,
            "left_unscaled": left,
            "right_unscaled": right,
            "threshold": threshold,
            "analytic_threshold": analytic_threshold,
            "degrees": {"left": q, "right": p + q},
        },
        witness=Witness(
            kind="operator",
            first=(a.entries, scaled_b),
            second=(scaled_b, a.entries),
            lam=0.5,
        ),
        witness_exponents=(p, q),
    )


def _check_schedule(schedule: Sequence[float], increasing: bool) -> List[float]:
    schedule = [float(t) for t in schedule]
    if not schedule:
        raise DomainError("The t schedule is empty")
    if any(t <= 0.0 for t in schedule):
        raise DomainError("Schedule values must be positive")
    pairs = list(zip(schedule, schedule[1:]))
    if increasing and not (all(b > a for a, b in pairs) and schedule[-1] > 1.0):
        raise DomainError("This limit needs an increasing schedule with t -> infinity")
    if not increasing and not (all(b < a for a, b in pairs) and schedule[-1] < 1.0):
        raise DomainError("This limit needs a decreasing schedule with t -> 0")
    return schedule


def _build_report(
    name: str, target: float, values: List[Tuple[float, float]], details: Dict[str, Any]
) -> LimitReport:
    denom = max(abs(target), 1e-300)
    steps = tuple(LimitStep(t, value, abs(value - target) / denom) for t, value in values)
    slack = 1e-15
    monotone = all(b.gap <= a.gap + slack for a, b in zip(steps, steps[1:]))
    report = LimitReport(name=name, target=target, steps=steps, monotone=monotone, details=details)
    if not report.converged:
        logger.warning(
            f"{name}: final relative gap {report.final_gap:.3e} above {report.tolerance:.0e}"
        )
    return report


def dilation_limit(
    k: np.ndarray,
    a: PsdMatrix,
    b: PsdMatrix,
    params: ParamPoint,
    t_schedule: Optional[Sequence[float]] = None,
) -> LimitReport:
    """
    psi_K(A, B) as the limit of psi_U(A_t, B~) at doubled dimension.

    U is the unitary dilation of K, A_t = diag(A, t I) and B~^p = diag(B^p, eps I)
    with eps = EPS_FACTOR * ||B^p||_2 standing in for the zero block. q < 0
    needs t -> infinity, q > 0 needs t -> 0.

    Args:
        k: Contraction (rescaled when ||K||_2 > 1)
        a, b: Strictly positive matrices of the same dimension as K
        params: Exponents (p, q, s)
        t_schedule: Values of t; defaults to 1e2 ... 1e16 or their reciprocals

    Raises:
        DomainError: the schedule runs in the wrong direction for the sign of q
    """
    p, q, s = params.as_floats()
    n = a.dim
    dilation = polar_dilation(k)
    increasing = q < 0.0
    if t_schedule is None:
        t_schedule = [10.0**e if increasing else 10.0**-e for e in DEFAULT_LIMIT_EXPONENTS]
    schedule = _check_schedule(t_schedule, increasing)

    target = psi(dilation.contraction, a, b, params)
    u = dilation.unitary
    b_pow = mat_pow(b, p).entries
    eps = EPS_FACTOR * HermitianMatrix(b_pow).spectral_norm
    b_block = block_diag(b_pow, eps * np.eye(n))
    middle = u.conj().T @ b_block @ u
    a_half = mat_pow(a, q / 2.0).entries

    values = []
    for t in schedule:
        a_t_half = block_diag(a_half, t ** (q / 2.0) * np.eye(n))
        inner = HermitianMatrix(a_t_half @ middle @ a_t_half)
        values.append((t, power_trace(PsdMatrix.from_hermitian(inner), s)))

    return _build_report(
        "dilation",
        target,
        values,
        {
            "params": params.to_dict(),
            "contraction_scale": dilation.scale,
            "contraction_norm": float(np.linalg.norm(dilation.contraction, 2)),
            "regularization": eps,
        },
    )


def rank_one_reduction(
    a: PsdMatrix,
    b: PsdMatrix,
    v: np.ndarray,
    p: Exponent,
    q: Exponent,
    r: Exponent,
    t_schedule: Optional[Sequence[float]] = None,
) -> LimitReport:
    """
    Tr[A^{q/2} B^p A^{q/2} C^r] with C the projection P onto v (r > 0) or
    C = P + t P^perp, t -> infinity (r < 0), against <v|A^{q/2} B^p A^{q/2}|v>.
    """
    v = np.asarray(v, dtype=complex)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DomainError("v must be nonzero")
    v = v / norm
    triple = TripleParams(p, q, r)
    projector = np.outer(v, v.conj())
    a_half = mat_pow(a, float(q) / 2.0).entries
    target = _quadratic_form(v, a_half @ mat_pow(b, float(p)).entries @ a_half, v).real

    if float(r) > 0.0:
        schedule = [1.0] if t_schedule is None else [float(t) for t in t_schedule]
        value = triple_trace(a, b, PsdMatrix(projector), triple)
        values = [(t, value) for t in schedule]
    else:
        if t_schedule is None:
            t_schedule = [10.0**e for e in RANK_ONE_EXPONENTS]
        schedule = _check_schedule(t_schedule, increasing=True)
        complement = np.eye(a.dim) - projector
        values = [
            (t, triple_trace(a, b, PsdMatrix(projector + t * complement), triple))
            for t in schedule
        ]

    return _build_report("rank-one", target, values, {"triple": triple.to_dict()})


@expose_construction("dilation")
def sampled_dilation_limit(
    p: float, q: float, s: float, dim: int = 2, norm: float = 0.5, seed: int = 0
) -> LimitReport:
    """
    dilation_limit for a random contraction K and random A, B.

    Args:
        p: Exponent of B
        q: Exponent of A, nonzero; its sign picks the direction of t
        s: Outer power
        dim: Dimension of K, A and B
        norm: Spectral norm of K, in (0, 1]
        seed: Seed of K, A and B
    """
    spec = RandomSpec(seed=seed, dim=dim, cond_cap=10.0)
    rng = make_rng(seed)
    k = random_contraction(spec, rng, norm=norm)
    a = random_psd(spec, rng)
    b = random_psd(spec, rng)
    return dilation_limit(k, a, b, ParamPoint(p, q, s))


@expose_construction("rank-one")
def sampled_rank_one_reduction(
    p: float, q: float, r: float, dim: int = 2, seed: int = 0
) -> LimitReport:
    """
    rank_one_reduction for random A, B and a random unit vector.

    Args:
        p: Exponent of B
        q: Exponent of A
        r: Exponent of C; r < 0 takes the t -> infinity limit
        dim: Matrix dimension
        seed: Seed of A, B and v
    """
    spec = RandomSpec(seed=seed, dim=dim, cond_cap=10.0)
    rng = make_rng(seed)
    a = random_psd(spec, rng)
    b = random_psd(spec, rng)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return rank_one_reduction(a, b, v, p, q, r)


@dataclass
class Construction:
    """A replayable construction with its parameter schema"""

    name: str
    description: str
    parameters: Dict[str, Any]
    function: Callable


class ConstructionCatalog:
    """
    Constructions discovered from functions marked with @expose_construction.

    Parameter schemas come from type hints, descriptions from the docstring's
    summary and Args section.
    """

    def __init__(self, namespace: Optional[Dict[str, Any]] = None, name: str = "constructions"):
        self.name = name
        self.logger = logging.getLogger(f"{__name__}.{name}")
        self._constructions: Dict[str, Construction] = {}
        self._aliases: Dict[str, str] = {}
        self._discover(globals() if namespace is None else namespace)

    def _discover(self, namespace: Dict[str, Any]):
        for attr_name, func in sorted(namespace.items()):
            construction_name = getattr(func, "__construction_name__", None)
            if not callable(func) or construction_name is None:
                continue
            try:
                self._constructions[construction_name] = self._create(construction_name, func)
                for alias in getattr(func, "__construction_aliases__", ()):
                    self._aliases[alias] = construction_name
                self.logger.debug(f"Discovered construction: {construction_name}")
            except Exception as e:
                self.logger.warning(f"Failed to register construction {attr_name}: {e}")

    def _create(self, name: str, func: Callable) -> Construction:
        signature = inspect.signature(func)
        type_hints = get_type_hints(func)
        description, param_descriptions = self._parse_docstring(func.__doc__ or "")

        parameters = {"type": "object", "properties": {}, "required": []}
        for param_name, param in signature.parameters.items():
            schema = self._type_to_schema(type_hints.get(param_name, param.annotation))
            if param_name in param_descriptions:
                schema["description"] = param_descriptions[param_name]
            if param.default is not inspect.Parameter.empty:
                schema["default"] = param.default
            else:
                parameters["required"].append(param_name)
            parameters["properties"][param_name] = schema

        return Construction(
            name=name,
            description=description or f"Construction {name}",
            parameters=parameters,
            function=func,
        )

    @staticmethod
    def _parse_docstring(docstring: str) -> Tuple[str, Dict[str, str]]:
        """Summary line plus Google-style Args descriptions"""
        lines = [line.strip() for line in docstring.strip().split("\n")]
        summary = lines[0] if lines else ""
        param_descriptions: Dict[str, str] = {}
        in_args = False
        current = None
        for line in lines[1:]:
            lowered = line.lower()
            if lowered in ("args:", "arguments:", "parameters:"):
                in_args = True
                continue
            if lowered in ("returns:", "raises:"):
                in_args = False
                continue
            if not in_args:
                continue
            match = re.match(r"([\w, ]+?)\s*:\s*(.+)", line)
            if match:
                for param in match.group(1).split(","):
                    current = param.strip()
                    param_descriptions[current] = match.group(2)
            elif current and line:
                param_descriptions[current] += " " + line
        return summary, param_descriptions

    @staticmethod
    def _type_to_schema(annotation: Any) -> Dict[str, Any]:
        if annotation is int:
            return {"type": "integer"}
        if annotation is float:
            return {"type": "number"}
        if annotation is bool:
            return {"type": "boolean"}
        if annotation is str:
            return {"type": "string"}
        origin = getattr(annotation, "__origin__", None)
        if origin is Union:
            args = [a for a in annotation.__args__ if a is not type(None)]
            if len(args) == 1:
                return ConstructionCatalog._type_to_schema(args[0])
        return {"type": "string", "description": f"Type: {annotation}"}

    def names(self) -> List[str]:
        return sorted(self._constructions)

    def aliases(self) -> Dict[str, str]:
        return dict(sorted(self._aliases.items()))

    def get(self, name: str) -> Construction:
        name = self._aliases.get(name, name)
        if name not in self._constructions:
            raise DomainError(
                f"Unknown construction '{name}'. Valid names: {', '.join(self.names())}"
            )
        return self._constructions[name]

    def describe(self) -> List[Dict[str, Any]]:
        return [
            {
                "name": c.name,
                "aliases": sorted(a for a, target in self._aliases.items() if target == c.name),
                "description": c.description,
                "parameters": c.parameters,
            }
            for c in (self._constructions[n] for n in self.names())
        ]

    def coerce(self, name: str, arguments: Dict[str, Any]) -> Dict[str, Any]:
        """Convert raw (string) arguments with the parameter schema"""
        construction = self.get(name)
        properties = construction.parameters["properties"]
        unknown = set(arguments) - set(properties)
        if unknown:
            raise DomainError(f"Unknown parameters for {name}: {sorted(unknown)}")
        missing = [p for p in construction.parameters["required"] if p not in arguments]
        if missing:
            raise DomainError(f"Missing parameters for {name}: {missing}")

        coerced = {}
        for key, raw in arguments.items():
            kind = properties[key]["type"]
            try:
                if kind == "integer":
                    coerced[key] = int(raw)
                elif kind == "number":
                    coerced[key] = float(_parse_number(raw))
                else:
                    coerced[key] = raw
            except (TypeError, ValueError) as e:
                raise DomainError(f"Parameter {key}={raw!r} is not a valid {kind}") from e
        return coerced

    def call(self, name: str, arguments: Dict[str, Any]):
        construction = self.get(name)
        kwargs = self.coerce(name, arguments)
        self.logger.info(f"Running construction {name} with {kwargs}")
        return construction.function(**kwargs)


def _parse_number(raw: Any) -> float:
    if isinstance(raw, str) and "/" in raw:
        return float(Fraction(raw.strip()))
    return float(raw)
