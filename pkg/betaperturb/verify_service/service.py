import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError
from scipy import stats
from termcolor import colored

from ..common.ensemble_kinds import EnsembleKind
from ..common.errors import BetaPerturbError, ConditioningError, DomainError, UsageError
from ..common.models import JacobiMatrix, SpectralMeasure
from ..common.numerics import DEFAULT_MAX_ITER, DEFAULT_ROOT_TOL, poly_roots
from ..common.settings import Settings
from ..density_service.service import (
    log_base_density,
    log_density_gauss_add,
    log_density_gauss_mult,
    log_density_laguerre_add,
    log_density_laguerre_hard,
    log_density_laguerre_mult,
)
from ..ensemble_service.models import EnsembleSpec, RngStream
from ..ensemble_service.scale_laws import ExponentialLaw, ScaleLaw
from ..ensemble_service.service import bidiag_to_jacobi, sample_jacobi, sample_laguerre_beta, sample_spectral_data
from ..events import EventEmitter
from ..inverse_service.service import (
    averaged_polynomial,
    recover_spectral_data,
    recover_spectral_data_additive,
    recover_spectral_data_hard,
    sum_lambda_squared_from_config,
    weights_product_from_config,
)
from ..jacobi_service.service import char_poly_values, jacobi_to_measure, measure_to_jacobi
from ..perturb_service.dense import chiral_block_matrix, dense_additive, dense_multiplicative, quaternion_block_matrix
from ..perturb_service.models import EigenConfiguration, PerturbationKind
from ..perturb_service.service import (
    additive_charpoly,
    chiral_spectrum,
    eigenvalues_additive,
    eigenvalues_additive_from_measure,
    eigenvalues_from_measure,
    eigenvalues_multiplicative,
    multiplicative_charpoly,
    symplectic_double,
)
from .models import CheckResult, Measurement, SuiteName, TrialFailure, VerificationReport, get_suite_from_string
from .oracles import FD_STEP, ks_test, log_jacobian_closed_form, log_jacobian_fd, match_roots

logger = logging.getLogger(__name__)

CHARPOLY_POINTS = 20
CHARPOLY_TOLERANCE = 1e-10
ANGLE_SUM_TOLERANCE = 1e-9
TRACE_TOLERANCE = 1e-10
PRODUCT_TOLERANCE = 1e-8
JACOBIAN_TOLERANCE = 1e-5
RICHARDSON_TOLERANCE = 1e-2
MAX_RESAMPLES = 20
PUSHFORWARD_TOLERANCE = 1e-8
ADDITIVE_VARIANCE_LIMIT = 1e-16
ROUNDTRIP_TOLERANCE = 1e-8
REALNESS_TOLERANCE = 1e-10
CHIRAL_SQUARES_TOLERANCE = 1e-10
DENSE_TOLERANCE = 1e-8
CONJUGATION_TOLERANCE = 1e-12
MONOMIAL_ROOTS_TOLERANCE = 1e-7
# roots from monomial coefficients lose accuracy quickly with the degree
MONOMIAL_MAX_DEGREE = 8
KS_THRESHOLD = 0.01

TRACE_LAW = "trace_law"
COEFFICIENT_PREFIX = "coefficient_a"
ADDITIVE_OFFSET = "additive_offset"
TRIAL_ERRORS = "trial_errors"
FORWARD_MAP = "forward_map"


class SuiteContext(BaseModel):
    """Everything a trial needs besides its index; shipped to worker processes."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: EnsembleSpec
    law: ScaleLaw
    seed: int
    fault: bool = False
    tol: float = DEFAULT_ROOT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    @property
    def sign(self) -> float:
        """-1 when the self-test fault hook is on; the oracles then see -l."""
        return -1.0 if self.fault else 1.0


def _generator(context: SuiteContext, trial: int) -> np.random.Generator:
    return RngStream(seed=context.seed, stream=trial).generator


def _check(check: str, trial: int, error: float, limit: float, detail: Optional[str] = None) -> Measurement:
    error = float(error)
    passed = bool(math.isfinite(error) and error <= limit)
    if not passed and detail is None:
        detail = f"error {error:.3e} exceeds {limit:.1e}"
    return Measurement(check=check, trial=trial, error=error if math.isfinite(error) else 0.0, passed=passed, detail=detail)


def _sample(check: str, trial: int, value: float) -> Measurement:
    return Measurement(check=check, trial=trial, value=float(value))


def _scale(z: np.ndarray) -> float:
    return 1.0 + (float(np.max(np.abs(z))) if np.size(z) else 0.0)


def _forward_map_check(trial: int, J: JacobiMatrix, l: float, config: EigenConfiguration, context: SuiteContext) -> Measurement:
    """Dense eigenvalues of (I + i l e1 e1*) J at the scale the oracles see, against config."""
    eigenvalues = np.linalg.eigvals(dense_multiplicative(J, context.sign * l))
    reference = np.concatenate([config.z, np.zeros(config.zero_count, dtype=complex)])
    _, distance = match_roots(reference, eigenvalues)
    return _check(FORWARD_MAP, trial, distance / _scale(eigenvalues), DENSE_TOLERANCE)


def _pushforward_law(spec: EnsembleSpec, law: ScaleLaw) -> ScaleLaw:
    if spec.is_hard or not law.is_point_mass:
        return law
    return ExponentialLaw()


def pushforward_discrepancy(
    mu: SpectralMeasure,
    l: float,
    spec: EnsembleSpec,
    law: ScaleLaw,
    kind: PerturbationKind = PerturbationKind.MULTIPLICATIVE,
) -> float:
    """Signed log-discrepancy between the closed-form density and the pushed-forward base density.

    Returns log base(lambda, w, l) - log |Jacobian| - log density(z). It is
    zero for the normalized multiplicative densities and a constant for the
    additive ones.
    """
    if kind == PerturbationKind.ADDITIVE:
        config = eigenvalues_additive_from_measure(mu, l, spec)
        if spec.kind == EnsembleKind.GAUSSIAN:
            closed = log_density_gauss_add(config, law, spec.beta)
        else:
            closed = log_density_laguerre_add(config, spec.beta, spec.m, spec.n, law)
    else:
        config = eigenvalues_from_measure(mu, l, spec)
        if spec.kind == EnsembleKind.GAUSSIAN:
            closed = log_density_gauss_mult(config, law, spec.beta)
        elif spec.is_hard:
            closed = log_density_laguerre_hard(config, spec.beta, spec.m, spec.n, l)
        else:
            closed = log_density_laguerre_mult(config, spec.beta, spec.m, spec.n, law)
    base = log_base_density(mu, spec, law, l)
    jacobian = log_jacobian_closed_form(mu, l, config.z, kind)
    return base.log_value - jacobian - closed.log_value


def pushforward_check(seed: int, spec: EnsembleSpec, law: ScaleLaw, trial: int = 0) -> float:
    """|log density - (log base density - log |Jacobian|)| at the point drawn from stream (seed, trial).

    A point-mass law is replaced by Exp(1) outside the rank-deficient regime,
    since the pushforward needs l to carry a density there.
    """
    law = _pushforward_law(spec, law)
    mu, l = sample_spectral_data(spec, law, RngStream(seed=seed, stream=trial))
    return abs(pushforward_discrepancy(mu, l, spec, law))


def _charpoly_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    g = _generator(context, trial)
    J = sample_jacobi(context.spec, g)
    l = context.law.sample(g)
    radius = 1.0 + float(np.max(np.abs(J.b))) + 2.0 * (float(np.max(J.a)) if J.a.size else 0.0)
    points = radius * (g.uniform(-1.0, 1.0, CHARPOLY_POINTS) + 1j * g.uniform(-1.0, 1.0, CHARPOLY_POINTS))
    identity = np.eye(J.n)
    multiplicative = dense_multiplicative(J, context.sign * l)
    additive = dense_additive(J, context.sign * l)
    det_mult = np.array([np.linalg.det(z * identity - multiplicative) for z in points])
    det_add = np.array([np.linalg.det(z * identity - additive) for z in points])
    floor = np.abs(points) ** J.n * 1e-6

    def worst(values, reference):
        return float(np.max(np.abs(values - reference) / np.maximum(np.abs(reference), floor)))

    p, _, q, _, _ = char_poly_values(J, points)
    recurrence = (1.0 + 1j * l) * p - 1j * l * points * q
    poly = multiplicative_charpoly(J, l)
    results = [
        _check("multiplicative_identity", trial, worst(poly(points), det_mult), CHARPOLY_TOLERANCE),
        _check("recurrence", trial, worst(recurrence, det_mult), CHARPOLY_TOLERANCE),
        _check("additive_identity", trial, worst(additive_charpoly(J, l)(points), det_add), CHARPOLY_TOLERANCE),
        _check("monic", trial, abs(poly.coef[-1] - 1.0), CHARPOLY_TOLERANCE),
    ]
    if J.n <= MONOMIAL_MAX_DEGREE:
        eigenvalues = np.linalg.eigvals(multiplicative)
        _, distance = match_roots(eigenvalues, poly_roots(poly, tol=context.tol, max_iter=context.max_iter))
        results.append(_check("monomial_roots", trial, distance / _scale(eigenvalues), MONOMIAL_ROOTS_TOLERANCE))
    return results


def _configuration_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    spec = context.spec
    g = _generator(context, trial)
    J = sample_jacobi(spec, g)
    l = context.law.sample(g)
    config = eigenvalues_multiplicative(J, l, tol=context.tol, max_iter=context.max_iter)
    z = config.z
    target = math.atan(context.sign * l)
    atoms = jacobi_to_measure(J).atoms
    results = [
        _check("real_trace", trial, abs(float(np.sum(z.real)) - J.trace()), TRACE_TOLERANCE * (1.0 + float(np.sum(np.abs(J.b))))),
    ]
    if spec.is_hard:
        total = float(np.sum(np.angle(z)))
        results.append(_check("structural_zero", trial, abs(config.zero_count - 1), 0))
        results.append(_check("argument_bound", trial, max(0.0, total - target), 0.0, f"argument sum {total!r} not below {target!r}"))
        results.append(_check("upper_half_plane", trial, float(np.count_nonzero(z.imag <= 0)), 0))
        atoms = np.delete(atoms, np.argmin(np.abs(atoms)))
    elif config.zero_count == 0:
        results.append(_check("angle_sum", trial, abs(config.angle_sum() - target), ANGLE_SUM_TOLERANCE))
        upper, positive = config.upper_count(), int(np.count_nonzero(atoms > 0))
        results.append(_check("half_plane_count", trial, abs(upper - positive), 0, f"{upper} upper vs {positive} positive"))
        if spec.kind != EnsembleKind.GAUSSIAN:
            results.append(_check("upper_half_plane", trial, float(np.count_nonzero(z.imag <= 0)), 0))
    if config.zero_count == 0 or spec.is_hard:
        product = float(np.prod(atoms))
        floor = 1e-4 * float(np.prod(1.0 + np.abs(atoms)))
        results.append(_check("product_identity", trial, abs(np.prod(z).real - product) / max(abs(product), floor), PRODUCT_TOLERANCE))
    if not spec.is_hard:
        added = eigenvalues_additive(J, l, tol=context.tol, max_iter=context.max_iter)
        results.append(_check("additive_trace", trial, abs(float(np.sum(added.z.imag)) - l), TRACE_TOLERANCE * (1.0 + l)))
        results.append(_check("additive_upper", trial, max(0.0, -float(np.min(added.z.imag))), TRACE_TOLERANCE * _scale(added.z)))
    return results


def _jacobian_point(context: SuiteContext, g: np.random.Generator) -> Tuple[SpectralMeasure, float, float, int]:
    resampled = 0
    while True:
        mu, l = sample_spectral_data(context.spec, context.law, g)
        try:
            return mu, l, log_jacobian_fd(mu, l), resampled
        except ConditioningError as e:
            resampled += 1
            if resampled > MAX_RESAMPLES:
                raise
            logger.warning(f"Resampling finite-difference point: {e}")


def _jacobian_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    g = _generator(context, trial)
    mu, l, log_fd, resampled = _jacobian_point(context, g)
    config = eigenvalues_from_measure(mu, l, context.spec)
    closed = log_jacobian_closed_form(mu, l, config.z)
    halved = log_jacobian_fd(mu, l, step=FD_STEP / 2.0)
    results = [
        _check("multiplicative", trial, abs(math.expm1(log_fd - closed)), JACOBIAN_TOLERANCE),
        _check("richardson", trial, abs(math.expm1(log_fd - halved)), RICHARDSON_TOLERANCE),
    ]
    if not context.spec.is_hard:
        kind = PerturbationKind.ADDITIVE
        added = eigenvalues_additive_from_measure(mu, l, context.spec)
        log_fd_add = log_jacobian_fd(mu, l, kind=kind)
        closed_add = log_jacobian_closed_form(mu, l, added.z, kind)
        results.append(_check("additive", trial, abs(math.expm1(log_fd_add - closed_add)), JACOBIAN_TOLERANCE))
    results.append(_forward_map_check(trial, measure_to_jacobi(mu), l, config, context))
    results[0] = results[0].model_copy(update={"resampled": resampled})
    return results


def _pushforward_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    spec = context.spec
    law = _pushforward_law(spec, context.law)
    mu, l = sample_spectral_data(spec, law, _generator(context, trial))
    results = [
        _check("multiplicative", trial, abs(pushforward_discrepancy(mu, l, spec, law)), PUSHFORWARD_TOLERANCE),
        _forward_map_check(trial, measure_to_jacobi(mu), l, eigenvalues_from_measure(mu, l, spec), context),
    ]
    if not spec.is_hard:
        results.append(_sample(ADDITIVE_OFFSET, trial, pushforward_discrepancy(mu, l, spec, law, PerturbationKind.ADDITIVE)))
    return results


def _roundtrip_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    spec = context.spec
    mu, l = sample_spectral_data(spec, context.law, _generator(context, trial))
    config = eigenvalues_from_measure(mu, l, spec)
    atoms, weights, zero_weight = mu.split_zero()
    if spec.is_hard:
        recovered = recover_spectral_data_hard(config, l)
    else:
        recovered = recover_spectral_data(config)
    rec_atoms, rec_weights, rec_zero = recovered.measure.split_zero()
    order = np.argsort(atoms)
    results = [
        _check("atoms", trial, float(np.max(np.abs(rec_atoms - atoms[order]) / (1.0 + np.abs(atoms[order])))), ROUNDTRIP_TOLERANCE),
        _check("weights", trial, float(np.max(np.abs(rec_weights - weights[order]))), ROUNDTRIP_TOLERANCE),
        _check("scale", trial, abs(recovered.l - l) / l, ROUNDTRIP_TOLERANCE),
    ]
    if zero_weight is not None:
        results.append(_check("zero_weight", trial, abs(rec_zero - zero_weight), ROUNDTRIP_TOLERANCE))
    again = eigenvalues_from_measure(recovered.measure, recovered.l, spec)
    _, distance = match_roots(config.z, again.z)
    results.append(_check("forward_recover", trial, distance / _scale(config.z), ROUNDTRIP_TOLERANCE))
    results.append(_forward_map_check(trial, measure_to_jacobi(recovered.measure), recovered.l, config, context))
    if spec.kind == EnsembleKind.GAUSSIAN:
        negative, lower = int(np.count_nonzero(rec_atoms < 0)), int(np.count_nonzero(config.z.imag < 0))
        results.append(_check("sign_consistency", trial, abs(negative - lower), 0, f"{negative} negative atoms vs {lower} lower eigenvalues"))
    coefficients = averaged_polynomial(config.z).coef
    results.append(_check("realness", trial, float(np.max(np.abs(coefficients.imag))) / float(np.max(np.abs(coefficients))), REALNESS_TOLERANCE))
    if not spec.is_hard:
        squares = float(np.sum(atoms ** 2))
        results.append(_check("sum_lambda_squared", trial, abs(sum_lambda_squared_from_config(config) - squares) / (1.0 + squares), ROUNDTRIP_TOLERANCE))
    product = float(np.prod(weights))
    results.append(_check("weights_product", trial, abs(weights_product_from_config(config, atoms) / product - 1.0), ROUNDTRIP_TOLERANCE))
    if not spec.is_hard:
        added = eigenvalues_additive_from_measure(mu, l, spec)
        recovered_add = recover_spectral_data_additive(added)
        error = max(
            float(np.max(np.abs(recovered_add.atoms - atoms[order]) / (1.0 + np.abs(atoms[order])))),
            float(np.max(np.abs(recovered_add.weights - weights[order]))),
            abs(recovered_add.l - l) / l,
        )
        results.append(_check("additive", trial, error, ROUNDTRIP_TOLERANCE))
    return results


def _statistics_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    spec = context.spec
    g = _generator(context, trial)
    J = sample_jacobi(spec, g)
    l = context.law.sample(g)
    config = eigenvalues_multiplicative(J, l, tol=context.tol, max_iter=context.max_iter)
    results = [
        _sample(TRACE_LAW, trial, float(np.sum(config.z.real))),
        _forward_map_check(trial, J, l, config, context),
    ]
    if spec.kind == EnsembleKind.GAUSSIAN:
        for j, a in enumerate(J.a, start=1):
            results.append(_sample(f"{COEFFICIENT_PREFIX}{j}", trial, 2.0 * a ** 2))
    return results


def _chiral_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    spec = context.spec
    m, n = spec.m, spec.n
    g = _generator(context, trial)
    B = sample_laguerre_beta(spec.beta, m, n, g)
    J = bidiag_to_jacobi(B)
    l = context.law.sample(g)
    laguerre = EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=spec.beta, n=n, m=m)
    config = eigenvalues_multiplicative(J, l, laguerre, tol=context.tol, max_iter=context.max_iter)
    chiral = chiral_spectrum(config, m, n)
    _, distance = match_roots(np.concatenate([config.z, config.z]), chiral.z ** 2)
    results = [
        _check("count", trial, abs(chiral.total_count - (m + n)) + abs(chiral.zero_count - abs(m - n)), 0),
        _check("squares", trial, distance / _scale(config.z), CHIRAL_SQUARES_TOLERANCE),
    ]
    X = np.zeros((m, n))
    dense = B.to_dense()
    if spec.is_hard:
        X[:, : m + 1] = dense[:m, :]
    else:
        X[:n, :] = dense
    gamma = np.zeros((n, n))
    gamma[0, 0] = context.sign * l
    eigenvalues = np.linalg.eigvals(chiral_block_matrix(X, gamma))
    order = np.argsort(np.abs(eigenvalues))
    zeros, rest = eigenvalues[order[: chiral.zero_count]], eigenvalues[order[chiral.zero_count:]]
    scale = _scale(eigenvalues)
    _, distance = match_roots(chiral.z, rest)
    error = max(distance, float(np.max(np.abs(zeros))) if zeros.size else 0.0)
    results.append(_check("dense", trial, error / scale, DENSE_TOLERANCE))
    return results


def _symplectic_trial(context: SuiteContext, trial: int) -> List[Measurement]:
    g = _generator(context, trial)
    J = sample_jacobi(context.spec, g)
    l = context.law.sample(g)
    config = eigenvalues_multiplicative(J, l, context.spec, tol=context.tol, max_iter=context.max_iter)
    doubled = symplectic_double(config)
    scale = _scale(doubled.z)
    _, closure = match_roots(doubled.z, np.conj(doubled.z))
    reference = np.concatenate([doubled.z, np.zeros(doubled.zero_count, dtype=complex)])
    _, distance = match_roots(reference, np.linalg.eigvals(quaternion_block_matrix(J, context.sign * l)))
    return [
        _check("conjugation_closed", trial, closure / scale, CONJUGATION_TOLERANCE),
        _check("dense", trial, distance / scale, DENSE_TOLERANCE),
    ]


def _reference_cdf(check: str, spec: EnsembleSpec) -> Callable[[np.ndarray], np.ndarray]:
    if check == TRACE_LAW:
        if spec.kind == EnsembleKind.GAUSSIAN:
            return stats.norm(scale=math.sqrt(spec.n)).cdf
        return stats.chi2(spec.beta * spec.m * spec.n).cdf
    j = int(check[len(COEFFICIENT_PREFIX):])
    return stats.chi2(spec.beta * (spec.n - j)).cdf


def _finalize_statistics(context: SuiteContext, samples: Dict[str, List[float]]) -> List[CheckResult]:
    results = []
    for check, values in samples.items():
        try:
            ks = ks_test(values, _reference_cdf(check, context.spec))
        except DomainError as e:
            results.append(CheckResult(name=check, passed=False, evaluated=len(values), failures=[TrialFailure(detail=str(e))]))
            continue
        passed = ks.p_value > KS_THRESHOLD
        failures = [] if passed else [TrialFailure(detail=f"KS p-value {ks.p_value:.3e} not above {KS_THRESHOLD}")]
        results.append(CheckResult(
            name=check,
            passed=passed,
            worst_error=ks.statistic,
            p_value=ks.p_value,
            statistic=ks.statistic,
            evaluated=len(values),
            failures=failures,
        ))
    return results


def _finalize_pushforward(context: SuiteContext, samples: Dict[str, List[float]]) -> List[CheckResult]:
    results = []
    for check, values in samples.items():
        variance = float(np.var(values))
        passed = variance <= ADDITIVE_VARIANCE_LIMIT
        failures = [] if passed else [TrialFailure(detail=f"variance {variance:.3e} of the offsets exceeds {ADDITIVE_VARIANCE_LIMIT:.0e}")]
        results.append(CheckResult(name=check, passed=passed, worst_error=variance, statistic=variance, evaluated=len(values), failures=failures))
    return results


def _any_spec(spec: EnsembleSpec) -> bool:
    return True


class Suite(NamedTuple):
    trial: Callable[[SuiteContext, int], List[Measurement]]
    finalize: Optional[Callable[[SuiteContext, Dict[str, List[float]]], List[CheckResult]]] = None
    applies: Callable[[EnsembleSpec], bool] = _any_spec


SUITES: Dict[SuiteName, Suite] = {
    SuiteName.CHARPOLY: Suite(_charpoly_trial),
    SuiteName.CONFIGURATION: Suite(_configuration_trial),
    SuiteName.JACOBIAN: Suite(_jacobian_trial),
    SuiteName.PUSHFORWARD: Suite(_pushforward_trial, _finalize_pushforward),
    SuiteName.ROUNDTRIP: Suite(_roundtrip_trial),
    SuiteName.STATISTICS: Suite(_statistics_trial, _finalize_statistics),
    SuiteName.CHIRAL: Suite(_chiral_trial, applies=lambda spec: spec.kind != EnsembleKind.GAUSSIAN),
    SuiteName.SYMPLECTIC: Suite(_symplectic_trial, applies=lambda spec: spec.beta == 4),
}


def _run_trial(task: Tuple[SuiteName, SuiteContext, int]) -> List[Measurement]:
    name, context, trial = task
    try:
        return SUITES[name].trial(context, trial)
    except (BetaPerturbError, ValidationError) as e:
        logger.debug(f"Trial {trial} of {name.value} raised {type(e).__name__}: {e}")
        return [Measurement(check=TRIAL_ERRORS, trial=trial, passed=False, detail=f"{type(e).__name__}: {e}")]


def _aggregate(prefix: str, outcomes: Sequence[List[Measurement]]) -> Tuple[List[CheckResult], Dict[str, List[float]], int]:
    groups: Dict[str, List[Measurement]] = defaultdict(list)
    samples: Dict[str, List[float]] = defaultdict(list)
    resampled = 0
    for measurements in outcomes:
        for measurement in measurements:
            resampled += measurement.resampled
            if measurement.value is not None:
                samples[measurement.check].append(measurement.value)
            else:
                groups[measurement.check].append(measurement)
    checks = []
    for check, measurements in groups.items():
        checks.append(CheckResult(
            name=f"{prefix}.{check}",
            passed=all(m.passed for m in measurements),
            worst_error=max(m.error for m in measurements),
            evaluated=len(measurements),
            failures=[TrialFailure(trial=m.trial, detail=m.detail or "failed") for m in measurements if not m.passed],
        ))
    return checks, dict(samples), resampled


class VerificationService:
    """Runs verification suites over independent seeded trials."""

    def __init__(self, settings: Optional[Settings] = None, jobs: Optional[int] = None, events: Optional[EventEmitter] = None):
        """Initialize the service.

        Args:
            settings: Numerics and fault-hook settings, read from the environment when omitted
            jobs: Worker processes, overriding ``settings.jobs``
            events: Emitter receiving suite_started, trial_finished and suite_finished
        """
        self.settings = settings or Settings.from_env()
        self.jobs = jobs or self.settings.jobs
        self.events = events or EventEmitter()

    def _context(self, spec: EnsembleSpec, law: ScaleLaw, seed: int) -> SuiteContext:
        if self.settings.fault:
            logger.warning("Verification fault hook is enabled; oracles see a flipped sign of l")
        return SuiteContext(
            spec=spec,
            law=law,
            seed=seed,
            fault=self.settings.fault,
            tol=self.settings.root_tolerance,
            max_iter=self.settings.max_iterations,
        )

    def _outcomes(self, name: SuiteName, context: SuiteContext, trials: int) -> List[List[Measurement]]:
        tasks = [(name, context, trial) for trial in range(trials)]
        outcomes = []
        if self.jobs > 1 and trials > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                results = pool.map(_run_trial, tasks, chunksize=max(1, trials // (4 * self.jobs)))
                for trial, measurements in enumerate(results):
                    outcomes.append(measurements)
                    self.events.emit("trial_finished", name.value, trial)
        else:
            for task in tasks:
                outcomes.append(_run_trial(task))
                self.events.emit("trial_finished", name.value, task[2])
        return outcomes

    def _run_one(self, name: SuiteName, context: SuiteContext, trials: int) -> Tuple[List[CheckResult], int]:
        suite = SUITES[name]
        checks, samples, resampled = _aggregate(name.value, self._outcomes(name, context, trials))
        if suite.finalize is not None:
            for check in suite.finalize(context, samples):
                checks.append(check.model_copy(update={"name": f"{name.value}.{check.name}"}))
        if resampled:
            logger.warning(f"{name.value}: {resampled} finite-difference points resampled near the simplex boundary")
        for check in checks:
            status = colored("PASS", "green") if check.passed else colored("FAIL", "red")
            logger.info(f"{status} {check.name} worst={check.worst_error:.3e} n={check.evaluated}")
        return checks, resampled

    def run_suite(self, name, spec: EnsembleSpec, law: ScaleLaw, trials: int, seed: int) -> VerificationReport:
        """Run a verification suite.

        Trial t draws from the stream (seed, t), so the report does not depend
        on ``jobs`` or scheduling.

        Args:
            name: Suite name or SuiteName; ``all`` runs every suite that applies to spec
            spec: Ensemble under test
            law: Law of the perturbation scale
            trials: Number of independent trials
            seed: Master seed

        Returns:
            Verification report

        Raises:
            UsageError: If the suite is unknown or does not apply to spec
        """
        if not isinstance(name, SuiteName):
            name = get_suite_from_string(name)
        if trials < 1:
            raise UsageError(f"Trial count must be positive, got {trials}")
        if name == SuiteName.ALL:
            names = [suite for suite, entry in SUITES.items() if entry.applies(spec)]
        elif not SUITES[name].applies(spec):
            raise UsageError(f"Suite '{name.value}' does not apply to {spec.label} with beta={spec.beta}")
        else:
            names = [name]

        context = self._context(spec, law, seed)
        started = time.perf_counter()
        self.events.emit("suite_started", name.value, trials)
        logger.info(f"Running {name.value} on {spec.label} beta={spec.beta} n={spec.n} law={law.describe()} trials={trials} seed={seed}")
        checks: List[CheckResult] = []
        resampled = 0
        for suite in names:
            suite_checks, suite_resampled = self._run_one(suite, context, trials)
            checks.extend(suite_checks)
            resampled += suite_resampled
        report = VerificationReport(
            suite=name.value,
            ensemble=spec.label,
            law=law.describe(),
            seed=seed,
            trials=trials,
            resampled=resampled,
            checks=checks,
            wall_time=time.perf_counter() - started,
        )
        self.events.emit("suite_finished", report)
        outcome = colored("PASS", "green") if report.passed else colored("FAIL", "red")
        logger.info(f"{outcome} {name.value}: {len(checks)} checks in {report.wall_time:.2f}s")
        return report


def run_suite(name, spec: EnsembleSpec, law: ScaleLaw, trials: int, seed: int, settings: Optional[Settings] = None) -> VerificationReport:
    """Run a suite with a default service."""
    return VerificationService(settings=settings).run_suite(name, spec, law, trials, seed)
