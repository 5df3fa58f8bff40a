"""
Spectral indicator search for the eigenvalues of ``F_h`` in a region.

The indicator of a box is the normalized mass norm of the trapezoid
approximation of ``(1/2πi) ∮ F_h(z)⁻¹ f dz`` over the box's circumscribed
circle, for a fixed random vector ``f``. It is negligible when the circle
encloses no eigenvalue and of the order of the enclosed residues otherwise.
:func:`search` subdivides every box whose indicator reaches the threshold
until boxes are smaller than the tolerance, then refines each survivor with
:func:`polish`::

    from holofem import assembly, mesh, opfun, sim

    system = assembly.assemble(mesh.generate_uniform_mesh(10))
    result = sim.search(opfun.OperatorFunction(system), (15, 25, -0.5, 0.5))
    print(result.values)

-------------------------

"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from holofem.base import (
    ContourCollisionError,
    EigenvalueProximityError,
    HolofemDict,
    InvalidArgument,
    NearSingularError,
)
from holofem.linalg.factor import factor
from holofem.opfun import DEFAULT_SEED, OperatorFunction
from holofem.sim.boxes import (
    MARGIN,
    EigenvalueEstimate,
    RegionBox,
    check_region,
    tile_region,
)

logger = logging.getLogger(__name__)

#: search defaults; ``tolerance`` None means ``relative_tolerance`` times the
#: region diameter
DEFAULT_OPTIONS = HolofemDict(
    quad_points=32,
    threshold=1e-3,
    tolerance=None,
    relative_tolerance=1e-6,
    max_depth=40,
    margin=MARGIN,
    seed=DEFAULT_SEED,
    nudge=1.07,
    max_retries=5,
    polish=True,
    workers=1,
)

#: polish stops when consecutive Rayleigh quotients agree to this
POLISH_TOL = 1e-12

#: polish iteration limit
POLISH_MAX_ITER = 50

#: largest relative residual accepted for a polished eigenpair
POLISH_MAX_RESIDUAL = 1e-8


def search_options(options: Optional[Dict] = None, **kwargs) -> HolofemDict:
    """Search options from :data:`DEFAULT_OPTIONS` updated with ``options``
    and keyword arguments; ``None`` values leave the default in place.

    Raises:
        InvalidArgument: for unknown keys or out-of-range values.
    """
    opts = HolofemDict(DEFAULT_OPTIONS.as_dict())
    for source in (options or {}, kwargs):
        for key, value in source.items():
            if key not in DEFAULT_OPTIONS:
                raise InvalidArgument("unknown search option %r" % key)
            if value is not None:
                opts[key] = value
    if opts.quad_points < 8 or opts.quad_points % 2:
        raise InvalidArgument(
            "quad_points must be an even number >= 8 (got %r)" % opts.quad_points
        )
    if opts.threshold <= 0:
        raise InvalidArgument("threshold must be positive")
    if opts.tolerance is not None and opts.tolerance <= 0:
        raise InvalidArgument("tolerance must be positive")
    if opts.relative_tolerance <= 0:
        raise InvalidArgument("relative_tolerance must be positive")
    if opts.max_depth < 0 or opts.max_retries < 0 or opts.workers < 1:
        raise InvalidArgument("max_depth, max_retries and workers out of range")
    if opts.nudge <= 1:
        raise InvalidArgument("nudge must exceed 1")
    return opts


def indicator(
    opfun: OperatorFunction,
    box: RegionBox,
    f: np.ndarray,
    q: int = 32,
    radius: Optional[float] = None,
) -> float:
    """Normalized contour-integral indicator of a box.

    Args:
        opfun: The operator function.
        box: Box whose circumscribed circle is the contour.
        f: Nonzero start vector.
        q: Number of trapezoid nodes (even, at least 8).
        radius: Contour radius; defaults to the box's.

    Raises:
        InvalidArgument: for bad ``q``, zero ``f`` or a contour around 0.
        ContourCollisionError: if a node is numerically an eigenvalue.
    """
    if q < 8 or q % 2:
        raise InvalidArgument("q must be an even number >= 8 (got %r)" % (q,))
    r = box.radius if radius is None else radius
    if abs(box.center) <= r:
        raise InvalidArgument("contour of radius %g around %r encloses 0" % (r, box.center))
    f_norm = opfun.norm_M(f)
    if not f_norm:
        raise InvalidArgument("start vector must be nonzero")

    total = np.zeros(opfun.n_dof, dtype=complex)
    for z in box.nodes(q, r):
        try:
            w = opfun.solve_resolvent(z, f)
        except EigenvalueProximityError as err:
            raise ContourCollisionError(z, box.center, r) from err
        total += (z - box.center) * w
    return opfun.norm_M(total / q) / f_norm


def evaluate_box(
    opfun: OperatorFunction, box: RegionBox, f: np.ndarray, opts: HolofemDict
) -> float:
    """Indicator of a box, enlarging the contour when a node collides with
    an eigenvalue. A box that still collides after ``opts.max_retries``
    enlargements evaluates to ``inf`` so that it survives."""
    radius = box.radius
    for _ in range(opts.max_retries + 1):
        try:
            return indicator(opfun, box, f, opts.quad_points, radius)
        except ContourCollisionError as err:
            new_radius = radius * opts.nudge
            logger.debug(
                "Contour node %r hit an eigenvalue; radius %g -> %g",
                err.z,
                radius,
                new_radius,
            )
            radius = new_radius
            if abs(box.center) <= radius:
                break
    logger.warning(
        "Contour of %r kept colliding with eigenvalues; keeping the box", box
    )
    return math.inf


class Polished(NamedTuple):
    """Result of :func:`polish`."""

    value: complex
    residual: float
    converged: bool
    iterations: int


def polish(
    opfun: OperatorFunction,
    guess: complex,
    tol: float = POLISH_TOL,
    max_iter: int = POLISH_MAX_ITER,
    seed: int = DEFAULT_SEED,
) -> Polished:
    """Refine an eigenvalue estimate by shifted inverse iteration with
    Rayleigh quotient shifts, starting at the real part of the guess.

    A shift that makes ``A − σ M`` numerically singular after the first
    step means the iteration has converged. When it does not converge the
    guess is returned with ``converged`` false, as it is when the relative
    residual of the result exceeds :data:`POLISH_MAX_RESIDUAL`.
    """
    sigma = float(np.real(guess))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(opfun.n_dof)
    v /= opfun.norm_M(v)
    value = sigma
    have_vector = False
    converged = False
    iterations = 0
    start = time.time()
    while iterations < max_iter:
        iterations += 1
        try:
            shifted = factor(opfun.A - sigma * opfun.M, "real", check_symmetry=False)
        except NearSingularError:
            if have_vector:
                converged = True
                break
            # the guess itself is an eigenvalue; step off it to find a vector
            sigma = sigma * (1 + 1e-9) if sigma else 1e-9
            continue
        y = shifted.solve(opfun.M @ v)
        v = y / opfun.norm_M(y)
        updated = opfun.rayleigh_quotient(v)
        have_vector = True
        if abs(updated - value) < tol * abs(value):
            value = updated
            converged = True
            break
        value = sigma = updated

    if not have_vector:
        logger.warning("Polish of %r found no eigenvector", guess)
        return Polished(complex(guess), math.inf, False, iterations)
    residual = opfun.pencil_residual(value, v)
    logger.debug(
        "Polished %r -> %r (residual %.2e) in %d iterations, %f sec",
        guess,
        value,
        residual,
        iterations,
        time.time() - start,
    )
    if not converged:
        logger.warning(
            "Polish of %r did not converge in %d iterations", guess, max_iter
        )
        return Polished(complex(guess), residual, False, iterations)
    if residual > POLISH_MAX_RESIDUAL:
        logger.warning(
            "Polish of %r stopped at %r with residual %.2e above %g",
            guess,
            value,
            residual,
            POLISH_MAX_RESIDUAL,
        )
        return Polished(complex(guess), residual, False, iterations)
    return Polished(complex(value, 0.0), residual, True, iterations)


class SearchResult:
    """Estimates found by :func:`search`, with any warnings and statistics.

    Iterating yields the :class:`EigenvalueEstimate` objects, sorted by
    real part.
    """

    def __init__(
        self,
        estimates: Sequence[EigenvalueEstimate],
        warnings: Sequence[HolofemDict] = (),
        stats: Optional[HolofemDict] = None,
        region: Optional[Sequence[float]] = None,
        tolerance: Optional[float] = None,
    ) -> None:
        self.estimates = list(estimates)
        self.warnings = list(warnings)
        self.stats = stats or HolofemDict()
        self.region = region
        self.tolerance = tolerance

    def __iter__(self):
        return iter(self.estimates)

    def __len__(self):
        return len(self.estimates)

    def __getitem__(self, index):
        return self.estimates[index]

    @property
    def values(self) -> List[complex]:
        return [estimate.value for estimate in self.estimates]

    def as_dict(self) -> dict:
        return HolofemDict(
            region=list(self.region) if self.region else None,
            tolerance=self.tolerance,
            estimates=[estimate.as_dict() for estimate in self.estimates],
            warnings=self.warnings,
            stats=self.stats,
        ).as_dict()

    def __repr__(self):
        return "SearchResult(%d estimates, %d warnings)" % (
            len(self.estimates),
            len(self.warnings),
        )


def _estimate(opfun, box, trace, opts) -> EigenvalueEstimate:
    if not opts.polish:
        return EigenvalueEstimate(box.center, box.radius, trace)
    polished = polish(opfun, box.center, seed=opts.seed)
    if polished.converged:
        return EigenvalueEstimate(
            polished.value, box.radius, trace, polished.residual, True
        )
    return EigenvalueEstimate(box.center, box.radius, trace, polished.residual, False)


def _deduplicate(
    estimates: List[EigenvalueEstimate], radius: float
) -> List[EigenvalueEstimate]:
    kept: List[EigenvalueEstimate] = []
    for estimate in sorted(estimates, key=lambda e: (e.value.real, e.value.imag)):
        match = next(
            (i for i, other in enumerate(kept) if abs(other.value - estimate.value) <= radius),
            None,
        )
        if match is None:
            kept.append(estimate)
        elif estimate.polish_residual < kept[match].polish_residual:
            kept[match] = estimate
    return kept


def search(
    opfun: OperatorFunction,
    region: Sequence[float],
    options: Optional[Dict] = None,
    **kwargs,
) -> SearchResult:
    """Locate the eigenvalues of ``F_h`` in a complex rectangle.

    Args:
        opfun: The operator function.
        region: ``(re_min, re_max, im_min, im_max)``; every root contour
            must exclude 0.
        options: Overrides for :data:`DEFAULT_OPTIONS`.
        **kwargs: Further overrides, applied after ``options``.

    Returns:
        A :class:`SearchResult`, estimates sorted by real part. Boxes still
        above the threshold at ``max_depth`` are reported as
        ``unresolved-cluster`` warnings.
    """
    opts = search_options(options, **kwargs)
    bounds = check_region(region)
    re_min, re_max, im_min, im_max = bounds
    diameter = math.hypot(re_max - re_min, im_max - im_min)
    tolerance = opts.tolerance or opts.relative_tolerance * diameter
    roots = tile_region(bounds, opts.margin)

    vector = np.random.default_rng(opts.seed).standard_normal(opfun.n_dof)
    stats = HolofemDict(boxes=0, levels=0)
    warnings: List[HolofemDict] = []
    candidates = []
    active = [(box, []) for box in roots]
    executor = ThreadPoolExecutor(opts.workers) if opts.workers > 1 else None
    start = time.time()
    try:
        while active:
            boxes = [box for box, _ in active]
            if executor:
                values = list(
                    executor.map(lambda b: evaluate_box(opfun, b, vector, opts), boxes)
                )
            else:
                values = [evaluate_box(opfun, box, vector, opts) for box in boxes]
            stats.boxes += len(boxes)
            stats.levels += 1
            survivors = []
            for (box, trace), value in zip(active, values):
                box.indicator = value
                trace = trace + [(box.level, value)]
                if value < opts.threshold:
                    continue
                if box.size < tolerance:
                    candidates.append((box, trace))
                elif box.level >= opts.max_depth:
                    logger.warning(
                        "Box %r still has indicator %g at depth %d",
                        box,
                        value,
                        box.level,
                    )
                    warnings.append(
                        HolofemDict(
                            kind="unresolved-cluster",
                            center=[box.center.real, box.center.imag],
                            level=box.level,
                            indicator=value,
                        )
                    )
                else:
                    survivors.extend((child, trace) for child in box.children())
            survivors.sort(key=lambda item: item[0].sort_key)
            active = survivors
    finally:
        if executor:
            executor.shutdown()

    estimates = [_estimate(opfun, box, trace, opts) for box, trace in candidates]
    estimates = [
        estimate
        for estimate in estimates
        if re_min - 2 * tolerance <= estimate.value.real <= re_max + 2 * tolerance
        and im_min - 2 * tolerance <= estimate.value.imag <= im_max + 2 * tolerance
    ]
    estimates = _deduplicate(estimates, 2 * tolerance)
    stats.candidates = len(candidates)
    stats.cache = HolofemDict(opfun.stats.as_dict())
    logger.info(
        "Search of %r: %d estimates from %d boxes in %f sec",
        bounds,
        len(estimates),
        stats.boxes,
        time.time() - start,
    )
    return SearchResult(estimates, warnings, stats, bounds, tolerance)
