"""
Exact Dirichlet eigenpairs of rectangles and mesh-convergence studies.

:func:`convergence_study` follows one exact eigenvalue through a sequence of
structured meshes, searching a small window around it on each mesh, and
records the discrete value, its error and the observed order::

    from holofem import study

    records = study.convergence_study(n_list=(10, 20, 40, 80))
    print(study.format_records(records, "md"))

-------------------------

"""

import csv
import io
import json
import logging
import math
import time
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import progressbar

from holofem.assembly import assemble
from holofem.base import AmbiguousTargetError, InvalidArgument
from holofem.mesh import PATTERNS, UNIT_SQUARE, check_rectangle, generate_uniform_mesh
from holofem.opfun import OperatorFunction
from holofem.sim.search import search

logger = logging.getLogger(__name__)

#: window side as a fraction of the gap to the nearest other eigenvalue
WINDOW_FRACTION = 0.4

#: times an empty window is extended upward
WINDOW_EXTENSIONS = 3

FORMATS = ("csv", "md", "json")


def _check_index(value, label):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidArgument("%s must be a positive integer (got %r)" % (label, value))
    return int(value)


def exact_eigenvalue(rect: Sequence[float], m: int, n: int) -> float:
    """``π²(m²/w² + n²/ℓ²)`` for a rectangle with sides ``w`` and ``ℓ``."""
    x0, y0, x1, y1 = check_rectangle(rect)
    m = _check_index(m, "m")
    n = _check_index(n, "n")
    return math.pi**2 * (m**2 / (x1 - x0) ** 2 + n**2 / (y1 - y0) ** 2)


def exact_eigenfunction(
    rect: Sequence[float], m: int, n: int
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """The eigenfunction ``sin(mπ(x−x0)/w) sin(nπ(y−y0)/ℓ)``."""
    x0, y0, x1, y1 = check_rectangle(rect)
    m = _check_index(m, "m")
    n = _check_index(n, "n")

    def eigenfunction(x, y):
        return np.sin(m * np.pi * (np.asarray(x) - x0) / (x1 - x0)) * np.sin(
            n * np.pi * (np.asarray(y) - y0) / (y1 - y0)
        )

    return eigenfunction


def exact_spectrum(
    rect: Sequence[float], count: int = 10
) -> List[Tuple[float, int, int]]:
    """The ``count`` smallest exact eigenvalues with their indices, ascending
    (repeated values appear once per index pair)."""
    count = _check_index(count, "count")
    pairs = [
        (exact_eigenvalue(rect, m, n), m, n)
        for m in range(1, count + 1)
        for n in range(1, count + 1)
    ]
    pairs.sort()
    return pairs[:count]


def search_window(
    rect: Sequence[float], target: Tuple[int, int]
) -> Tuple[float, Tuple[float, float, float, float]]:
    """Exact target eigenvalue and the square window centered on it, with
    side :data:`WINDOW_FRACTION` of the gap to the nearest other exact
    eigenvalue."""
    m, n = target
    value = exact_eigenvalue(rect, m, n)
    span = max(m, n) + 2
    neighbours = [
        exact_eigenvalue(rect, i, j)
        for i in range(1, span + 1)
        for j in range(1, span + 1)
    ]
    gap = min(abs(other - value) for other in neighbours if not math.isclose(other, value))
    half = 0.5 * WINDOW_FRACTION * gap
    return value, (value - half, value + half, -half, half)


class ConvergenceRecord(NamedTuple):
    """One row of a convergence study; ``order`` is None in the first row."""

    n: int
    h: float
    lambda_h: float
    error: float
    order: Optional[float]


def _locate(opfun, window, n, options):
    re_min, re_max, im_min, im_max = window
    side = re_max - re_min
    for extension in range(WINDOW_EXTENSIONS + 1):
        result = search(opfun, (re_min, re_max + extension * side, im_min, im_max), options)
        if len(result):
            break
        logger.info("No eigenvalue in window for n=%d; extending upward", n)
    if len(result) != 1:
        raise AmbiguousTargetError(n, len(result))
    return result[0].value.real


def convergence_study(
    rect: Sequence[float] = UNIT_SQUARE,
    n_list: Sequence[int] = (10, 20, 40, 80),
    target: Tuple[int, int] = (1, 1),
    options: Optional[dict] = None,
    progress: bool = False,
    pattern: str = "diagonal",
) -> List[ConvergenceRecord]:
    """Track one exact eigenvalue through a sequence of uniform meshes.

    Args:
        rect: The rectangle.
        n_list: Strictly increasing grid counts.
        target: Index pair ``(m, n)`` of the exact eigenvalue.
        options: Search options (see :data:`holofem.sim.DEFAULT_OPTIONS`).
        progress: Display a progress bar.
        pattern: Cell splitting of the structured meshes (see
            :data:`holofem.mesh.PATTERNS`).

    Raises:
        InvalidArgument: for an empty or non-increasing ``n_list``
            or an unknown pattern.
        AmbiguousTargetError: if a window does not isolate one eigenvalue.
    """
    n_list = [_check_index(n, "grid count") for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InvalidArgument("grid counts must be strictly increasing (got %r)" % n_list)
    if pattern not in PATTERNS:
        raise InvalidArgument("unknown mesh pattern %r" % (pattern,))
    if any(b != 2 * a for a, b in zip(n_list, n_list[1:])):
        logger.warning("Grid counts %r are not successive doublings", n_list)
    exact, window = search_window(rect, target)

    progbar = None
    if progress:
        progbar = progressbar.ProgressBar(redirect_stdout=True, max_value=len(n_list))

    records: List[ConvergenceRecord] = []
    for count, n in enumerate(n_list, start=1):
        start = time.time()
        opfun = OperatorFunction(assemble(generate_uniform_mesh(n, rect, pattern)))
        value = _locate(opfun, window, n, options)
        h = 1.0 / n
        error = abs(value - exact)
        order = None
        if records:
            previous = records[-1]
            order = math.log(previous.error / error) / math.log(previous.h / h)
        records.append(ConvergenceRecord(n, h, value, error, order))
        logger.info(
            "n=%d: lambda_h=%.12f error=%.3e in %f sec",
            n,
            value,
            error,
            time.time() - start,
        )
        if progbar:
            progbar.update(count)
    if progbar:
        progbar.finish()
    return records


def rate_slope(records: Sequence[ConvergenceRecord]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    if len(records) < 2:
        raise InvalidArgument("need at least two records for a slope")
    h = np.log([record.h for record in records])
    error = np.log([record.error for record in records])
    return float(np.polyfit(h, error, 1)[0])


def format_records(records: Sequence[ConvergenceRecord], fmt: str = "csv") -> str:
    """Render records as ``csv`` (full precision), ``md`` (four decimals)
    or ``json``."""
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["h", "lambda_h", "error", "order"])
        for record in records:
            writer.writerow(
                [
                    repr(record.h),
                    repr(record.lambda_h),
                    repr(record.error),
                    "" if record.order is None else repr(record.order),
                ]
            )
        return out.getvalue()
    if fmt == "md":
        lines = [
            "| h | lambda_h | error | order |",
            "|---|---|---|---|",
        ]
        for record in records:
            order = "-" if record.order is None else "%.4f" % record.order
            lines.append(
                "| 1/%d | %.4f | %.4f | %s |"
                % (record.n, record.lambda_h, record.error, order)
            )
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps([record._asdict() for record in records], indent=2) + "\n"
    raise InvalidArgument("unknown format %r; choose from %s" % (fmt, ", ".join(FORMATS)))
