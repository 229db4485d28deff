"""Independent numerical cross-checks for the linking estimator.

Everything here is computed directly from the raw laboratory data, on
purpose *not* reusing the production formulas: the weighted-deviation
objective is written in correlation-coefficient form and evaluated with
numpy, minimised by an iterative dense grid search, and differentiated by
finite differences.  Sums mirroring the estimator's five auxiliary
quantities are accumulated naively (plain ``sum``) in reversed lab order.
"""

from __future__ import annotations

import numpy as np

from kclink.model import ComparisonDataset


def chi_square(dataset: ComparisonDataset, y_a, y_b):
    """Weighted sum of squared deviations at candidate measurand values.

    ``y_a`` and ``y_b`` may be scalars or broadcastable numpy arrays.
    """
    y_a = np.asarray(y_a, dtype=float)
    y_b = np.asarray(y_b, dtype=float)
    total = np.zeros(np.broadcast(y_a, y_b).shape)
    for lab in dataset.labs:
        if lab.is_linking:
            r = lab.covariance / (lab.u_a * lab.u_b)
            z_a = (y_a - lab.value_a) / lab.u_a
            z_b = (y_b - lab.value_b) / lab.u_b
            total = total + (z_a**2 - 2.0 * r * z_a * z_b + z_b**2) / (1.0 - r**2)
        elif lab.in_group_a:
            total = total + ((y_a - lab.value_a) / lab.u_a) ** 2
        else:
            total = total + ((y_b - lab.value_b) / lab.u_b) ** 2
    return total if total.shape else float(total)


def minimize_chi_square(
    dataset: ComparisonDataset,
    grid: int = 41,
    max_rounds: int = 200,
) -> tuple[float, float, float]:
    """Locate the chi-square minimum by iterative dense grid refinement.

    Returns ``(y_a, y_b, cell)`` where ``cell`` is the final grid spacing,
    i.e. the oracle's resolution.  Refinement stops once a grid step no
    longer changes the objective by more than its floating-point noise:
    around the minimum one step changes chi-square by about
    ``(cell / u)^2``, which must stay above ``eps * chi_square`` for the
    argmin to mean anything, giving a resolvable cell size of roughly
    ``8 * u * sqrt(eps * chi_square)``.  The start box generously covers
    all data.
    """
    values = [lab.value_a for lab in dataset.labs if lab.in_group_a]
    values += [lab.value_b for lab in dataset.labs if lab.in_group_b]
    u_max = max(
        max((lab.u_a for lab in dataset.labs if lab.in_group_a), default=0.0),
        max((lab.u_b for lab in dataset.labs if lab.in_group_b), default=0.0),
    )
    # the estimate's per-axis scale is bounded by the smallest reported
    # uncertainty on that axis; the soft direction of the quadratic valley
    # couples both axes, so the resolvable cell uses their norm
    u_min_a = min(lab.u_a for lab in dataset.labs if lab.in_group_a)
    u_min_b = min(lab.u_b for lab in dataset.labs if lab.in_group_b)
    u_floor = float(np.hypot(u_min_a, u_min_b))
    center_a = center_b = 0.5 * (min(values) + max(values))
    half = 0.5 * (max(values) - min(values)) + 20.0 * u_max + 1.0

    half_a = half_b = half
    eps = np.finfo(float).eps
    resolution = 2.0 * half / (grid - 1)
    for _ in range(max_rounds):
        grid_a = np.linspace(center_a - half_a, center_a + half_a, grid)
        grid_b = np.linspace(center_b - half_b, center_b + half_b, grid)
        mesh_a, mesh_b = np.meshgrid(grid_a, grid_b, indexing="ij")
        chi = chi_square(dataset, mesh_a, mesh_b)
        i, j = np.unravel_index(np.argmin(chi), chi.shape)
        center_a, center_b = float(grid_a[i]), float(grid_b[j])
        chi_min = float(chi[i, j])
        # resolution of the grid that produced the current center
        resolution = max(2.0 * half_a, 2.0 * half_b) / (grid - 1)
        if i in (0, grid - 1) or j in (0, grid - 1):
            half_a *= 3.0
            half_b *= 3.0
            continue
        noise_floor = 8.0 * u_floor * np.sqrt(eps * max(chi_min, 1.0))
        if resolution <= 10.0 * noise_floor:
            break
        half_a = 2.0 * (2.0 * half_a / (grid - 1))
        half_b = 2.0 * (2.0 * half_b / (grid - 1))
    return center_a, center_b, resolution


def covariance_from_hessian(
    dataset: ComparisonDataset, y_a: float, y_b: float
) -> np.ndarray:
    """Covariance matrix as the inverse of half the chi-square Hessian.

    The Hessian is taken by central finite differences at ``(y_a, y_b)``;
    since the objective is exactly quadratic the step size only needs to
    beat roundoff.
    """
    u_min = min(
        min((lab.u_a for lab in dataset.labs if lab.in_group_a), default=np.inf),
        min((lab.u_b for lab in dataset.labs if lab.in_group_b), default=np.inf),
    )
    h = 0.3 * u_min

    def f(da: float, db: float) -> float:
        return chi_square(dataset, y_a + da, y_b + db)

    h11 = (f(h, 0) - 2.0 * f(0, 0) + f(-h, 0)) / h**2
    h22 = (f(0, h) - 2.0 * f(0, 0) + f(0, -h)) / h**2
    h12 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h**2)
    half_hessian = 0.5 * np.array([[h11, h12], [h12, h22]])
    det = half_hessian[0, 0] * half_hessian[1, 1] - half_hessian[0, 1] ** 2
    return (
        np.array(
            [
                [half_hessian[1, 1], -half_hessian[0, 1]],
                [-half_hessian[0, 1], half_hessian[0, 0]],
            ]
        )
        / det
    )


def correlation_form_sums(
    dataset: ComparisonDataset, with_scales: bool = False
):
    """The five estimator sums written with correlation coefficients.

    Exclusive labs contribute plain inverse-variance terms; a linking lab
    with correlation r contributes terms scaled by 1/(1 - r^2).  Summation
    is naive (plain ``+``) over the labs in reversed input order.  With
    ``with_scales`` the per-sum totals of absolute single-lab
    contributions are returned as well, as the natural magnitude against
    which to compare two algebraically equal routes.
    """
    sums = [0.0] * 5
    scales = [0.0] * 5

    def add(index: int, term: float) -> None:
        sums[index] += term
        scales[index] += abs(term)

    for lab in reversed(dataset.labs):
        if lab.is_linking:
            r = lab.covariance / (lab.u_a * lab.u_b)
            k = 1.0 / (1.0 - r * r)
            add(0, k / lab.u_a**2)
            add(1, k / lab.u_b**2)
            add(2, k * r / (lab.u_a * lab.u_b))
            add(3, k * (
                lab.value_a / lab.u_a**2
                - r * lab.value_b / (lab.u_a * lab.u_b)
            ))
            add(4, k * (
                lab.value_b / lab.u_b**2
                - r * lab.value_a / (lab.u_a * lab.u_b)
            ))
        elif lab.in_group_a:
            add(0, 1.0 / lab.u_a**2)
            add(3, lab.value_a / lab.u_a**2)
        else:
            add(1, 1.0 / lab.u_b**2)
            add(4, lab.value_b / lab.u_b**2)
    if with_scales:
        return tuple(sums), tuple(scales)
    return tuple(sums)


def random_dataset(rng: np.random.Generator, max_labs: int = 8):
    """A small random comparison dataset for oracle sweeps.

    Layout counts are drawn until each standard has at least one lab and
    the total lab count lies in [2, max_labs].  Values cluster around a
    common offset (as real comparisons do), uncertainties span two orders
    of magnitude, and linking correlations stay within +/- 0.95.
    """
    from kclink.model import LabResult, validate_dataset

    while True:
        n_a = int(rng.integers(0, 4))
        n_link = int(rng.integers(0, 4))
        n_b = int(rng.integers(0, 4))
        total = n_a + n_link + n_b
        if n_a + n_link >= 1 and n_b + n_link >= 1 and 2 <= total <= max_labs:
            break
    offset_a = rng.uniform(-200.0, 200.0)
    offset_b = rng.uniform(-200.0, 200.0)

    def value(offset: float) -> float:
        return float(offset + rng.normal(0.0, 30.0))

    def uncertainty() -> float:
        return float(10.0 ** rng.uniform(-0.5, 1.5))

    labs = []
    index = 0
    for _ in range(n_a):
        index += 1
        labs.append(LabResult(f"R{index:02d}", value_a=value(offset_a),
                              u_a=uncertainty()))
    for _ in range(n_link):
        index += 1
        u_a = uncertainty()
        u_b = uncertainty()
        r = float(rng.uniform(-0.95, 0.95))
        labs.append(
            LabResult(
                f"R{index:02d}",
                value_a=value(offset_a), u_a=u_a,
                value_b=value(offset_b), u_b=u_b,
                cov_ab=r * u_a * u_b,
            )
        )
    for _ in range(n_b):
        index += 1
        labs.append(LabResult(f"R{index:02d}", value_b=value(offset_b),
                              u_b=uncertainty()))
    return validate_dataset(labs)
