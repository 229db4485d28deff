"""Minimal uncertainty inflation to restore conformity.

When a dataset fails the chi-square conformity check, a standard remedy is
to question a single suspiciously small uncertainty claim and ask: what is
the smallest uncertainty for that laboratory at which the whole dataset
passes?  This module answers that by bisecting the pass/fail boundary of
the full (re-linked) conformity test, then reporting the boundary rounded
up to a fixed number of significant digits so the published value is the
smallest conventionally reportable uncertainty that passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .linking import LinkingResult, Standard, link
from .model import ComparisonDataset, KclinkError, LabResult, validate_dataset

# Points of the pre-bisection scan used to detect a non-monotone pass/fail
# boundary (multiple sign changes of q2 - dof across the bracket).
_SCAN_POINTS = 33


class InflationError(KclinkError):
    """The requested inflation target cannot produce a passing dataset."""


@dataclass(frozen=True)
class InflationResult:
    """Outcome of the minimal-inflation search.

    ``minimal_u`` is the value to report: the smallest uncertainty with
    ``significant_digits`` significant digits at which the dataset passes.
    ``critical_u`` is the underlying pass/fail boundary located by
    bisection to the requested relative tolerance (``minimal_u`` equals
    ``critical_u`` rounded up, re-verified against the test).
    ``relinked`` is the full analysis at ``minimal_u``.
    """

    label: str
    standard: Standard
    original_u: float
    minimal_u: float
    critical_u: float
    relinked: LinkingResult
    warnings: tuple[str, ...] = ()


def _with_uncertainty(
    dataset: ComparisonDataset, label: str, standard: Standard, u: float
) -> ComparisonDataset:
    """Rebuild the dataset with one lab's uncertainty replaced.

    For a linking laboratory with a reported covariance the correlation
    coefficient is held fixed, i.e. the covariance is rescaled in
    proportion to the new uncertainty.
    """
    new_labs: list[LabResult] = []
    for lab in dataset.labs:
        if lab.label != label:
            new_labs.append(lab)
            continue
        cov = lab.cov_ab
        if standard == "A":
            if cov is not None:
                cov = cov * (u / lab.u_a)
            new_labs.append(replace(lab, u_a=u, cov_ab=cov))
        else:
            if cov is not None:
                cov = cov * (u / lab.u_b)
            new_labs.append(replace(lab, u_b=u, cov_ab=cov))
    return validate_dataset(new_labs)


def _round_up_significant(x: float, digits: int) -> float:
    """Smallest number with ``digits`` significant digits that is >= x."""
    if x <= 0.0:
        raise ValueError("expected a positive value")
    exponent = math.floor(math.log10(x))
    decimals = digits - 1 - exponent
    quantum = 10.0 ** (-decimals)
    # the tiny backoff keeps values already on the grid from being bumped up
    candidate = math.ceil(x / quantum - 1e-9) * quantum
    return round(candidate, decimals) if decimals > 0 else candidate


def _next_up_significant(x: float, digits: int) -> float:
    stepped = _round_up_significant(x, digits)
    if stepped > x:
        return stepped
    exponent = math.floor(math.log10(x))
    decimals = digits - 1 - exponent
    stepped = x + 10.0 ** (-decimals)
    return round(stepped, decimals) if decimals > 0 else stepped


def minimal_inflation(
    dataset: ComparisonDataset,
    label: str,
    standard: Standard,
    tolerance: float = 1e-4,
    *,
    significant_digits: int | None = 3,
    max_doublings: int = 16,
) -> InflationResult:
    """Find the smallest uncertainty for one lab that makes the data conform.

    The target uncertainty is bracketed by doubling until the re-linked
    dataset passes (capped at ``2**max_doublings`` times the original) and
    the boundary is then bisected until the bracket's relative width drops
    below ``tolerance``.  Before bisecting, q2 - dof is scanned across the
    bracket; if the sign changes more than once the search falls back to
    the leftmost crossing and a warning is attached.

    With ``significant_digits`` set (default 3), the reported ``minimal_u``
    is the boundary rounded up to that many significant digits and
    re-checked against the test; pass ``None`` for the raw bisection value.

    Raises :class:`InflationError` if the lab did not measure the named
    standard or no uncertainty within the cap makes the dataset pass (the
    misfit is then not attributable to this laboratory).
    """
    if standard not in ("A", "B"):
        raise InflationError(f"unknown standard {standard!r} (expected 'A' or 'B')")
    try:
        lab = dataset.lab(label)
    except KeyError:
        raise InflationError(f"unknown laboratory label: {label}") from None
    original_u = lab.u_a if standard == "A" else lab.u_b
    if original_u is None:
        raise InflationError(
            f"{label} did not measure standard {standard}"
        )
    if not 0.0 < tolerance < 1.0:
        raise InflationError("tolerance must be a relative step in (0, 1)")

    baseline = link(dataset)
    if baseline.conformity.passed:
        return InflationResult(
            label=label,
            standard=standard,
            original_u=original_u,
            minimal_u=original_u,
            critical_u=original_u,
            relinked=baseline,
        )

    def excess(u: float) -> float:
        report = link(_with_uncertainty(dataset, label, standard, u)).conformity
        return report.q2 - report.dof

    # bracket [lo, hi] with excess(lo) > 0 (failing) and excess(hi) <= 0
    lo = original_u
    hi = original_u
    for _ in range(max_doublings):
        hi = hi * 2.0
        if excess(hi) <= 0.0:
            break
    else:
        raise InflationError(
            f"no uncertainty up to 2**{max_doublings} times the original "
            f"makes the dataset pass; the misfit is not attributable to "
            f"{label} (standard {standard})"
        )

    warnings: list[str] = []
    points = [
        lo + (hi - lo) * k / (_SCAN_POINTS - 1) for k in range(_SCAN_POINTS)
    ]
    # endpoints are known: lo fails, hi passes
    passes = [False] + [excess(u) <= 0.0 for u in points[1:-1]] + [True]
    crossings = [k for k in range(1, len(passes)) if passes[k] != passes[k - 1]]
    if len(crossings) > 1:
        # more than one pass/fail transition across the bracket: narrow the
        # search to the leftmost one instead of trusting plain bisection
        warnings.append(
            "q2 is not monotone in the inflated uncertainty; using the "
            "leftmost conformity crossing"
        )
        first = crossings[0]
        lo = points[first - 1]
        hi = points[first]

    while (hi - lo) / hi > tolerance:
        mid = 0.5 * (lo + hi)
        if excess(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    critical_u = hi

    if significant_digits is None:
        minimal_u = critical_u
    else:
        minimal_u = _round_up_significant(lo, significant_digits)
        minimal_u = max(minimal_u, original_u)
        for _ in range(100):
            if excess(minimal_u) <= 0.0:
                break
            minimal_u = _next_up_significant(minimal_u, significant_digits)
        else:
            raise InflationError(
                "could not settle on a rounded passing uncertainty"
            )

    relinked = link(_with_uncertainty(dataset, label, standard, minimal_u))
    return InflationResult(
        label=label,
        standard=standard,
        original_u=original_u,
        minimal_u=minimal_u,
        critical_u=critical_u,
        relinked=relinked,
        warnings=tuple(warnings),
    )
