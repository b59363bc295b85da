"""Infinitesimal holonomy at a point and parallel-vector detection.

The generators are the curvature endomorphisms and their covariant
derivatives, span-closed order by order until the dimension stops growing.
Tangent vectors annihilated by every generator are the candidates for
parallel vector fields; on an analytic, simply connected chart each candidate
extends to an actual parallel field.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import CurvatureData, OrderExhaustedError, clean_matrix, data_scale


@dataclass
class HolonomyReport:
    """Span of curvature endomorphisms at a point, order by order."""

    point: tuple
    dims: list
    dimension: int
    stabilization_order: object  # int, or None when not stabilized
    generators: np.ndarray       # (dim, n, n), orthonormal in the Frobenius sense
    candidates: np.ndarray       # (k, n) rows spanning the joint kernel
    bracket_closure_enlarges: bool
    warnings: list
    tol: float

    @property
    def stable(self):
        return self.stabilization_order is not None


def _rank_and_basis(rows, tol):
    if rows.size == 0 or not np.any(rows):
        return 0, np.zeros((0, rows.shape[1]))
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s > tol * float(s[0])))
    return rank, vh[:rank]


def infinitesimal_holonomy(curv, m_max=10, tol=1e-8):
    """Span the endomorphism values of the curvature derivatives held by ``curv``.

    Stops at the first order that adds nothing; warns when the span is still
    growing at m_max.
    """
    available = len(curv.covR) - 1
    if m_max > available:
        raise OrderExhaustedError(
            f"holonomy to order {m_max} needs covariant derivatives to that "
            f"order; curvature data holds {available}")
    n = curv.n
    scale = data_scale(curv)
    rows = np.zeros((0, n * n))
    dims = []
    stab_order = None
    iu, ju = np.triu_indices(n, k=1)
    for m in range(m_max + 1):
        arr = curv.covR[m]
        # endomorphism slots (l, k) to the back, one row per (i<j, z...)
        endos = np.moveaxis(arr, (0, 1), (-2, -1))[iu, ju]
        rows = np.vstack([rows, clean_matrix(endos.reshape(-1, n * n), scale)])
        rank, _ = _rank_and_basis(rows, tol)
        dims.append(rank)
        if m >= 1 and dims[-1] == dims[-2]:
            stab_order = m - 1
            break
    warnings = []
    if stab_order is None:
        warnings.append(
            f"unstable: holonomy span still growing at order m_max={m_max}")
    rank, basis = _rank_and_basis(rows, tol)
    generators = basis.reshape(rank, n, n)
    candidates = _joint_kernel(generators, n, tol)
    return HolonomyReport(point=tuple(map(float, curv.point)), dims=dims,
                          dimension=rank, stabilization_order=stab_order,
                          generators=generators, candidates=candidates,
                          bracket_closure_enlarges=_bracket_check(generators, rows, tol),
                          warnings=warnings, tol=tol)


def _joint_kernel(generators, n, tol):
    if len(generators) == 0:
        return np.eye(n)
    stacked = generators.reshape(-1, n)
    _, s, vh = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > tol * float(s[0]))) if s.size else 0
    return vh[rank:]


def _bracket_check(generators, rows, tol):
    """Would adding commutators of the generators enlarge the span?"""
    k = len(generators)
    if k < 2:
        return False
    n = generators.shape[1]
    base_rank, _ = _rank_and_basis(rows, tol)
    brackets = []
    for i in range(k):
        for j in range(i + 1, k):
            gi, gj = generators[i], generators[j]
            brackets.append((gi @ gj - gj @ gi).reshape(n * n))
    enlarged = np.vstack([rows, np.array(brackets)])
    new_rank, _ = _rank_and_basis(enlarged, tol)
    return bool(new_rank > base_rank)


def parallel_vector_candidates(report):
    """Rows spanning the joint kernel of the holonomy generators."""
    return report.candidates


def nullity(curv, tol=1e-8):
    """Dimension of the space of tangent vectors killed by contraction into
    the first two-form slot of the curvature."""
    n = curv.n
    mat = np.moveaxis(curv.riemann, 2, -1).reshape(-1, n)  # rows (l,k,j) x col i
    if not np.any(mat):
        return n
    s = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(s > tol * float(s[0])))
    return n - rank


@dataclass
class ParallelVerdict:
    """Outcome of the parallel-vector-field detector."""

    kind: str                   # no_parallel_field | has_parallel_field | inconclusive
    basis: np.ndarray
    holonomy: HolonomyReport
    warnings: list


def parallel_field_check(spec, point=None, m_max=10, tol=1e-8):
    """Detect parallel vector fields through the holonomy kernel.

    Downgraded to ``inconclusive`` when the span never stabilises or the
    chart lacks the analytic flag.
    """
    p = np.asarray(spec.base_point if point is None else point, dtype=np.float64)
    report = None
    for m in range(m_max + 1):
        curv = CurvatureData.compute(spec, p, m_max=m, jet_order=m + 3)
        report = infinitesimal_holonomy(curv, m_max=m, tol=tol)
        if report.stable:
            break
    warnings = list(report.warnings)
    if not spec.assumptions.analytic:
        warnings.append("analytic flag absent: infinitesimal holonomy may be "
                        "smaller than the full holonomy; verdict withheld")
    if not spec.assumptions.simply_connected:
        warnings.append("simply_connected flag absent: kernel vectors extend "
                        "only locally")
    if not report.stable or not spec.assumptions.analytic:
        kind = "inconclusive"
    elif len(report.candidates) == 0:
        kind = "no_parallel_field"
    else:
        kind = "has_parallel_field"
    return ParallelVerdict(kind=kind, basis=report.candidates,
                           holonomy=report, warnings=warnings)
