"""The Killing bundle over a chart point and the machinery built on it.

A germ is a pair (xi, A) with xi a tangent vector and A a metric-skew
endomorphism; the germ of a vector field is (xi(p), -nabla xi(p)).  Germs of
Killing fields are exactly the parallel sections of the bundle connection

    D_X (xi, A) = (nabla_X xi + A X,  nabla_X A + R(X, xi)),

so three computations fall out of one construction:

* the curvature condition of D and its repeated covariant derivatives give a
  tower of linear conditions on (xi, A) -- the integrability tensors -- whose
  stabilised joint kernel bounds (and, for analytic charts, computes) the
  dimension of the isometry algebra;
* integrating D-parallelism along a path transports germs (Killing transport);
* the curvature of D evaluated on a germ is a pointwise test that the germ
  can belong to a Killing field.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metricdsl
from .curvature import (CurvatureData, OrderExhaustedError, christoffel,
                        clean_matrix, covariant_derivative, data_scale,
                        point_frame, riemann)
from .jets import JetTensor, jet_space, tensor_deriv, tensor_from_grid, tensor_product

# Letters labelling the growing condition slots in the prolongation
# recursion; a, b, c, d, z stay reserved for the bundle contractions and the
# coefficient axis.
_W_LETTERS = "efghijklmnopqrstuvwABCDEFGH"


class PreconditionError(ValueError):
    """A check was invoked on input that fails its stated precondition."""


@dataclass(frozen=True)
class KillingGerm:
    """A candidate 1-jet (xi, A) of a Killing field at a point."""

    xi: np.ndarray
    a: np.ndarray

    def so_defect(self, g):
        """Residual of the metric-skewness condition g A + (g A)^T = 0."""
        s = g @ self.a
        return float(np.abs(s + s.T).max())

    def is_so(self, g, tol=1e-9):
        scale = max(1.0, float(np.abs(g).max())) * max(1.0, float(np.abs(self.a).max()))
        return self.so_defect(g) <= tol * scale


def wedge(v_plus, v_minus, g):
    """The metric-skew endomorphism pairing two tangent vectors:
    maps u to <v_plus, u> v_minus - <v_minus, u> v_plus."""
    v_plus = np.asarray(v_plus, dtype=np.float64)
    v_minus = np.asarray(v_minus, dtype=np.float64)
    return np.outer(v_minus, g @ v_plus) - np.outer(v_plus, g @ v_minus)


def so_basis(g):
    """A basis of the metric-skew endomorphisms, enumerated by pairs r < s."""
    n = g.shape[0]
    ginv = np.linalg.inv(g)
    mats = []
    for r in range(n):
        for s in range(r + 1, n):
            skew = np.zeros((n, n))
            skew[r, s] = 1.0
            skew[s, r] = -1.0
            mats.append(ginv @ skew)
    return np.array(mats).reshape(len(mats), n, n)


def so_coordinates(a, g):
    """Coordinates of a metric-skew A in the so_basis enumeration."""
    s = g @ a
    n = g.shape[0]
    return np.array([s[r, c] for r in range(n) for c in range(r + 1, n)])


def germ_to_vector(germ, g):
    return np.concatenate([germ.xi, so_coordinates(germ.a, g)])


def vector_to_germ(vec, g):
    n = g.shape[0]
    xi = np.asarray(vec[:n], dtype=np.float64)
    a = np.einsum("k,kij->ij", vec[n:], so_basis(g))
    return KillingGerm(xi=xi, a=a)


def bundle_dim(n):
    return n * (n + 1) // 2


# -- germs of explicit fields -------------------------------------------------

def germ_of_field(spec, fld, point=None):
    """The germ (xi(p), A(p)) of a vector field, with A = -(grad xi + Gamma xi)."""
    exprs = metricdsl.parse_field(fld, spec)
    p = np.asarray(spec.base_point if point is None else point, dtype=np.float64)
    _, _, gamma, _ = point_frame(spec, p)
    space = jet_space(spec.dim, 1)
    xi = np.empty(spec.dim)
    dxi = np.empty((spec.dim, spec.dim))  # dxi[i, j] = d_j xi^i
    for i, e in enumerate(exprs):
        jet = e.eval_jet(space, p)
        xi[i] = jet.value
        dxi[i] = jet.coeffs[1:1 + spec.dim]
    a = -(dxi + np.einsum("ijk,k->ij", gamma, xi))
    return KillingGerm(xi=xi, a=a)


@dataclass
class FieldCheck:
    """Outcome of a per-point residual check of a vector field."""

    passed: bool
    max_residual: float
    tol: float
    scale: float
    point_residuals: list
    point_errors: list = field(default_factory=list)


def default_sample_points(spec, count=5, radius=0.1):
    """Deterministic sample points near the base point, for the CLI checks."""
    p = np.asarray(spec.base_point, dtype=np.float64)
    delta = radius * (1.0 + float(np.abs(p).max()))
    points = [p.copy()]
    i, sign = 0, 1.0
    while len(points) < count:
        q = p.copy()
        q[i % spec.dim] += sign * delta * (1.0 + 0.25 * (i // spec.dim))
        points.append(q)
        if sign < 0:
            i += 1
        sign = -sign
    return points


def verify_killing(spec, fld, sample_points, tol=1e-9):
    """Residuals of the metric Lie derivative along the field at sample points.

    Passes when every valid sample point has residual <= tol * (1 + |g|).
    Domain errors at individual points are recorded, not fatal.
    """
    exprs = metricdsl.parse_field(fld, spec)
    n = spec.dim
    space = jet_space(n, 1)
    residuals, errors = [], []
    g_scale = 0.0
    for p in sample_points:
        p = np.asarray(p, dtype=np.float64)
        try:
            grid = metricdsl.metric_jets(spec, p, 1)
            gval = np.array([[grid[i][j].value for j in range(n)] for i in range(n)])
            dg = np.array([[[grid[i][j].coeffs[1 + k] for j in range(n)]
                            for i in range(n)] for k in range(n)])
            xi = np.empty(n)
            dxi = np.empty((n, n))  # dxi[i, k] = d_i xi^k
            for k, e in enumerate(exprs):
                jet = e.eval_jet(space, p)
                xi[k] = jet.value
                dxi[:, k] = jet.coeffs[1:1 + n]
        except (metricdsl.SpecError, ValueError) as exc:
            errors.append((tuple(map(float, p)), str(exc)))
            continue
        lie = (np.einsum("k,kij->ij", xi, dg)
               + np.einsum("kj,ik->ij", gval, dxi)
               + np.einsum("ik,jk->ij", gval, dxi))
        residuals.append((tuple(map(float, p)), float(np.abs(lie).max())))
        g_scale = max(g_scale, float(np.abs(gval).max()))
    max_res = max((r for _, r in residuals), default=float("inf"))
    scale = 1.0 + g_scale
    passed = bool(residuals) and max_res <= tol * scale
    return FieldCheck(passed=passed, max_residual=max_res, tol=tol, scale=scale,
                      point_residuals=residuals, point_errors=errors)


def check_first_prolongation(spec, fld, sample_points, tol=1e-8):
    """For a verified Killing field, the derivative of A must cancel R(., xi).

    Refuses (PreconditionError) when the field is not Killing on the samples.
    """
    killing_check = verify_killing(spec, fld, sample_points, tol=max(tol, 1e-9))
    if not killing_check.passed:
        raise PreconditionError(
            f"field is not Killing on the sample points "
            f"(residual {killing_check.max_residual:.3g}); check refused")
    exprs = metricdsl.parse_field(fld, spec)
    n = spec.dim
    space2 = jet_space(n, 2)
    residuals, errors = [], []
    scale = 1.0
    for p in sample_points:
        p = np.asarray(p, dtype=np.float64)
        try:
            g = tensor_from_grid(metricdsl.metric_jets(spec, p, 3))
            gamma = christoffel(g)
            rvals = riemann(gamma).value()
            xi_jets = tensor_from_grid([e.eval_jet(space2, p) for e in exprs])
        except (metricdsl.SpecError, ValueError) as exc:
            errors.append((tuple(map(float, p)), str(exc)))
            continue
        dxi = tensor_deriv(xi_jets)  # [i, j]: d_j xi^i
        gamma1 = gamma.truncated(1)
        a_jets = (dxi + tensor_product("ijk,k->ij", gamma1, xi_jets.truncated(1))
                  ).scaled(-1.0)
        grad_a = covariant_derivative(a_jets, "ud", gamma1).value()  # [i, j, c]
        coupling = np.einsum("ijcd,d->ijc", rvals, xi_jets.value())
        res = grad_a + coupling
        residuals.append((tuple(map(float, p)), float(np.abs(res).max())))
        scale = max(scale, 1.0 + float(np.abs(grad_a).max()),
                    1.0 + float(np.abs(coupling).max()))
    max_res = max((r for _, r in residuals), default=float("inf"))
    passed = bool(residuals) and max_res <= tol * scale
    return FieldCheck(passed=passed, max_residual=max_res, tol=tol, scale=scale,
                      point_residuals=residuals, point_errors=errors)


# -- curvature of the bundle connection ----------------------------------------

def killing_curvature(curv, germ, i, j):
    """Endomorphism part of the bundle curvature applied to a germ, for the
    coordinate pair (i, j); the tangent part vanishes identically."""
    if len(curv.covR) < 2:
        raise OrderExhaustedError("killing_curvature needs the first covariant "
                                  "derivative of the curvature")
    r = curv.riemann
    a, xi = germ.a, germ.xi
    r_ij = r[:, :, i, j]
    nabla_xi_r = np.einsum("lkc,c->lk", curv.covR[1][:, :, i, j, :], xi)
    bracket = a @ r_ij - r_ij @ a
    r_ai = np.einsum("lka,a->lk", r[:, :, :, j], a[:, i])   # R(A e_i, e_j)
    r_aj = np.einsum("lka,a->lk", r[:, :, i, :], a[:, j])   # R(e_i, A e_j)
    return -(nabla_xi_r + bracket - r_ai - r_aj)


# -- integrability tensors -------------------------------------------------------

@dataclass(frozen=True)
class IntegrabilityTensor:
    """One level of the prolongation tower: a linear map on germs.

    ``xi_coeff`` has shape (n,)*(4+order) + (n,) and contracts xi;
    ``a_coeff`` has shape (n,)*(4+order) + (n, n), its first extra index
    pairing with the upper index of A.
    """

    order: int
    xi_coeff: np.ndarray
    a_coeff: np.ndarray

    def apply(self, xi, a):
        w = self.xi_coeff.ndim - 1
        return (np.tensordot(self.xi_coeff, xi, axes=([w], [0]))
                + np.tensordot(self.a_coeff, a, axes=([w, w + 1], [0, 1])))

    def matrix(self, basis):
        """Stack into a matrix over the germ coordinates (xi, so-basis)."""
        n = self.xi_coeff.shape[-1]
        rows = int(np.prod(self.xi_coeff.shape[:-1]))
        xi_cols = self.xi_coeff.reshape(rows, n)
        a_cols = np.einsum("wab,kab->wk", self.a_coeff.reshape(rows, n, n), basis)
        return np.hstack([xi_cols, a_cols])


def integrability_tensors(curv, m_max):
    """The prolongation tower T_0 .. T_{m_max} at the point of ``curv``.

    T_0 is the curvature condition of the bundle connection; each next level
    is its total covariant derivative with the first-order system substituted
    back in (derivatives of xi become -A, derivatives of A become the
    curvature coupling), so every level stays linear in the germ.
    """
    if curv.jet_order < m_max + 3:
        raise OrderExhaustedError(
            f"integrability tensors to order {m_max} need jet order "
            f">= {m_max + 3}; curvature data has {curv.jet_order}")
    n = curv.n
    gamma = curv.gamma_jets
    r_full = curv.riemann_jets.truncated(m_max + 1)
    eye = np.eye(n)

    # Level 0, xi-coefficient: the directional derivative of the curvature.
    p_jets = covariant_derivative(r_full, "uddd", gamma).truncated(m_max)

    # Level 0, A-coefficient: commutator action minus the two slot insertions.
    ra = r_full.truncated(m_max).array
    q_arr = (np.einsum("la,bkijC->lkijabC", eye, ra)
             - np.einsum("bk,laijC->lkijabC", eye, ra)
             - np.einsum("bi,lkajC->lkijabC", eye, ra)
             - np.einsum("bj,lkiaC->lkijabC", eye, ra))
    q_jets = JetTensor(q_arr, jet_space(n, m_max))

    tensors = []
    for m in range(m_max + 1):
        tensors.append(IntegrabilityTensor(order=m,
                                           xi_coeff=p_jets.value(),
                                           a_coeff=q_jets.value()))
        if m == m_max:
            break
        w = 4 + m
        letters = _W_LETTERS[:w]
        p_var = "u" + "d" * w
        q_var = "u" + "d" * w + "u"
        # Next xi-coefficient: derivative of the current one plus the effect
        # of substituting the curvature coupling for the derivative of A.
        dp = covariant_derivative(p_jets, p_var, gamma)   # [w.., d, z, C]
        dp_arr = np.swapaxes(dp.array, -2, -3)            # -> [w.., z, d, C]
        rq = r_full.truncated(q_jets.order - 1)
        coupling = tensor_product(f"{letters}ab,abzd->{letters}zd",
                                  q_jets, rq, q_jets.order - 1)
        p_next = JetTensor(dp_arr - coupling.array, coupling.space)
        # Next A-coefficient: derivative of the current one plus the effect
        # of substituting -A for the derivative of xi.
        dq = covariant_derivative(q_jets, q_var, gamma)   # [w.., a, b, z, coeff]
        dq_arr = np.moveaxis(dq.array, -2, -4)            # -> [w.., z, a, b, coeff]
        p_trunc = p_jets.truncated(dq.order)
        delta_term = np.einsum(f"{letters}ac,bz->{letters}zabc",
                               p_trunc.array, eye)
        q_next = JetTensor(dq_arr - delta_term, dq.space)
        p_jets, q_jets = p_next, q_next
    return tensors


# -- kernel dimension -------------------------------------------------------------

@dataclass
class KernelReport:
    """Joint-kernel trace of the integrability tower at one point."""

    point: tuple
    dims: list
    stabilized_dim: int
    stabilization_order: object  # int, or None when not stabilized
    gaps: list
    warnings: list
    tol: float
    m_max: int

    @property
    def stable(self):
        return self.stabilization_order is not None


@dataclass
class MultiPointReport:
    """Kernel traces at the base point and perturbed points; min is reported."""

    min_dim: int
    reports: list
    points: list
    warnings: list

    @property
    def stable(self):
        return all(r.stable for r in self.reports)


def _kernel_of_stack(matrix, tol):
    ncols = matrix.shape[1]
    if matrix.size == 0 or not np.any(matrix):
        return ncols, {"sigma_max": 0.0, "smallest_kept": None, "largest_cut": 0.0}
    s = np.linalg.svd(matrix, compute_uv=False)
    smax = float(s[0])
    thresh = tol * smax
    rank = int(np.sum(s > thresh))
    kept = float(s[rank - 1]) if rank else None
    cut = float(s[rank]) if rank < len(s) else 0.0
    return ncols - rank, {"sigma_max": smax, "smallest_kept": kept, "largest_cut": cut}


def _kernel_trace(spec, point, m_max, tol):
    n = spec.dim
    g0 = spec.metric_values(point)
    basis = so_basis(g0)
    dim_e = bundle_dim(n)
    dims, gaps, warnings = [], [], []
    if not spec.assumptions.analytic:
        warnings.append(
            "analytic flag absent: the computed dimension is an upper bound "
            "on the isometry-algebra dimension, not necessarily attained")
    stab_order = None
    stacked = None
    for m in range(m_max + 1):
        curv = CurvatureData.compute(spec, point, m_max=0, jet_order=m + 3)
        tensors = integrability_tensors(curv, m)
        scale = data_scale(curv, np.abs(basis).max() if basis.size else 0.0)
        stacked = clean_matrix(
            np.vstack([t.matrix(basis).reshape(-1, dim_e) for t in tensors]), scale)
        d, gap = _kernel_of_stack(stacked, tol)
        gap["order"] = m
        dims.append(d)
        gaps.append(gap)
        if m >= 1 and dims[-1] == dims[-2]:
            stab_order = m - 1
            break
    if stab_order is None:
        warnings.append(
            f"unstable: kernel dimension still changing at order m_max={m_max}; "
            "result is an upper bound only")
    if stacked is not None and np.any(stacked):
        _, s, vh = np.linalg.svd(stacked, full_matrices=False)
        rank = int(np.sum(s > tol * float(s[0])))
        kernel = vh[rank:]
    else:
        kernel = np.eye(dim_e)
    report = KernelReport(point=tuple(float(x) for x in np.atleast_1d(point)),
                          dims=dims, stabilized_dim=dims[-1],
                          stabilization_order=stab_order, gaps=gaps,
                          warnings=warnings, tol=tol, m_max=m_max)
    return report, kernel, g0


def killing_dimension(spec, point=None, m_max=10, tol=1e-8, multi_point=False):
    """Stabilised joint-kernel dimension of the integrability tower.

    With ``multi_point`` the computation also runs at five perturbed points,
    reporting the minimum (guards against non-generic base points).
    """
    p = np.asarray(spec.base_point if point is None else point, dtype=np.float64)
    if not multi_point:
        report, _, _ = _kernel_trace(spec, p, m_max, tol)
        return report
    points = [p] + _perturbed_points(p, 5)
    reports = [_kernel_trace(spec, q, m_max, tol)[0] for q in points]
    warnings = sorted({w for r in reports for w in r.warnings})
    return MultiPointReport(min_dim=min(r.stabilized_dim for r in reports),
                            reports=reports,
                            points=[tuple(map(float, q)) for q in points],
                            warnings=warnings)


def _perturbed_points(p, count):
    n = len(p)
    delta = 0.05 * (1.0 + float(np.abs(p).max()))
    points = []
    i, sign = 0, 1.0
    while len(points) < count - 1:
        q = p.copy()
        q[i % n] += sign * delta
        points.append(q)
        if sign < 0:
            i += 1
        sign = -sign
    points.append(p + delta / np.sqrt(n))
    return points


def kernel_germs(spec, point=None, m_max=10, tol=1e-8):
    """The kernel report plus germs spanning the stabilised kernel."""
    p = np.asarray(spec.base_point if point is None else point, dtype=np.float64)
    report, kernel, g0 = _kernel_trace(spec, p, m_max, tol)
    return report, [vector_to_germ(v, g0) for v in kernel]


def germ_kernel_residual(spec, germ, point=None, m_max=2, tol=1e-8):
    """Scaled residual of the tower applied to one germ (membership test)."""
    p = np.asarray(spec.base_point if point is None else point, dtype=np.float64)
    curv = CurvatureData.compute(spec, p, m_max=0, jet_order=m_max + 3)
    tensors = integrability_tensors(curv, m_max)
    germ_scale = max(1.0, float(np.abs(germ.xi).max()), float(np.abs(germ.a).max()))
    worst = 0.0
    for t in tensors:
        res = t.apply(germ.xi, germ.a)
        scale = max(1.0, float(np.abs(t.xi_coeff).max()),
                    float(np.abs(t.a_coeff).max())) * germ_scale
        worst = max(worst, float(np.abs(res).max()) / scale)
    return worst


# -- transport --------------------------------------------------------------------

def killing_transport(spec, germ, path, steps_per_segment=1000):
    """Parallel transport of a germ along a polyline for the bundle connection.

    Classical fixed-step 4th-order integration of D along each segment.
    """
    if steps_per_segment < 1:
        raise ValueError("steps_per_segment must be >= 1")
    path = [np.asarray(p, dtype=np.float64) for p in path]
    if len(path) < 2:
        raise ValueError("path needs at least two points")
    xi = np.array(germ.xi, dtype=np.float64)
    a = np.array(germ.a, dtype=np.float64)

    def rhs(frame, state, u):
        s_xi, s_a = state
        _, _, gamma, r = frame
        gu = np.einsum("iab,a->ib", gamma, u)
        d_xi = -gu @ s_xi - s_a @ u
        d_a = -gu @ s_a + s_a @ gu - np.einsum("ijcd,c,d->ij", r, u, s_xi)
        return d_xi, d_a

    for seg in range(len(path) - 1):
        x0, x1 = path[seg], path[seg + 1]
        u = x1 - x0
        h = 1.0 / steps_per_segment
        frame0 = point_frame(spec, x0)
        for k in range(steps_per_segment):
            s = k * h
            frame_mid = point_frame(spec, x0 + (s + h / 2) * u)
            frame1 = point_frame(spec, x0 + (s + h) * u)
            k1 = rhs(frame0, (xi, a), u)
            k2 = rhs(frame_mid, (xi + h / 2 * k1[0], a + h / 2 * k1[1]), u)
            k3 = rhs(frame_mid, (xi + h / 2 * k2[0], a + h / 2 * k2[1]), u)
            k4 = rhs(frame1, (xi + h * k3[0], a + h * k3[1]), u)
            xi = xi + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            a = a + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            frame0 = frame1
    return KillingGerm(xi=xi, a=a)
