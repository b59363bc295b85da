"""Curvature at a point: Christoffel symbols, the curvature tensor, and its
covariant derivatives, computed as jets of the metric components.

Index conventions, fixed once for the whole project:

* ``gamma[k, i, j]`` is the connection coefficient with upper index k,
  symmetric in (i, j);
* ``riemann[l, k, i, j]`` is the component of the endomorphism produced by the
  coordinate pair (i, j) acting on the k-th basis vector: the commutator of
  covariant derivatives along i and j applied to d_k gives
  ``riemann[l, k, i, j]`` times d_l.  The two-form slots (i, j) come last.
* Covariant-derivative indices are appended after the tensor's own slots, so
  ``covR[m]`` has shape (n,)*(4+m) with layout [l, k, i, j, z_1, ..., z_m],
  z_m being the outermost derivative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metricdsl
from .jets import JetTensor, tensor_deriv, tensor_from_grid, tensor_product


class OrderExhaustedError(ValueError):
    """Jet order too low for the requested derivative depth; increase it."""


_VAR_LETTERS = "abcdefghijklmnopqrstuvwxy"

# Entries this far below the curvature scale are floating-point residue of
# exact cancellations; rank decisions zero them first so a mathematically
# zero matrix cannot seed its own (junk) sigma_max.
ROUNDOFF_CLEAN = 1e-12


def clean_matrix(matrix, scale):
    floor = ROUNDOFF_CLEAN * max(1.0, scale) ** 2
    return np.where(np.abs(matrix) <= floor, 0.0, matrix)


def data_scale(curv, *extra):
    """Magnitude of the raw curvature inputs, the reference for rank floors."""
    vals = [1.0, float(np.abs(curv.g).max()), float(np.abs(curv.ginv).max()),
            float(np.abs(curv.gamma_jets.value()).max()),
            float(np.abs(curv.riemann).max())]
    vals.extend(float(x) for x in extra)
    return max(vals)


def _as_tensor(grid):
    return grid if isinstance(grid, JetTensor) else tensor_from_grid(grid)


def inverse_metric(g):
    """Jets of the inverse metric, via a truncated Neumann series.

    Writing g = g0 (I + E) with E carrying no constant term, E is nilpotent in
    the jet algebra, so the series for (I + E)^{-1} terminates at the order.
    """
    g = _as_tensor(g)
    n = g.shape[0]
    g0inv = np.linalg.inv(g.value())
    em = np.einsum("ia,abc->ibc", g0inv, g.array)
    em[..., 0] -= np.eye(n)
    e = JetTensor(-em, g.space)  # -E
    acc = e
    term = e
    for _ in range(g.order - 1):
        term = tensor_product("ia,ab->ib", e, term)
        acc = acc + term
    total = acc.array.copy()
    total[..., 0] += np.eye(n)
    return JetTensor(np.einsum("iac,ab->ibc", total, g0inv), g.space)


def christoffel(metric_jets, inverse_jets=None):
    """Connection coefficients as jets of one order less than the metric."""
    g = _as_tensor(metric_jets)
    if g.order < 1:
        raise OrderExhaustedError("christoffel needs metric jets of order >= 1")
    ginv = inverse_metric(g) if inverse_jets is None else _as_tensor(inverse_jets)
    dg = tensor_deriv(g)  # dg[i, j, c] = d_c g_ij
    a = dg.array
    # sym[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    sym = JetTensor(np.einsum("jlic->lijc", a)
                    + np.einsum("iljc->lijc", a)
                    - np.einsum("ijlc->lijc", a), dg.space)
    return tensor_product("kl,lij->kij", ginv.truncated(dg.order), sym).scaled(0.5)


def riemann(gamma):
    """Curvature jets from connection jets, one further order down."""
    gamma = _as_tensor(gamma)
    if gamma.order < 1:
        raise OrderExhaustedError("riemann needs connection jets of order >= 1")
    dg = tensor_deriv(gamma)  # dg[l, j, k, i] = d_i gamma[l, j, k]
    a = dg.array
    d_term = np.einsum("ljkic->lkijc", a) - np.einsum("likjc->lkijc", a)
    gl = gamma.truncated(dg.order)
    quad = tensor_product("lim,mjk->lkij", gl, gl)
    quad2 = tensor_product("ljm,mik->lkij", gl, gl)
    return JetTensor(d_term + quad.array - quad2.array, dg.space)


def covariant_derivative(tensor, variance, gamma):
    """Covariant derivative of a jet tensor; appends the derivative slot last.

    ``variance`` marks each component axis 'u' (upper) or 'd' (lower).
    """
    t = _as_tensor(tensor)
    if t.order < 1:
        raise OrderExhaustedError("covariant derivative needs jets of order >= 1")
    rank = len(variance)
    if rank != len(t.shape):
        raise ValueError(f"variance {variance!r} does not match rank {len(t.shape)}")
    out = tensor_deriv(t)  # [..., z, coeff]
    q = out.order
    gl = gamma.truncated(min(gamma.order, q))
    letters = _VAR_LETTERS[:rank]
    t_trunc = t.truncated(q)
    for s, v in enumerate(variance):
        slot = letters[s]
        contracted = letters[:s] + "A" + letters[s + 1:]
        out_sub = letters + "Z"
        if v == "u":
            term = tensor_product(f"{slot}ZA,{contracted}->{out_sub}", gl, t_trunc, q)
            out = out + term
        else:
            term = tensor_product(f"AZ{slot},{contracted}->{out_sub}", gl, t_trunc, q)
            out = out - term
    return out


def covariant_derivatives_of_riemann(riemann_jets, gamma, m_max):
    """Values of the m-th covariant derivatives of the curvature, m <= m_max.

    Returns (values, jets); jets[m] keeps order riemann.order - m for reuse.
    """
    r = _as_tensor(riemann_jets)
    if r.order < m_max:
        raise OrderExhaustedError(
            f"need curvature jets of order >= {m_max}, have {r.order}: increase jet order")
    values = [r.value()]
    jets = [r]
    variance = "uddd"
    current = r
    for _ in range(m_max):
        current = covariant_derivative(current, variance, gamma)
        variance += "d"
        values.append(current.value())
        jets.append(current)
    return values, jets


def lowered_riemann(curv):
    """Fully covariant curvature rm[l, k, i, j]: the upper index lowered in
    place, i.e. the metric pairing of d_l against the (i, j)-endomorphism
    applied to d_k."""
    return np.einsum("la,akij->lkij", curv.g, curv.riemann)


def identity_residuals(curv):
    """Scaled residuals of the classical curvature identities at the point."""
    rm = lowered_riemann(curv)
    scale = max(1.0, float(np.abs(rm).max()))
    anti_ij = np.abs(rm + np.einsum("lkji->lkij", rm)).max()
    anti_kl = np.abs(rm + np.einsum("klij->lkij", rm)).max()
    pair = np.abs(rm - np.einsum("ijlk->lkij", rm)).max()
    bianchi = np.abs(rm + np.einsum("lijk->lkij", rm)
                     + np.einsum("ljki->lkij", rm)).max()
    nabla_g = covariant_derivative(curv.metric_jets, "dd", curv.gamma_jets).value()
    g_scale = max(1.0, float(np.abs(curv.g).max()),
                  float(np.abs(curv.gamma_jets.value()).max()))
    return {
        "antisymmetry": float(anti_ij / scale),
        "antisymmetry_pair": float(anti_kl / scale),
        "pair_symmetry": float(pair / scale),
        "first_bianchi": float(bianchi / scale),
        "metric_compatibility": float(np.abs(nabla_g).max() / g_scale),
    }


@dataclass
class CurvatureData:
    """Everything curvature-related at one point, to a fixed jet order."""

    spec: object
    point: np.ndarray
    jet_order: int
    metric_jets: JetTensor
    inverse_jets: JetTensor
    gamma_jets: JetTensor
    riemann_jets: JetTensor
    covR: list          # covR[m]: values of the m-th covariant derivative
    covR_jets: list

    @property
    def n(self):
        return self.spec.dim

    @property
    def g(self):
        return self.metric_jets.value()

    @property
    def ginv(self):
        return self.inverse_jets.value()

    @property
    def riemann(self):
        return self.riemann_jets.value()

    @classmethod
    def compute(cls, spec, point=None, m_max=1, jet_order=None):
        """Build curvature data; the default jet order is m_max + 3."""
        p = np.asarray(spec.base_point if point is None else point, dtype=np.float64)
        k = (m_max + 3) if jet_order is None else int(jet_order)
        if k < m_max + 3:
            raise OrderExhaustedError(
                f"jet order {k} too low for {m_max} covariant derivatives; "
                f"need at least {m_max + 3}")
        grid = metricdsl.metric_jets(spec, p, k)
        g = tensor_from_grid(grid)
        ginv = inverse_metric(g)
        gamma = christoffel(g, ginv)
        r = riemann(gamma)
        values, jets = covariant_derivatives_of_riemann(r, gamma, m_max)
        return cls(spec=spec, point=p, jet_order=k, metric_jets=g,
                   inverse_jets=ginv, gamma_jets=gamma, riemann_jets=r,
                   covR=values, covR_jets=jets)


def covariant_derivatives_R(curv, m_max):
    """Value arrays of the covariant derivatives of the curvature up to m_max."""
    if curv.jet_order < m_max + 3:
        raise OrderExhaustedError(
            f"curvature data built at jet order {curv.jet_order}; "
            f"increase jet order to {m_max + 3} for m_max={m_max}")
    if m_max < len(curv.covR):
        return curv.covR[:m_max + 1]
    values, _ = covariant_derivatives_of_riemann(curv.riemann_jets,
                                                 curv.gamma_jets, m_max)
    return values


def point_frame(spec, point):
    """Metric, inverse, connection values, and curvature values at one point.

    The cheap evaluator behind the transport integrator and the field checks.
    """
    p = np.asarray(point, dtype=np.float64)
    grid = metricdsl.metric_jets(spec, p, 2)
    g = tensor_from_grid(grid)
    ginv = inverse_metric(g)
    gamma = christoffel(g, ginv)
    r = riemann(gamma)
    return g.value(), ginv.value(), gamma.value(), r.value()
