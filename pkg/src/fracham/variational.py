"""Variational layer over the fractional operators.

A Lagrangian density L(t, q, dl, dr) takes the trajectory value together
with its left Caputo derivative of order alpha (dl) and right Caputo
derivative of order beta (dr). The layer evaluates the action integral,
the stationarity residual

    dL/dq + D_right^alpha (dL/ddl) + D_left^beta (dL/ddr),

the endpoint (transversality) bracket built from fractional integrals of
orders 1 - alpha and 1 - beta, the canonical momenta, the canonical
energy H = p_a * dl + p_b * dr - L, and the defects of the canonical
equations of motion. Both residual routes share the same discrete
operator matrices, so their algebraic equivalence holds on the grid to
rounding, independent of discretization error.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Callable

import numpy as np

from .fracnum import (
    FractionalOrder,
    Grid,
    GridMismatchError,
    OperatorKind,
    SampledFn,
    apply,
    as_order,
    build_operator,
    trapezoid_weights,
)

__all__ = [
    "LagrangianSpec",
    "TrajectoryBundle",
    "ELReport",
    "EquivalenceReport",
    "evaluate_functional",
    "el_residual",
    "transversality_terms",
    "momenta",
    "hamiltonian",
    "hamilton_residuals",
    "energy_defect",
    "equivalence_gap",
]

# callbacks take (t, q, dl, dr), must accept numpy arrays and broadcast
Density = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]

_PROBE_SEED = 271828
_PROBE_COUNT = 8
_PROBE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class LagrangianSpec:
    """A density L and its three partial derivatives.

    ``dL_dq``, ``dL_ddL`` and ``dL_ddR`` are the partials with respect to
    the trajectory value, the left-Caputo argument and the right-Caputo
    argument. On construction they are cross-checked against central
    finite differences of ``eval_L`` on a fixed random probe set; a
    mismatch beyond 1e-6 (relative, with an absolute floor of 1) raises
    ValueError. Pass ``validate=False`` to skip the gate.
    """

    eval_L: Density
    dL_dq: Density
    dL_ddL: Density
    dL_ddR: Density
    alpha: FractionalOrder
    beta: FractionalOrder
    probe_interval: tuple[float, float] = (0.0, 1.0)
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        object.__setattr__(self, "alpha", as_order(self.alpha))
        object.__setattr__(self, "beta", as_order(self.beta))
        lo, hi = self.probe_interval
        if not hi > lo:
            raise ValueError(f"bad probe interval ({lo:g}, {hi:g})")
        if validate:
            self._check_partials()

    def _check_partials(self) -> None:
        rng = np.random.default_rng(_PROBE_SEED)
        lo, hi = self.probe_interval
        pad = 0.05 * (hi - lo)
        for _ in range(_PROBE_COUNT):
            t = rng.uniform(lo + pad, hi - pad)
            q, dl, dr = rng.uniform(-2.0, 2.0, size=3)
            point = [t, q, dl, dr]
            partials = (("dL_dq", self.dL_dq, 1), ("dL_ddL", self.dL_ddL, 2),
                        ("dL_ddR", self.dL_ddR, 3))
            for name, cb, k in partials:
                stated = float(cb(t, q, dl, dr))
                step = 1e-6 * max(1.0, abs(point[k]))
                hi_pt = list(point)
                lo_pt = list(point)
                hi_pt[k] += step
                lo_pt[k] -= step
                fd = (float(self.eval_L(*hi_pt)) - float(self.eval_L(*lo_pt))) / (2.0 * step)
                if abs(stated - fd) > _PROBE_TOL * max(1.0, abs(stated), abs(fd)):
                    raise ValueError(
                        f"{name} disagrees with finite differences of eval_L at "
                        f"(t={t:.4g}, q={q:.4g}, dl={dl:.4g}, dr={dr:.4g}): "
                        f"callback {stated:.8g}, finite-difference {fd:.8g}"
                    )


@dataclass(frozen=True, eq=False)
class TrajectoryBundle:
    """Trajectory, its fractional velocities, momenta and energy, all on one grid."""

    q: SampledFn
    dL: SampledFn
    dR: SampledFn
    p_alpha: SampledFn
    p_beta: SampledFn
    H: SampledFn

    def __post_init__(self) -> None:
        g = self.q.grid
        for name in ("dL", "dR", "p_alpha", "p_beta", "H"):
            if getattr(self, name).grid != g:
                raise GridMismatchError(f"bundle field {name} is on a different grid")


@dataclass(frozen=True, eq=False)
class ELReport:
    """Stationarity residual with its norms over the usable nodes."""

    residual: SampledFn
    max_abs: float
    l2: float


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Agreement between the stationarity residual and the canonical route."""

    gap: float           # max |el + r_q| over usable nodes
    el_max: float
    hamilton_max: float  # max |r_q|
    el_l2: float
    hamilton_l2: float


def _field(values, n: int) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    if out.ndim == 0:
        out = np.full(n + 1, float(out))
    return out


def _velocities(spec: LagrangianSpec, q: SampledFn) -> tuple[SampledFn, SampledFn]:
    dl = apply(build_operator(OperatorKind.CAPUTO_LEFT, spec.alpha, q.grid), q)
    dr = apply(build_operator(OperatorKind.CAPUTO_RIGHT, spec.beta, q.grid), q)
    return dl, dr


def evaluate_functional(spec: LagrangianSpec, q: SampledFn) -> float:
    """Trapezoid quadrature of L along the trajectory q."""
    t = q.grid.nodes
    dl, dr = _velocities(spec, q)
    lv = _field(spec.eval_L(t, q.values, dl.values, dr.values), q.grid.n)
    if not np.isfinite(lv).all():
        i = int(np.flatnonzero(~np.isfinite(lv))[0])
        raise ValueError(f"Lagrangian is not finite at node {i} (t = {t[i]:g})")
    return float(np.sum(trapezoid_weights(q.grid) * lv))


def _weighted_norms(res: np.ndarray, grid: Grid) -> tuple[float, float]:
    mask = np.isfinite(res)
    w = trapezoid_weights(grid)
    max_abs = float(np.max(np.abs(res[mask])))
    l2 = float(np.sqrt(np.sum(w[mask] * res[mask] ** 2)))
    return max_abs, l2


def el_residual(spec: LagrangianSpec, q: SampledFn) -> ELReport:
    """Pointwise defect of the stationarity equation along q.

    The two Riemann-Liouville terms are singular at one endpoint each,
    so the residual carries NaN sentinels at both ends and the norms run
    over the interior.
    """
    t = q.grid.nodes
    n = q.grid.n
    dl, dr = _velocities(spec, q)
    args = (t, q.values, dl.values, dr.values)
    u = SampledFn(q.grid, _field(spec.dL_ddL(*args), n))
    v = SampledFn(q.grid, _field(spec.dL_ddR(*args), n))
    ru = apply(build_operator(OperatorKind.RL_RIGHT, spec.alpha, q.grid), u)
    rv = apply(build_operator(OperatorKind.RL_LEFT, spec.beta, q.grid), v)
    res = _field(spec.dL_dq(*args), n) + ru.values + rv.values
    max_abs, l2 = _weighted_norms(res, q.grid)
    return ELReport(SampledFn(q.grid, res, allow_sentinels=True), max_abs, l2)


def transversality_terms(spec: LagrangianSpec, q: SampledFn) -> tuple[float, float]:
    """Endpoint bracket of the natural boundary conditions.

    Computes I_right^(1-alpha)(dL/ddl) - I_left^(1-beta)(dL/ddr) and
    returns its values at t = a and t = b. With both endpoints held
    fixed the boundary conditions are satisfied regardless; the caller
    decides what to do with free endpoints.
    """
    t = q.grid.nodes
    n = q.grid.n
    dl, dr = _velocities(spec, q)
    args = (t, q.values, dl.values, dr.values)
    u = SampledFn(q.grid, _field(spec.dL_ddL(*args), n))
    v = SampledFn(q.grid, _field(spec.dL_ddR(*args), n))
    ir = apply(build_operator(OperatorKind.INT_RIGHT, spec.alpha.complement, q.grid), u)
    il = apply(build_operator(OperatorKind.INT_LEFT, spec.beta.complement, q.grid), v)
    bracket = ir.values - il.values
    return float(bracket[0]), float(bracket[-1])


def momenta(spec: LagrangianSpec, q: SampledFn) -> tuple[SampledFn, SampledFn]:
    """Canonical momenta: the partials of L with respect to dl and dr."""
    t = q.grid.nodes
    n = q.grid.n
    dl, dr = _velocities(spec, q)
    args = (t, q.values, dl.values, dr.values)
    p_a = SampledFn(q.grid, _field(spec.dL_ddL(*args), n))
    p_b = SampledFn(q.grid, _field(spec.dL_ddR(*args), n))
    return p_a, p_b


def hamiltonian(spec: LagrangianSpec, q: SampledFn) -> TrajectoryBundle:
    """Assemble velocities, momenta and the canonical energy along q.

    H = p_alpha * dl + p_beta * dr - L holds pointwise by construction;
    ``energy_defect`` recomputes it for verification.
    """
    t = q.grid.nodes
    n = q.grid.n
    dl, dr = _velocities(spec, q)
    args = (t, q.values, dl.values, dr.values)
    p_a = _field(spec.dL_ddL(*args), n)
    p_b = _field(spec.dL_ddR(*args), n)
    lv = _field(spec.eval_L(*args), n)
    h = p_a * dl.values + p_b * dr.values - lv
    return TrajectoryBundle(
        q=q,
        dL=dl,
        dR=dr,
        p_alpha=SampledFn(q.grid, p_a),
        p_beta=SampledFn(q.grid, p_b),
        H=SampledFn(q.grid, h),
    )


def energy_defect(spec: LagrangianSpec, bundle: TrajectoryBundle) -> float:
    """Max deviation of the stored H from p_a*dl + p_b*dr - L, recomputed."""
    t = bundle.q.grid.nodes
    lv = _field(
        spec.eval_L(t, bundle.q.values, bundle.dL.values, bundle.dR.values),
        bundle.q.grid.n,
    )
    h = bundle.p_alpha.values * bundle.dL.values + bundle.p_beta.values * bundle.dR.values - lv
    return float(np.max(np.abs(h - bundle.H.values)))


def hamilton_residuals(
    spec: LagrangianSpec, bundle: TrajectoryBundle
) -> tuple[SampledFn, SampledFn, SampledFn]:
    """Defects of the canonical equations of motion on the grid.

    The first two returned fields are the momentum-consistency defects
    p_alpha - dL/ddl and p_beta - dL/ddr evaluated on the bundle. They
    vanish identically when the momenta came from the gradient map, in
    which case differentiating the assembled energy with respect to each
    momentum reproduces the stored fractional velocity, so they act as
    the consistency checks of the first two canonical equations.

    The third field is the trajectory equation defect

        r_q = -dL/dq - D_right^alpha p_alpha - D_left^beta p_beta,

    using dH/dq = -dL/dq (the energy depends on q only through L once
    the momenta are held fixed). It equals the negated stationarity
    residual whenever the momenta are consistent, since both routes use
    the same operator matrices.
    """
    q = bundle.q
    t = q.grid.nodes
    n = q.grid.n
    args = (t, q.values, bundle.dL.values, bundle.dR.values)
    r_dl = bundle.p_alpha.values - _field(spec.dL_ddL(*args), n)
    r_dr = bundle.p_beta.values - _field(spec.dL_ddR(*args), n)
    ra = apply(build_operator(OperatorKind.RL_RIGHT, spec.alpha, q.grid), bundle.p_alpha)
    rb = apply(build_operator(OperatorKind.RL_LEFT, spec.beta, q.grid), bundle.p_beta)
    r_q = -_field(spec.dL_dq(*args), n) - ra.values - rb.values
    return (
        SampledFn(q.grid, r_dl),
        SampledFn(q.grid, r_dr),
        SampledFn(q.grid, r_q, allow_sentinels=True),
    )


def equivalence_gap(spec: LagrangianSpec, q: SampledFn) -> EquivalenceReport:
    """Compare the stationarity residual with the negated canonical defect.

    Both sides are assembled from the same pointwise partials and the
    same Riemann-Liouville matrices, so the gap is rounding-level for
    any trajectory, however far from stationary.
    """
    el = el_residual(spec, q)
    bundle = hamiltonian(spec, q)
    _, _, r_q = hamilton_residuals(spec, bundle)
    s = el.residual.values + r_q.values
    mask = np.isfinite(s)
    gap = float(np.max(np.abs(s[mask])))
    rq_max, rq_l2 = _weighted_norms(r_q.values, q.grid)
    return EquivalenceReport(gap, el.max_abs, rq_max, el.l2, rq_l2)
