"""Displacement measurement for perturbed polynomial foliations.

Integrates the plane field annihilating dF + eps*eta, measures the first
return to a transversal ray in the value of F, fits the displacement as a
polynomial in eps, and provides the Gelfand-Leray fiberwise derivative
needed for the second-order prediction int omega omega'.

Sign conventions (pinned by the harmonic-oscillator fixture, recorded in
reports): loops are oriented by the flow of (F_y, -F_x); with the
counterclockwise orientation the fitted first coefficient satisfies
M1(t) = + contour integral of eta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .chen import Poly2, OneForm, Path, ChenError, chen_transport, iterated_integral
from .series import TruncationContext


class MelnikovError(ValueError):
    pass


# -- systems and transversals ----------------------------------------------


class PlanarSystem:
    """dF + sum_i eps^i eta_i = 0 with polynomial eta_i = P_i dx + Q_i dy."""

    def __init__(self, F: Poly2, forms: dict):
        if not forms:
            raise MelnikovError("need at least one perturbation form")
        for i, form in forms.items():
            if i < 1:
                raise MelnikovError("form orders start at 1")
            if form.D is not None:
                raise MelnikovError("perturbation forms must be polynomial")
        self.F = F
        self.forms = dict(forms)

    def aggregate(self, eps: float):
        """(P, Q) of the total perturbation sum eps^i eta_i at numeric eps."""
        P, Q = Poly2(), Poly2()
        for i, form in self.forms.items():
            P = P + form.P.scale(eps**i)
            Q = Q + form.Q.scale(eps**i)
        return P, Q

    def to_json(self):
        return {
            "F": self.F.to_json(),
            "forms": {str(i): f.to_json() for i, f in sorted(self.forms.items())},
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            Poly2.from_json(data["F"]),
            {int(i): OneForm.from_json(f) for i, f in data["forms"].items()},
        )


class TransversalSpec:
    """Ray p0 + u*dir, u >= 0, parametrized by the value t of F."""

    def __init__(self, point, direction, umax=10.0):
        self.point = (float(point[0]), float(point[1]))
        self.direction = (float(direction[0]), float(direction[1]))
        if self.direction == (0.0, 0.0):
            raise MelnikovError("zero transversal direction")
        self.umax = umax

    def at(self, u):
        return (
            self.point[0] + u * self.direction[0],
            self.point[1] + u * self.direction[1],
        )

    def ray_parameter(self, z):
        dx, dy = self.direction
        n2 = dx * dx + dy * dy
        return ((z[0] - self.point[0]) * dx + (z[1] - self.point[1]) * dy) / n2

    def cross(self, z):
        """Signed distance surrogate: zero exactly on the transversal line."""
        dx, dy = self.direction
        return dx * (z[1] - self.point[1]) - dy * (z[0] - self.point[0])

    def point_at_level(self, F: Poly2, t: float):
        """Ray point with F = t, by bracketed root search in u."""
        h = lambda u: float(np.real(F(*self.at(u)))) - t
        us = np.linspace(0.0, self.umax, 512)
        vals = [h(u) for u in us]
        for a, b, va, vb in zip(us, us[1:], vals, vals[1:]):
            if va == 0.0:
                u = a
                break
            if va * vb < 0:
                u = brentq(h, a, b, xtol=1e-14)
                break
        else:
            raise MelnikovError(f"level t={t} not reached on the transversal ray")
        z = self.at(u)
        gx, gy = float(np.real(F.dx()(*z))), float(np.real(F.dy()(*z)))
        if abs(gx * self.direction[0] + gy * self.direction[1]) < 1e-10:
            raise MelnikovError("transversality lost: grad F orthogonal to the ray")
        return z

    def to_json(self):
        return {"point": list(self.point), "direction": list(self.direction), "umax": self.umax}

    @classmethod
    def from_json(cls, data):
        return cls(data["point"], data["direction"], data.get("umax", 10.0))


# -- vector field and symbolic checks --------------------------------------


def vector_field_polys(system: PlanarSystem, eps: float):
    """Components of the field annihilating dF + eps-aggregated eta, as Poly2."""
    P, Q = system.aggregate(eps)
    return system.F.dy() + Q, -(system.F.dx() + P)


def vector_field(system: PlanarSystem, eps: float):
    u, v = vector_field_polys(system, eps)
    return lambda x, y: (np.real(u(x, y)), np.real(v(x, y)))


def contraction_residual(system: PlanarSystem, eps: float) -> Poly2:
    """(dF + eps*eta) contracted with the field; identically zero."""
    P, Q = system.aggregate(eps)
    u, v = vector_field_polys(system, eps)
    return (system.F.dx() + P) * u + (system.F.dy() + Q) * v


# -- displacement measurement ----------------------------------------------


@dataclass
class DisplacementSample:
    t: float
    eps: float
    delta: float
    return_time: float
    error_estimate: float


def _next_crossing(system, tau, z0, eps, tol, backward=False, time_bound=200.0):
    """Integrate from z0 to the next same-direction crossing of the ray."""
    field = vector_field(system, eps)
    sgn = -1.0 if backward else 1.0
    rhs = lambda s, z: sgn * np.array(field(z[0], z[1]))
    v0 = rhs(0.0, np.array(z0))
    dx, dy = tau.direction
    dg0 = dx * v0[1] - dy * v0[0]
    if dg0 == 0.0:
        raise MelnikovError("trajectory starts tangent to the transversal")
    event = lambda s, z: tau.cross(z)
    event.direction = float(np.sign(dg0))
    event.terminal = False
    sol = solve_ivp(rhs, (0.0, time_bound), np.array(z0, dtype=float),
                    method="DOP853", rtol=tol, atol=tol, events=[event],
                    dense_output=True)
    if not sol.success:
        raise MelnikovError(f"integration failed: {sol.message}")
    for s_ev, z_ev in zip(sol.t_events[0], sol.y_events[0]):
        if s_ev > 1e-6 and tau.ray_parameter(z_ev) > 0:
            return tuple(z_ev), float(s_ev)
    raise MelnikovError(f"no return within time bound {time_bound}")


def return_map(system: PlanarSystem, tau: TransversalSpec, t: float, eps: float,
               tol=1e-12, time_bound=200.0) -> DisplacementSample:
    """Displacement Delta = F(first return) - t on the transversal ray."""
    z0 = tau.point_at_level(system.F, t)
    z1, s1 = _next_crossing(system, tau, z0, eps, tol, time_bound=time_bound)
    delta = float(np.real(system.F(*z1))) - t
    return DisplacementSample(t, eps, delta, s1, 100.0 * tol)


def holonomy_sequence(system, tau, t, eps, seq, tol=1e-12, time_bound=200.0):
    """Displacement of a composite loop: +1 forward return, -1 backward.

    Each step starts where the previous crossing landed, so the measured
    value is the holonomy of the concatenated loop.
    """
    z = tau.point_at_level(system.F, t)
    total_time = 0.0
    for step in seq:
        if step not in (1, -1):
            raise MelnikovError("sequence entries must be +1 or -1")
        z, s = _next_crossing(system, tau, z, eps, tol, backward=(step == -1),
                              time_bound=time_bound)
        total_time += s
    delta = float(np.real(system.F(*z))) - t
    return DisplacementSample(t, eps, delta, total_time, 100.0 * len(seq) * tol)


# -- fitting ---------------------------------------------------------------


@dataclass
class MelnikovFit:
    t: float
    coefficients: list
    standard_errors: list
    noise_floor: list
    mu: int | None
    residual: float

    def leading(self):
        if self.mu is None:
            raise MelnikovError("all coefficients below noise floor")
        return self.coefficients[self.mu - 1]

    def to_json(self):
        return {
            "t": self.t,
            "coefficients": self.coefficients,
            "standard_errors": self.standard_errors,
            "noise_floor": self.noise_floor,
            "mu": self.mu,
            "residual": self.residual,
        }


def fit_melnikov(samples, order: int) -> MelnikovFit:
    """Least squares Delta = sum_{i=1..order} M_i eps^i through the origin.

    mu is the first index whose coefficient clears the propagated noise
    floor; None means everything is below it.
    """
    if len({s.eps for s in samples}) < order + 2:
        raise MelnikovError(f"need at least {order + 2} distinct eps values")
    ts = {s.t for s in samples}
    if len(ts) != 1:
        raise MelnikovError("samples must share one t value")
    t = ts.pop()
    eps = np.array([s.eps for s in samples])
    delta = np.array([s.delta for s in samples])
    E = np.vander(eps, order + 1, increasing=True)[:, 1:]
    coef, _, _, _ = np.linalg.lstsq(E, delta, rcond=None)
    resid = delta - E @ coef
    residual = float(np.max(np.abs(resid)))
    # propagate per-sample error through the pseudoinverse, row by row
    pinv = np.linalg.pinv(E)
    sample_err = np.array([s.error_estimate for s in samples])
    noise = np.abs(pinv) @ sample_err
    dof = max(len(samples) - order, 1)
    sigma = float(np.sqrt(np.sum(resid**2) / dof))
    stderr = sigma * np.sqrt(np.sum(pinv**2, axis=1))
    floor = [float(5.0 * (n + se)) for n, se in zip(noise, stderr)]
    mu = None
    for i, c in enumerate(coef):
        if abs(c) > floor[i]:
            mu = i + 1
            break
    return MelnikovFit(t, [float(c) for c in coef], [float(s) for s in stderr],
                       floor, mu, residual)


def measure_melnikov(system, tau, t, eps_grid, order=2, tol=1e-12, seq=None):
    """Samples over the eps grid at fixed t, then the polynomial fit."""
    samples = []
    for eps in eps_grid:
        if seq is None:
            samples.append(return_map(system, tau, t, eps, tol=tol))
        else:
            samples.append(holonomy_sequence(system, tau, t, eps, seq, tol=tol))
    return samples, fit_melnikov(samples, order)


def geometric_eps_grid(eps0=0.05, ratio=0.7, count=8):
    return [eps0 * ratio**j for j in range(count)]


def holonomy_additivity_check(system, tau, t, eps_grid, order=2, tol=1e-12,
                              conjugate_tau=None):
    """Leading-order additivity and conjugation invariance of holonomies.

    Measures the loop, its square, its composition with the inverse, and the
    same loop seen from a second transversal (conjugation by the connecting
    arc); reports fitted leading coefficients and pass flags.
    """
    _, fit1 = measure_melnikov(system, tau, t, eps_grid, order, tol, seq=[1])
    _, fit2 = measure_melnikov(system, tau, t, eps_grid, order, tol, seq=[1, 1])
    _, fit0 = measure_melnikov(system, tau, t, eps_grid, order, tol, seq=[1, -1])
    lead1 = fit1.leading()
    lead2 = fit2.leading()
    fit_tol = max(fit1.noise_floor[fit1.mu - 1], fit2.noise_floor[fit2.mu - 1])
    out = {
        "single": fit1.to_json(),
        "double": fit2.to_json(),
        "cancel": fit0.to_json(),
        "additive_ok": bool(abs(lead2 - 2.0 * lead1) <= 10.0 * fit_tol),
        "cancel_ok": bool(fit0.mu is None or fit0.mu > fit1.mu),
    }
    if conjugate_tau is not None:
        _, fitc = measure_melnikov(system, conjugate_tau, t, eps_grid, order, tol, seq=[1])
        out["conjugate"] = fitc.to_json()
        out["conjugation_ok"] = bool(
            fitc.mu == fit1.mu and abs(fitc.leading() - lead1) <= 10.0 * fit_tol
        )
    return out


# -- Gelfand-Leray ---------------------------------------------------------


class FiberForm:
    """Fiber restriction of (A dx^dy)/dF with A = Anum/Aden.

    On a fiber of F the two chart formulas (A/F_x) dy and -(A/F_y) dx agree;
    evaluation picks the chart whose partial dominates pointwise.
    """

    __slots__ = ("Anum", "Aden", "Fx", "Fy", "bias")

    def __init__(self, Anum: Poly2, Aden: Poly2, F: Poly2, bias=1.0):
        self.Anum = Anum
        self.Aden = Aden
        self.Fx = F.dx()
        self.Fy = F.dy()
        self.bias = bias

    def coefficient(self, seg):
        xp, yp = seg.x.deriv(), seg.y.deriv()

        def f(s):
            x, y = seg.x(s), seg.y(s)
            A = self.Anum(x, y) / self.Aden(x, y)
            fx, fy = self.Fx(x, y), self.Fy(x, y)
            use_x = np.abs(fx) >= self.bias * np.abs(fy)
            safe_fx = np.where(use_x, fx, 1.0)
            safe_fy = np.where(use_x, 1.0, fy)
            return np.where(use_x, A * yp(s) / safe_fx, -A * xp(s) / safe_fy)

        return f

    def min_denominator(self, seg, samples=200):
        s = np.linspace(0.0, 1.0, samples)
        x, y = seg.x(s), seg.y(s)
        charts = np.maximum(np.abs(self.Fx(x, y)), np.abs(self.Fy(x, y)))
        vals = [float(np.min(charts))]
        if self.Aden.coeffs != {(0, 0): 1.0}:
            vals.append(float(np.min(np.abs(self.Aden(x, y)))))
        return min(vals)


class SumForm:
    """Pointwise sum of forms (OneForm or FiberForm), usable in transport."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = list(parts)

    def coefficient(self, seg):
        fs = [p.coefficient(seg) for p in self.parts]
        return lambda s: sum(f(s) for f in fs)

    def min_denominator(self, seg, samples=200):
        return min(p.min_denominator(seg, samples) for p in self.parts)


def gelfand_leray_form(omega: OneForm, F: Poly2, bias=1.0) -> FiberForm:
    Anum, Aden = omega.exterior_coefficient()
    return FiberForm(Anum, Aden, F, bias=bias)


def gelfand_leray(omega: OneForm, F: Poly2, path: Path, tol=1e-10, bias=1.0):
    """Integral over the path of the Gelfand-Leray derivative of omega."""
    form = gelfand_leray_form(omega, F, bias=bias)
    state = chen_transport(path, [form], TruncationContext(1, 1), tol=tol)
    return state.coeff((1,))


# -- second-order construction ---------------------------------------------

# With paths oriented along the flow of (F_y, -F_x), the fitted eps^2
# coefficient equals +int omega omega'; pinned numerically on the bundled
# fixture (first order carries the opposite sign: Delta ~ -eps int_flow omega).
M2_FLOW_SIGN = 1.0


class M2Construction:
    """omega = lam*Th1 + (F - t0)/lam * Th2 with its fiberwise derivative.

    Requires both Theta periods to vanish on the sampled fibers (checked by
    check_hypothesis), so M1 of the assembled system is identically zero and
    the displacement starts at order eps^2.
    """

    def __init__(self, theta1: OneForm, theta2: OneForm, F: Poly2, t0: float,
                 lam: float, path_factory):
        if theta1.D is not None or theta2.D is not None:
            raise MelnikovError("Theta forms must be polynomial")
        self.theta1, self.theta2, self.F = theta1, theta2, F
        self.t0, self.lam = float(t0), float(lam)
        self.path_factory = path_factory
        shifted = F - Poly2.constant(t0)
        self.omega = OneForm(
            theta1.P.scale(lam) + (shifted * theta2.P).scale(1.0 / lam),
            theta1.Q.scale(lam) + (shifted * theta2.Q).scale(1.0 / lam),
        )
        # omega' = lam*Th1' + (F-t0)/lam*Th2' + Th2/lam on the fiber
        a1, _ = theta1.exterior_coefficient()
        a2, _ = theta2.exterior_coefficient()
        anum = a1.scale(lam) + (shifted * a2).scale(1.0 / lam)
        self.omega_prime = SumForm([
            FiberForm(anum, Poly2.constant(1.0), F),
            OneForm(theta2.P.scale(1.0 / lam), theta2.Q.scale(1.0 / lam)),
        ])

    def system(self) -> PlanarSystem:
        return PlanarSystem(self.F, {1: self.omega})

    def check_hypothesis(self, t_values, tol=1e-8):
        """Both Theta periods must vanish on every sampled fiber."""
        worst = 0.0
        for t in t_values:
            path = self.path_factory(t)
            for th in (self.theta1, self.theta2):
                val = iterated_integral(path, [th], tol=tol * 1e-2)
                worst = max(worst, abs(val))
        if worst > tol:
            raise MelnikovError(f"Theta period {worst} exceeds {tol}: M1 would not vanish")
        return worst

    def predicted_m2(self, t, tol=1e-11) -> float:
        """Second Melnikov coefficient int omega omega' along the fiber orbit."""
        path = self.path_factory(t)
        val = iterated_integral(path, [self.omega, self.omega_prime], tol=tol)
        return M2_FLOW_SIGN * float(np.real(val))
