"""Numerical Chen iterated integrals along explicit polynomial paths.

A path is a chain of polynomial segments [0,1] -> C^2; forms are rational
one-forms (P dx + Q dy)/D with polynomial numerators.  Transporting the
truncated series S' = S * sum_i f_i(s) X_i along the path yields every
iterated integral of length <= degree in one ODE solve; the coefficient of
the word (i1..ik) is the k-fold iterated integral of the forms in that order.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from .words import Word
from .series import NCSeries, TruncationContext, log


class ChenError(ValueError):
    pass


# -- bivariate polynomials -------------------------------------------------


class Poly2:
    """Sparse bivariate polynomial {(i, j): complex coefficient} in x, y."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                if c != 0:
                    self.coeffs[(int(i), int(j))] = c

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def x(cls):
        return cls({(1, 0): 1.0})

    @classmethod
    def y(cls):
        return cls({(0, 1): 1.0})

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.coeffs == other.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return Poly2(out)

    def __neg__(self):
        return Poly2({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for (i, j), c in self.coeffs.items():
            for (k, l), d in other.coeffs.items():
                m = (i + k, j + l)
                s = out.get(m, 0) + c * d
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly2(out)

    def scale(self, c):
        if c == 0:
            return Poly2()
        return Poly2({m: c * v for m, v in self.coeffs.items()})

    def dx(self):
        return Poly2({(i - 1, j): i * c for (i, j), c in self.coeffs.items() if i})

    def dy(self):
        return Poly2({(i, j - 1): j * c for (i, j), c in self.coeffs.items() if j})

    def __call__(self, x, y):
        out = 0
        for (i, j), c in self.coeffs.items():
            out = out + c * x**i * y**j
        return out

    def to_json(self):
        out = []
        for (i, j), c in sorted(self.coeffs.items()):
            c = complex(c)
            out.append({"dx": i, "dy": j, "re": c.real, "im": c.imag})
        return out

    @classmethod
    def from_json(cls, data):
        return cls({(m["dx"], m["dy"]): complex(m["re"], m.get("im", 0.0)) for m in data})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*x^{i}*y^{j}" for (i, j), c in sorted(self.coeffs.items()))


# -- one-forms -------------------------------------------------------------


class OneForm:
    """The rational one-form (P dx + Q dy)/D; D defaults to 1."""

    __slots__ = ("P", "Q", "D")

    def __init__(self, P: Poly2, Q: Poly2, D: Poly2 | None = None):
        if D is not None and D.is_zero():
            raise ChenError("denominator is identically zero")
        self.P = P
        self.Q = Q
        self.D = D

    def coefficient(self, seg):
        """Pullback coefficient f(s) with (pulled-back form) = f(s) ds."""
        xp, yp = seg.x.deriv(), seg.y.deriv()

        def f(s):
            x, y = seg.x(s), seg.y(s)
            val = self.P(x, y) * xp(s) + self.Q(x, y) * yp(s)
            if self.D is not None:
                val = val / self.D(x, y)
            return val

        return f

    def min_denominator(self, seg, samples=200):
        if self.D is None:
            return np.inf
        s = np.linspace(0.0, 1.0, samples)
        return float(np.min(np.abs(self.D(seg.x(s), seg.y(s)))))

    def exterior_coefficient(self):
        """(numerator, denominator) of A with d(form) = A dx ^ dy."""
        if self.D is None:
            return self.Q.dx() - self.P.dy(), Poly2.constant(1.0)
        num = (self.Q.dx() - self.P.dy()) * self.D - (
            self.Q * self.D.dx() - self.P * self.D.dy()
        )
        return num, self.D * self.D

    def to_json(self):
        out = {"P": self.P.to_json(), "Q": self.Q.to_json()}
        if self.D is not None:
            out["D"] = self.D.to_json()
        return out

    @classmethod
    def from_json(cls, data):
        D = Poly2.from_json(data["D"]) if "D" in data else None
        return cls(Poly2.from_json(data["P"]), Poly2.from_json(data["Q"]), D)


# -- paths -----------------------------------------------------------------


class Segment:
    """Polynomial map [0,1] -> C^2 given by coefficient arrays (ascending)."""

    __slots__ = ("x", "y")

    def __init__(self, xcoeffs, ycoeffs):
        self.x = np.polynomial.Polynomial(np.asarray(xcoeffs, dtype=complex))
        self.y = np.polynomial.Polynomial(np.asarray(ycoeffs, dtype=complex))

    def __call__(self, s):
        return self.x(s), self.y(s)

    @property
    def start(self):
        return complex(self.x(0.0)), complex(self.y(0.0))

    @property
    def end(self):
        return complex(self.x(1.0)), complex(self.y(1.0))

    def reversed(self):
        flip = np.polynomial.Polynomial([1.0, -1.0])
        return Segment(self.x(flip).coef, self.y(flip).coef)

    def to_json(self):
        pack = lambda p: [{"re": c.real, "im": c.imag} for c in map(complex, p.coef)]
        return {"x": pack(self.x), "y": pack(self.y)}

    @classmethod
    def from_json(cls, data):
        unpack = lambda cs: [complex(c["re"], c.get("im", 0.0)) for c in cs]
        return cls(unpack(data["x"]), unpack(data["y"]))


class Path:
    """Chain of segments with endpoint matching checked to tol_join."""

    def __init__(self, segments, closed=False, tol_join=1e-9):
        self.segments = list(segments)
        self.closed = closed
        if not self.segments:
            raise ChenError("path needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if _dist(a.end, b.start) > tol_join:
                raise ChenError(f"segment join mismatch: {a.end} vs {b.start}")
        if closed and _dist(self.segments[-1].end, self.segments[0].start) > tol_join:
            raise ChenError("closed path does not close up")

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    def reversed(self):
        return Path([s.reversed() for s in reversed(self.segments)], self.closed)

    def __add__(self, other):
        return Path(self.segments + other.segments)

    @classmethod
    def constant(cls, point):
        x, y = point
        return cls([Segment([x], [y])])

    @classmethod
    def polyline(cls, points, closed=False):
        pts = [(complex(x), complex(y)) for x, y in points]
        if closed and _dist(pts[-1], pts[0]) > 0:
            pts.append(pts[0])
        segs = [
            Segment([a[0], b[0] - a[0]], [a[1], b[1] - a[1]])
            for a, b in zip(pts, pts[1:])
        ]
        return cls(segs, closed=closed)

    @classmethod
    def circle(cls, center=(0.0, 0.0), radius=1.0, nseg=8, deg=11, ccw=True):
        """Circle in the real (x, y) plane from polynomial arc fits.

        Each arc of angle 2*pi/nseg is fitted by degree-deg polynomials in the
        parameter; with nseg=8, deg=11 the sup error is near machine epsilon.
        """
        cx, cy = center
        segs = []
        sign = 1.0 if ccw else -1.0
        for k in range(nseg):
            a0 = sign * 2.0 * np.pi * k / nseg
            da = sign * 2.0 * np.pi / nseg
            s = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1)) * 0.5 + 0.5
            th = a0 + da * s
            fx = np.polynomial.polynomial.polyfit(s, cx + radius * np.cos(th), deg)
            fy = np.polynomial.polynomial.polyfit(s, cy + radius * np.sin(th), deg)
            # pin endpoints exactly so joins pass the tolerance check
            segs.append(_pinned_segment(fx, fy, (cx + radius * np.cos(a0), cy + radius * np.sin(a0)),
                                        (cx + radius * np.cos(a0 + da), cy + radius * np.sin(a0 + da))))
        return cls(segs, closed=True)

    @classmethod
    def puncture_loop(cls, center, halfwidth=0.5, ccw=True):
        """Square loop in the complex x-line (y = 0) around a puncture."""
        c, h = complex(center), halfwidth
        # start at the right edge midpoint, visit the corners, come back
        corners = [c + h + h * 1j, c - h + h * 1j, c - h - h * 1j, c + h - h * 1j]
        if not ccw:
            corners = corners[::-1]
        pts = [(z, 0.0) for z in [c + h] + corners + [c + h]]
        return cls.polyline(pts, closed=True)

    def to_json(self):
        return {"segments": [s.to_json() for s in self.segments], "closed": self.closed}

    @classmethod
    def from_json(cls, data, tol_join=1e-9):
        return cls(
            [Segment.from_json(s) for s in data["segments"]],
            closed=data.get("closed", False),
            tol_join=tol_join,
        )


def _dist(p, q):
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _pinned_segment(fx, fy, start, end):
    fx, fy = np.array(fx, dtype=complex), np.array(fy, dtype=complex)
    # absorb the fit residual into the linear term: exact start/end points
    fx[0] += start[0] - np.polynomial.polynomial.polyval(0.0, fx)
    fy[0] += start[1] - np.polynomial.polynomial.polyval(0.0, fy)
    fx[1] += end[0] - np.polynomial.polynomial.polyval(1.0, fx)
    fy[1] += end[1] - np.polynomial.polynomial.polyval(1.0, fy)
    return Segment(fx, fy)


# -- transport -------------------------------------------------------------


class ChenState:
    """Transported series: group-like up to quadrature error, constant term 1."""

    __slots__ = ("series",)

    def __init__(self, series: NCSeries):
        if abs(series.constant_term() - 1) > 1e-6:
            raise ChenError("transport state lost its unit constant term")
        self.series = series

    def coeff(self, word):
        return complex(self.series[tuple(word)])

    def log(self):
        return log(self.series)

    def mul(self, other: "ChenState") -> "ChenState":
        return ChenState(self.series * other.series)

    def inverse(self) -> "ChenState":
        x = self.series.without_constant().scale(1.0 / self.series.constant_term())
        out = NCSeries.one(self.series.ctx).map_coefficients(complex)
        power = NCSeries.one(self.series.ctx).map_coefficients(complex)
        sign = 1.0
        for _ in range(self.series.ctx.degree):
            power = power * x
            sign = -sign
            if power.is_zero():
                break
            out = out + power.scale(sign)
        return ChenState(out.scale(1.0 / self.series.constant_term()))

    def shuffle_residual(self, u, v):
        """coeff(u)*coeff(v) - sum of coeff over shuffles of u and v."""
        from .series import shuffle

        total = 0.0
        for w, mult in shuffle(u, v).items():
            total += mult * self.coeff(w)
        return self.coeff(tuple(u)) * self.coeff(tuple(v)) - total


def chen_transport(path: Path, forms, ctx: TruncationContext, tol=1e-10,
                   pole_margin=1e-6) -> ChenState:
    """Solve S' = S * sum_i f_i(s) X_i along the path, S(start) = 1.

    Returns the end state; its coefficient on the word (i1..ik) is the
    iterated integral of forms i1..ik (in that order) along the path.
    """
    if len(forms) != ctx.rank:
        raise ChenError(f"need {ctx.rank} forms, got {len(forms)}")
    for seg in path.segments:
        for fi, form in enumerate(forms):
            if form.min_denominator(seg) < pole_margin:
                raise ChenError(f"form {fi} pole within margin {pole_margin} of the path")
    words = ctx.words()
    index = {w: k for k, w in enumerate(words)}
    # d coeff(u + (i,)) = f_i * coeff(u): triangular in word length
    targets = np.array([index[w] for w in words if w])
    parents = np.array([index[w[:-1]] for w in words if w])
    letters = np.array([w[-1] - 1 for w in words if w])
    state = np.zeros(len(words), dtype=complex)
    state[index[()]] = 1.0

    for seg in path.segments:
        fs = [form.coefficient(seg) for form in forms]

        def rhs(s, y):
            vals = np.array([f(s) for f in fs])
            out = np.zeros_like(y)
            out[targets] = vals[letters] * y[parents]
            return out

        sol = solve_ivp(rhs, (0.0, 1.0), state, method="DOP853", rtol=tol, atol=tol)
        if not sol.success:
            raise ChenError(f"transport failed: {sol.message}")
        state = sol.y[:, -1]
    return ChenState(NCSeries(ctx, {w: complex(state[k]) for k, w in enumerate(words)}))


def iterated_integral(path: Path, forms, tol=1e-10, pole_margin=1e-6) -> complex:
    """Iterated integral of the ordered tuple of forms along the path.

    Realized with one letter per slot, so repeated forms are fine.
    """
    n = len(forms)
    ctx = TruncationContext(n, n)
    state = chen_transport(path, forms, ctx, tol=tol, pole_margin=pole_margin)
    return state.coeff(tuple(range(1, n + 1)))


def word_path(loops: dict, w: Word, tol_join=1e-9) -> Path:
    """Concatenate the loops named by the letters of w; inverse = reversal."""
    base = None
    for g, p in loops.items():
        if not p.closed:
            raise ChenError(f"loop {g} is not closed")
        if base is None:
            base = p.start
        elif _dist(base, p.start) > tol_join:
            raise ChenError(f"loop {g} based at {p.start}, expected {base}")
    if not w.letters:
        return Path.constant(base if base is not None else (0.0, 0.0))
    segs = []
    for a in w.letters:
        p = loops[abs(a)]
        segs.extend(p.segments if a > 0 else p.reversed().segments)
    return Path(segs, closed=True, tol_join=tol_join)


def fiber_check(path: Path, F: Poly2, t0, samples=200) -> float:
    """Sampled sup of |F(path(s)) - t0| over the whole path."""
    s = np.linspace(0.0, 1.0, samples)
    worst = 0.0
    for seg in path.segments:
        x, y = seg.x(s), seg.y(s)
        worst = max(worst, float(np.max(np.abs(F(x, y) - t0))))
    return worst
