"""Bundled fixtures: depth instances with known answers and numeric setups.

Depth instances are plain JSON dicts (the CLI input format).  Numeric
fixtures return constructed objects.  Fixtures whose defining data would
have to be taken from the literature are placeholders that raise with a
provenance message instead of shipping unverifiable numbers.
"""

from __future__ import annotations

import numpy as np

from .chen import Poly2, OneForm, Path, _pinned_segment
from .melnikov import PlanarSystem, TransversalSpec, M2Construction


class FixtureUnavailable(RuntimeError):
    pass


# -- depth instances -------------------------------------------------------

# x1 maps to x1*x2 under the only monodromy map: the orbit of x1 spans two
# independent degree-1 directions, so everything dies at the first grade.
GENERIC_INSTANCE = {
    "rank": 2,
    "gamma": [1],
    "monodromy": [{"images": [[1, 2], [2]]}],
    "kmax": 6,
    "mode": "both",
}

# orbit generated by two of three generators: a corank-one situation
CODIM1_INSTANCE = {
    "rank": 3,
    "orbit_generators": [[1], [2]],
    "kmax": 6,
    "mode": "both",
}

# gamma = [x1, x2] with trivial monodromy: the orbit sits in depth two
COMMUTATOR_ORBIT_INSTANCE = {
    "rank": 2,
    "gamma": [-1, -2, 1, 2],
    "monodromy": [{"images": [[1], [2]]}],
    "kmax": 6,
    "mode": "both",
}

# small extras used by the enumeration-oracle comparison
SINGLE_GENERATOR_INSTANCE = {
    "rank": 2,
    "orbit_generators": [[1]],
    "kmax": 4,
    "mode": "both",
}

SWAP_MONODROMY_INSTANCE = {
    "rank": 2,
    "gamma": [1],
    "monodromy": [{"images": [[2], [1]]}],
    "kmax": 4,
    "mode": "both",
}

DEPTH_INSTANCES = {
    "generic": (GENERIC_INSTANCE, {"k": 1}),
    "codim1": (CODIM1_INSTANCE, {"k": 1}),
    "commutator-orbit": (COMMUTATOR_ORBIT_INSTANCE, {"k": 2}),
    "single-generator": (SINGLE_GENERATOR_INSTANCE, {"k": 1}),
    "swap-monodromy": (SWAP_MONODROMY_INSTANCE, {"k": 1}),
}


# -- numeric fixtures ------------------------------------------------------


def harmonic():
    """F = (x^2+y^2)/2 perturbed by -y dx; M1(t) = 2 pi t."""
    F = Poly2({(2, 0): 0.5, (0, 2): 0.5})
    eta = OneForm(Poly2({(0, 1): -1.0}), Poly2())
    system = PlanarSystem(F, {1: eta})
    tau = TransversalSpec((0.0, 0.0), (1.0, 0.0))
    return system, tau


def harmonic_xdy():
    """Same oscillator perturbed by x dy; M1(t) = 2 pi t as well."""
    F = Poly2({(2, 0): 0.5, (0, 2): 0.5})
    eta = OneForm(Poly2(), Poly2({(1, 0): 1.0}))
    return PlanarSystem(F, {1: eta}), TransversalSpec((0.0, 0.0), (1.0, 0.0))


def elliptic():
    """F = (x^2 + 2 y^2)/2 perturbed by -y dx; orbits are ellipses."""
    F = Poly2({(2, 0): 0.5, (0, 2): 1.0})
    eta = OneForm(Poly2({(0, 1): -1.0}), Poly2())
    return PlanarSystem(F, {1: eta}), TransversalSpec((0.0, 0.0), (1.0, 0.0))


def elliptic_orbit_path(t, nseg=16, deg=11):
    """Flow-oriented orbit of the elliptic oscillator at level t."""
    a, b = np.sqrt(2.0 * t), np.sqrt(t)
    segs = []
    for k in range(nseg):
        th0 = -2.0 * np.pi * k / nseg
        dth = -2.0 * np.pi / nseg
        s = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1)) * 0.5 + 0.5
        th = th0 + dth * s
        fx = np.polynomial.polynomial.polyfit(s, a * np.cos(th), deg)
        fy = np.polynomial.polynomial.polyfit(s, b * np.sin(th), deg)
        segs.append(
            _pinned_segment(
                fx, fy,
                (a * np.cos(th0), b * np.sin(th0)),
                (a * np.cos(th0 + dth), b * np.sin(th0 + dth)),
            )
        )
    return Path(segs, closed=True)


def circle_orbit_path(t, ccw=False):
    """Orbit of the circular oscillator at level t, flow-oriented (clockwise)."""
    return Path.circle(radius=np.sqrt(2.0 * t), ccw=ccw)


def residue_plane():
    """Dual residue forms and loops on the plane punctured at x = 0 and x = 1.

    Both loops are counterclockwise squares based at (1/2, 0); the form
    eta_i has residue 1 at its puncture and 0 at the other.
    """
    inv2pi = 1.0 / (2.0j * np.pi)
    eta0 = OneForm(Poly2.constant(inv2pi), Poly2(), Poly2.x())
    eta1 = OneForm(Poly2.constant(inv2pi), Poly2(), Poly2({(1, 0): 1.0, (0, 0): -1.0}))
    g0 = Path.polyline(
        [(0.5, 0), (0.5 + 0.5j, 0), (-0.5 + 0.5j, 0), (-0.5 - 0.5j, 0), (0.5 - 0.5j, 0), (0.5, 0)],
        closed=True,
    )
    g1 = Path.polyline(
        [(0.5, 0), (0.5 - 0.5j, 0), (1.5 - 0.5j, 0), (1.5 + 0.5j, 0), (0.5 + 0.5j, 0), (0.5, 0)],
        closed=True,
    )
    return [eta0, eta1], {1: g0, 2: g1}


def m2_fixture(t0=0.4, lam=1.0):
    """Zero-period pair on the circular oscillator: displacement starts at eps^2.

    Theta1 = x^2 dy and Theta2 = y^2 dx both have vanishing periods on every
    circle, so the assembled form has M1 = 0 and the eps^2 coefficient is
    predicted by the length-two iterated integral.
    """
    F = Poly2({(2, 0): 0.5, (0, 2): 0.5})
    th1 = OneForm(Poly2(), Poly2({(2, 0): 1.0}))
    th2 = OneForm(Poly2({(0, 2): 1.0}), Poly2())
    con = M2Construction(th1, th2, F, t0=t0, lam=lam, path_factory=circle_orbit_path)
    tau = TransversalSpec((0.0, 0.0), (1.0, 0.0))
    return con, tau


def triangle():
    """Cubic-level-curve instance expected to have depth two.

    The defining monodromy data (braid action on a loop basis of the fiber)
    is not bundled: it would have to be transcribed from published monodromy
    computations for this polynomial, and shipping unverified numbers would
    let the fixture pass silently with wrong data.
    """
    raise FixtureUnavailable(
        "triangle fixture requires literature-derived monodromy data "
        "(braid action on a fiber loop basis for F = y*(x^2-(y-3)^2)); "
        "expected depth k = 2 once supplied"
    )


def lines_product():
    """Product-of-lines instance; forms eta_i = F * d f_i / f_i.

    Placeholder for the same reason as the triangle fixture: the monodromy
    presentation must come from the literature.
    """
    raise FixtureUnavailable(
        "lines-product fixture requires literature-derived monodromy data "
        "(line arrangement fundamental group action); forms are "
        "eta_i = F * d f_i / f_i for the line factors f_i"
    )


def fixture_listing():
    """Stable description of every bundled fixture, for the CLI."""
    return [
        {"name": "generic", "kind": "depth", "expected": "k=1, kappa=1", "status": "ready"},
        {"name": "codim1", "kind": "depth", "expected": "k=1, kappa=1", "status": "ready"},
        {"name": "commutator-orbit", "kind": "depth", "expected": "k=2, kappa=2", "status": "ready"},
        {"name": "single-generator", "kind": "depth", "expected": "k=1", "status": "ready"},
        {"name": "swap-monodromy", "kind": "depth", "expected": "k=1", "status": "ready"},
        {"name": "harmonic", "kind": "melnikov", "expected": "M1(t) = 2*pi*t", "status": "ready"},
        {"name": "residue-plane", "kind": "chen", "expected": "commutator pairing = 1", "status": "ready"},
        {"name": "m2-fixture", "kind": "melnikov", "expected": "eps^2 coefficient = int omega omega'", "status": "ready"},
        {"name": "triangle", "kind": "depth", "expected": "k=2",
         "status": "requires literature-derived monodromy data"},
        {"name": "lines-product", "kind": "depth", "expected": "forms eta_i = F*d f_i/f_i",
         "status": "requires literature-derived monodromy data"},
    ]
