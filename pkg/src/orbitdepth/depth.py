"""Orbit-depth invariants of a loop under monodromy.

Builds the span of logs of the monodromy orbit inside the free nilpotent
Lie algebra, closes it into the smallest monodromy-invariant Lie ideal N1,
forms N0 = [N1, g], and reads off the torsion-free depth k from graded
containments.  The integral variant accumulates lattices of logs of actual
group words and certifies the depth with Smith-normal-form torsion data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import words as wd
from .words import Word, GroupMap, apply_map
from .series import NCSeries, TruncationContext, bracket, log, magnus, log_magnus
from .lyndon import lyndon_index, lyndon_bracketing
from .echelon import SparseEchelon
from .lattices import GradedLattice, torsion_invariants, LatticeError


class DepthError(ValueError):
    pass


class ResourceLimit(RuntimeError):
    pass


# -- problem instances -----------------------------------------------------


@dataclass
class ProblemInstance:
    rank: int
    gamma: Word | None = None
    monodromy: list[GroupMap] = field(default_factory=list)
    orbit_generators: list[Word] = field(default_factory=list)
    kmax: int = 6
    mode: str = "both"  # rational | integral | both

    def __post_init__(self):
        if bool(self.monodromy) == bool(self.orbit_generators):
            raise DepthError("exactly one of monodromy / orbit_generators must be nonempty")
        if self.monodromy and self.gamma is None:
            raise DepthError("monodromy mode needs gamma")
        if self.kmax < 2:
            raise DepthError("kmax must be >= 2")
        if self.mode not in ("rational", "integral", "both"):
            raise DepthError(f"unknown mode {self.mode!r}")

    @classmethod
    def from_json(cls, data: dict) -> "ProblemInstance":
        rank = data["rank"]
        gamma = wd.reduce(data["gamma"], rank) if data.get("gamma") is not None else None
        mono = [
            GroupMap(rank, tuple(wd.reduce(img, rank) for img in m["images"]))
            for m in data.get("monodromy", [])
        ]
        gens = [wd.reduce(g, rank) for g in data.get("orbit_generators", [])]
        return cls(
            rank=rank,
            gamma=gamma,
            monodromy=mono,
            orbit_generators=gens,
            kmax=data.get("kmax", 6),
            mode=data.get("mode", "both"),
        )

    def to_json(self) -> dict:
        out = {"rank": self.rank, "kmax": self.kmax, "mode": self.mode}
        if self.gamma is not None:
            out["gamma"] = self.gamma.to_json()
        if self.monodromy:
            out["monodromy"] = [{"images": [w.to_json() for w in m.images]} for m in self.monodromy]
        if self.orbit_generators:
            out["orbit_generators"] = [g.to_json() for g in self.orbit_generators]
        return out


def conjugate_instance(inst: ProblemInstance, sigma: Word) -> ProblemInstance:
    """Conjugate the whole instance by sigma; the depth report must not change."""
    conj = lambda w: wd.conjugate(w, sigma)
    mono = []
    for m in inst.monodromy:
        images = tuple(
            conj(apply_map(m, wd.conjugate(wd.generator(i, inst.rank), wd.inv(sigma))))
            for i in range(1, inst.rank + 1)
        )
        mono.append(GroupMap(inst.rank, images))
    return ProblemInstance(
        rank=inst.rank,
        gamma=conj(inst.gamma) if inst.gamma is not None else None,
        monodromy=mono,
        orbit_generators=[conj(g) for g in inst.orbit_generators],
        kmax=inst.kmax,
        mode=inst.mode,
    )


# -- truncated group arithmetic on series ----------------------------------


def series_inverse(s: NCSeries) -> NCSeries:
    """(1 + x)^-1 as a truncated Neumann series."""
    if s.constant_term() != 1:
        raise DepthError("series inverse needs constant term 1")
    x = s.without_constant()
    out = NCSeries.one(s.ctx)
    power = NCSeries.one(s.ctx)
    sign = 1
    for _ in range(s.ctx.degree):
        power = power * x
        sign = -sign
        if power.is_zero():
            break
        out = out + power.scale(sign)
    return out


class GroupElement:
    """A free-group word paired with its Magnus series, multiplied as series.

    Keeps commutator words cheap: the series of [a, b] costs a few truncated
    products instead of re-expanding a word that doubled in length.
    """

    __slots__ = ("word", "series")

    def __init__(self, word: Word, series: NCSeries):
        self.word = word
        self.series = series

    @classmethod
    def from_word(cls, w: Word, ctx: TruncationContext) -> "GroupElement":
        return cls(w, magnus(w, ctx))

    def mul(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(wd.mul(self.word, other.word), self.series * other.series)

    def inv(self) -> "GroupElement":
        return GroupElement(wd.inv(self.word), series_inverse(self.series))

    def comm(self, other: "GroupElement") -> "GroupElement":
        return self.inv().mul(other.inv()).mul(self).mul(other)

    def log(self) -> NCSeries:
        return log(self.series)


class MappedGenerators:
    """Magnus series of generator images under a group map, with inverses."""

    def __init__(self, m: GroupMap, ctx: TruncationContext):
        self.m = m
        self.ctx = ctx
        self._img = {}
        for i in range(1, m.rank + 1):
            s = magnus(m.images[i - 1], ctx)
            self._img[i] = s
            self._img[-i] = series_inverse(s)

    def apply(self, g: GroupElement) -> GroupElement:
        out = NCSeries.one(self.ctx)
        for a in g.word.letters:
            out = out * self._img[a]
        return GroupElement(apply_map(self.m, g.word), out)


# -- Lie spans in Lyndon coordinates ---------------------------------------


class LieSpan:
    """Echelonized Q-span of Lie elements in flat Lyndon coordinates."""

    def __init__(self, ctx: TruncationContext):
        self.ctx = ctx
        self.idx = lyndon_index(ctx.rank, ctx.degree)
        self._ech = SparseEchelon()

    @property
    def dim(self):
        return len(self._ech)

    def copy(self):
        out = LieSpan(self.ctx)
        out._ech = self._ech.copy()
        return out

    def add_vec(self, vec: dict) -> bool:
        return self._ech.add(vec)

    def add_series(self, s: NCSeries) -> bool:
        return self.add_vec(self.idx.vector(s))

    def contains_vec(self, vec: dict) -> bool:
        return self._ech.contains(vec)

    def row_vecs(self):
        return [dict(r) for r in self._ech.rows]

    def leading_dim(self, d: int) -> int:
        return sum(1 for p in self._ech._pivots if self.idx.degree_of(p) == d)

    def leading_vecs(self, d: int) -> list[dict]:
        """Degree-d projections of rows with leading degree d."""
        sl = self.idx.degree_slice(d)
        lo, hi = sl.start, sl.stop
        out = []
        for piv, row in zip(self._ech._pivots, self._ech.rows):
            if self.idx.degree_of(piv) == d:
                out.append({k: c for k, c in row.items() if lo <= k < hi})
        return out

    def contains_span(self, other: "LieSpan") -> bool:
        return all(self.contains_vec(r) for r in other._ech.rows)


@lru_cache(maxsize=None)
def _ad_column(rank: int, degree: int, lyndon_i: int, gen: int):
    """Lyndon coordinates of [P_l, X_gen], cached per context."""
    idx = lyndon_index(rank, degree)
    ctx = idx.ctx
    p = lyndon_bracketing(idx.words[lyndon_i], ctx)
    return tuple(sorted(idx.vector(bracket(p, NCSeries.gen(ctx, gen))).items()))


def ad_generator(vec: dict, gen: int, ctx: TruncationContext) -> dict:
    """[v, X_gen] in Lyndon coordinates."""
    out = {}
    for i, c in vec.items():
        for j, a in _ad_column(ctx.rank, ctx.degree, i, gen):
            s = out.get(j, 0) + c * a
            if s == 0:
                out.pop(j, None)
            else:
                out[j] = s
    return out


class InducedLieMap:
    """Filtered linear endomorphism of the free nilpotent Lie algebra induced
    by a group endomorphism: X_i -> log(magnus(m(x_i))), extended by brackets."""

    def __init__(self, m: GroupMap, ctx: TruncationContext):
        if m.rank != ctx.rank:
            raise DepthError("rank mismatch")
        self.m = m
        self.ctx = ctx
        self.idx = lyndon_index(ctx.rank, ctx.degree)
        self._image_series: dict[tuple, NCSeries] = {}
        self._cols: dict[int, dict] = {}

    def _series_for(self, w: tuple) -> NCSeries:
        s = self._image_series.get(w)
        if s is None:
            if len(w) == 1:
                s = log_magnus(self.m.images[w[0] - 1], self.ctx)
            else:
                from .lyndon import standard_factorization

                u, v = standard_factorization(w)
                s = bracket(self._series_for(u), self._series_for(v))
            self._image_series[w] = s
        return s

    def column(self, i: int) -> dict:
        col = self._cols.get(i)
        if col is None:
            col = self.idx.vector(self._series_for(self.idx.words[i]))
            self._cols[i] = col
        return col

    def apply_vec(self, vec: dict) -> dict:
        out = {}
        for i, c in vec.items():
            for j, a in self.column(i).items():
                s = out.get(j, 0) + c * a
                if s == 0:
                    out.pop(j, None)
                else:
                    out[j] = s
        return out

    def apply_series(self, s: NCSeries) -> NCSeries:
        return self.idx.series(self.apply_vec(self.idx.vector(s)))


# -- span construction -----------------------------------------------------


def orbit_span(inst: ProblemInstance, ctx: TruncationContext):
    """Span of logs of the saturated monodromy orbit of gamma.

    Saturation runs over actual group words (BFS, FIFO) and keeps the words
    whose logs grow the span, so the witnesses are genuine orbit elements
    usable by the integral certificate.  Returns (span, witnesses).
    """
    span = LieSpan(ctx)
    witnesses: list[GroupElement] = []
    if inst.orbit_generators:
        for g in inst.orbit_generators:
            ge = GroupElement.from_word(g, ctx)
            if span.add_series(ge.log()):
                witnesses.append(ge)
        return span, witnesses
    mapped = [MappedGenerators(m, ctx) for m in inst.monodromy]
    start = GroupElement.from_word(inst.gamma, ctx)
    queue = []
    if span.add_series(start.log()):
        witnesses.append(start)
        queue.append(start)
    seen = {start.word.letters}
    while queue:
        g = queue.pop(0)
        for mm in mapped:
            img = mm.apply(g)
            if img.word.letters in seen:
                continue
            seen.add(img.word.letters)
            if span.add_series(img.log()):
                witnesses.append(img)
                queue.append(img)
    return span, witnesses


def ideal_closure(V: LieSpan, maps: list[InducedLieMap], ctx: TruncationContext) -> LieSpan:
    """Smallest subspace containing V closed under [., X_i] and every map."""
    out = V.copy()
    changed = True
    while changed:
        changed = False
        for row in out.row_vecs():
            for i in range(1, ctx.rank + 1):
                if out.add_vec(ad_generator(row, i, ctx)):
                    changed = True
            for mp in maps:
                if out.add_vec(mp.apply_vec(row)):
                    changed = True
    return out


def n_zero(N1: LieSpan, maps: list[InducedLieMap], ctx: TruncationContext) -> LieSpan:
    """N0 = [N1, g], re-closed under brackets and monodromy (a no-op check)."""
    out = LieSpan(ctx)
    for row in N1.row_vecs():
        for i in range(1, ctx.rank + 1):
            out.add_vec(ad_generator(row, i, ctx))
    return ideal_closure(out, maps, ctx)


# -- reports ---------------------------------------------------------------


@dataclass
class GradeInfo:
    grade: int
    dim_orbit: int  # dim leading_space(N1, grade)
    dim_commutator: int  # dim leading_space(N0, grade)
    dim_image: int  # graded piece of the orbit homology
    contained: bool  # leading space of N1 absorbed by N0 at this grade
    orbit_lattice_rank: int | None = None
    commutator_lattice_rank: int | None = None
    lattice_contained: bool | None = None
    torsion: list[int] | None = None

    def to_json(self):
        out = {
            "grade": self.grade,
            "dim_orbit": self.dim_orbit,
            "dim_commutator": self.dim_commutator,
            "dim_image": self.dim_image,
            "contained": self.contained,
        }
        if self.orbit_lattice_rank is not None:
            out["orbit_lattice_rank"] = self.orbit_lattice_rank
            out["commutator_lattice_rank"] = self.commutator_lattice_rank
            out["lattice_contained"] = self.lattice_contained
            out["torsion"] = self.torsion
        return out


@dataclass
class DepthReport:
    kmax: int
    mode: str
    k: int | None
    kappa_graded: int | None
    grades: list[GradeInfo]
    stabilized: bool
    ch1_dim: int

    def k_label(self):
        # grades above kmax are outside the truncation window
        return self.k if self.k is not None else f"undetermined(>{self.kmax - 1})"

    def kappa_label(self):
        if self.mode == "rational":
            return None
        return (
            self.kappa_graded
            if self.kappa_graded is not None
            else f"undetermined(>{self.kmax - 1})"
        )

    def graded_dims(self) -> tuple[int, ...]:
        return tuple(g.dim_image for g in self.grades)

    def to_json(self):
        return {
            "schema": "orbitdepth/depth-report/v1",
            "kmax": self.kmax,
            "mode": self.mode,
            "k": self.k_label(),
            "kappa_certificate": self.kappa_label(),
            "stabilized": self.stabilized,
            "ch1_dim": self.ch1_dim,
            "grades": [g.to_json() for g in self.grades],
        }

    def table(self) -> str:
        lines = [
            f"torsion-free depth k        : {self.k_label()}",
        ]
        if self.mode != "rational":
            lines.append(f"graded certificate (kappa)  : {self.kappa_label()}")
        lines += [
            f"dim CH1(orbit) (truncated)  : {self.ch1_dim}",
            f"containment stabilized      : {self.stabilized}",
            "",
            "grade  dim N1  dim N0  dim Im phi  contained" + ("  torsion" if self.mode != "rational" else ""),
        ]
        for g in self.grades:
            row = f"{g.grade:5d}  {g.dim_orbit:6d}  {g.dim_commutator:6d}  {g.dim_image:10d}  {str(g.contained):>9s}"
            if self.mode != "rational":
                row += f"  {g.torsion if g.torsion is not None else '-'}"
            lines.append(row)
        return "\n".join(lines)


def _vec_contained(sub_rows: list[dict], vecs: list[dict]) -> bool:
    ech = SparseEchelon()
    for r in sub_rows:
        ech.add(dict(r))
    return all(ech.contains(dict(v)) for v in vecs)


def depth(N1: LieSpan, N0: LieSpan, kmax: int) -> tuple[int | None, list[GradeInfo], bool]:
    """Rational depth from the graded leading spaces of N1 and N0.

    k is the least j with leading_space(N0, j+1) containing
    leading_space(N1, j+1); grades beyond the truncation window stay unseen,
    so j ranges over 1..kmax-1.
    """
    if not N1.contains_span(N0):
        raise DepthError("internal closure bug: N0 not inside N1")
    grades = []
    for g in range(1, kmax + 1):
        n1 = N1.leading_vecs(g)
        n0 = N0.leading_vecs(g)
        contained = _vec_contained(n0, n1)
        grades.append(
            GradeInfo(
                grade=g,
                dim_orbit=len(n1),
                dim_commutator=len(n0),
                dim_image=len(n1) - len(n0),
                contained=contained,
            )
        )
    k = None
    for j in range(1, kmax):
        if grades[j].contained:  # grades[j] is grade j+1
            k = j
            break
    stabilized = k is not None and all(grades[j].contained for j in range(k, kmax))
    return k, grades, stabilized


# -- integral certificate --------------------------------------------------


def _leading(vec: dict, idx) -> tuple[int, dict] | None:
    if not vec:
        return None
    d = idx.degree_of(min(vec))
    sl = idx.degree_slice(d)
    lead = {k - sl.start: c for k, c in vec.items() if sl.start <= k < sl.stop}
    return d, lead


def _dense(lead: dict, n: int) -> list[Fraction]:
    return [lead.get(i, Fraction(0)) for i in range(n)]


class _LatticeBuilder:
    def __init__(self, idx):
        self.idx = idx
        self.lattices = {
            d: GradedLattice(d, idx.dim(d)) for d in range(1, idx.ctx.degree + 1)
        }

    def add(self, vec: dict) -> bool:
        led = _leading(vec, self.idx)
        if led is None:
            return False
        d, lead = led
        return self.lattices[d].add(_dense(lead, self.idx.dim(d)))


def integral_lattices(inst: ProblemInstance, ctx: TruncationContext, witnesses):
    """Graded lattices of leading log-coordinates of orbit and commutator words.

    Word saturation keeps only words that refine some lattice; leading
    coordinates of discarded words are integer combinations of kept ones, so
    their commutator descendants are covered at the graded level (this is what
    makes the result a certificate rather than the group-level invariant).
    """
    idx = lyndon_index(ctx.rank, ctx.degree)
    mapped = [MappedGenerators(m, ctx) for m in inst.monodromy]
    gens = [GroupElement.from_word(wd.generator(i, ctx.rank), ctx) for i in range(1, ctx.rank + 1)]
    gens += [g.inv() for g in gens]

    orbit_lat = _LatticeBuilder(idx)
    comm_lat = _LatticeBuilder(idx)

    def logvec(g: GroupElement) -> dict:
        return idx.vector(log(g.series))

    def at_ceiling(v: dict) -> bool:
        # commutators of such words only contribute beyond the truncation
        led = _leading(v, idx)
        return led is None or led[0] >= ctx.degree

    active_orbit = []
    for g in witnesses:
        if orbit_lat.add(logvec(g)):
            active_orbit.append(g)
    frontier_o = [(g, logvec(g)) for g in active_orbit]
    frontier_k: list = []
    while frontier_o or frontier_k:
        new_o, new_k = [], []
        for g, gv in frontier_o:
            for mm in mapped:
                img = mm.apply(g)
                v = logvec(img)
                if orbit_lat.add(v):
                    new_o.append((img, v))
            if at_ceiling(gv):
                continue
            for x in gens:
                c = g.comm(x)
                v = logvec(c)
                # commutator words lie in the orbit too
                if comm_lat.add(v) | orbit_lat.add(v):
                    new_k.append((c, v))
        for g, gv in frontier_k:
            for mm in mapped:
                img = mm.apply(g)
                v = logvec(img)
                if comm_lat.add(v) | orbit_lat.add(v):
                    new_k.append((img, v))
            if at_ceiling(gv):
                continue
            for x in gens:
                c = g.comm(x)
                v = logvec(c)
                if comm_lat.add(v) | orbit_lat.add(v):
                    new_k.append((c, v))
        frontier_o, frontier_k = new_o, new_k
    return orbit_lat.lattices, comm_lat.lattices


def _annotate_integral(grades, orbit_lats, comm_lats, kmax):
    kappa = None
    for gi in grades:
        d = gi.grade
        ol, cl = orbit_lats[d], comm_lats[d]
        gi.orbit_lattice_rank = ol.rank
        gi.commutator_lattice_rank = cl.rank
        gi.lattice_contained = cl.contains_lattice(ol)
        try:
            gi.torsion = torsion_invariants(cl, ol)
        except LatticeError:
            gi.torsion = None
    for j in range(1, kmax):
        if grades[j].lattice_contained:
            kappa = j
            break
    return kappa


# -- top-level computation -------------------------------------------------


def compute_depth(inst: ProblemInstance) -> DepthReport:
    ctx = TruncationContext(inst.rank, inst.kmax)
    maps = [InducedLieMap(m, ctx) for m in inst.monodromy]
    V, witnesses = orbit_span(inst, ctx)
    N1 = ideal_closure(V, maps, ctx)
    N0 = n_zero(N1, maps, ctx)
    k, grades, stabilized = depth(N1, N0, inst.kmax)
    kappa = None
    if inst.mode in ("integral", "both"):
        orbit_lats, comm_lats = integral_lattices(inst, ctx, witnesses)
        kappa = _annotate_integral(grades, orbit_lats, comm_lats, inst.kmax)
    ch1 = sum(g.dim_image for g in grades)
    return DepthReport(
        kmax=inst.kmax,
        mode=inst.mode,
        k=k,
        kappa_graded=kappa,
        grades=grades,
        stabilized=stabilized,
        ch1_dim=ch1,
    )


# -- brute-force oracle ----------------------------------------------------


def brute_force_ch1(
    inst: ProblemInstance,
    word_length: int,
    nil_class: int,
    max_words: int = 600,
) -> tuple[int, ...]:
    """Graded dimensions of the orbit homology by plain word enumeration.

    Independent of the Lie-ideal machinery: enumerates genuine orbit words
    (conjugates and products of monodromy images, up to the given reduced
    length), spans their logs in word coordinates, and subtracts the span of
    commutator-word logs grade by grade.  Desk scale only; raises
    ResourceLimit when the enumeration exceeds max_words.
    """
    from .echelon import FilteredSubspace

    ctx = TruncationContext(inst.rank, nil_class)
    gens = [wd.generator(i, inst.rank) for i in range(1, inst.rank + 1)]
    gens += [wd.inv(g) for g in gens]
    # all reduced words of length <= 2: conjugators and commutator partners
    short = [wd.identity(inst.rank)] + gens
    short += [w for w in (wd.mul(a, b) for a in gens for b in gens) if len(w) == 2]

    # seed: orbit generators or the monodromy orbit of gamma
    seeds = list(inst.orbit_generators)
    if inst.monodromy:
        seen = {inst.gamma.letters}
        queue = [inst.gamma]
        while queue:
            w = queue.pop(0)
            for m in inst.monodromy:
                img = apply_map(m, w)
                if img.letters not in seen and len(img) <= word_length:
                    seen.add(img.letters)
                    queue.append(img)
            if len(seen) > max_words:
                raise ResourceLimit(f"monodromy orbit exceeded {max_words} words")
        seeds = [Word(ls, inst.rank) for ls in sorted(seen, key=lambda l: (len(l), l))]

    # normal closure at desk scale: conjugates by short words, one product pass
    orbit = set()
    for s in seeds:
        for u in short:
            for w in (s, wd.inv(s)):
                ww = wd.conjugate(w, u)
                if 0 < len(ww) <= word_length:
                    orbit.add(ww.letters)
    base = sorted(orbit, key=lambda l: (len(l), l))
    for a in base:
        for b in base:
            p = wd.reduce(a + b, inst.rank)
            if 0 < len(p) <= word_length:
                orbit.add(p.letters)
    orbit_words = [Word(ls, inst.rank) for ls in sorted(orbit, key=lambda l: (len(l), l))]
    if len(orbit_words) > max_words:
        orbit_words = orbit_words[:max_words]

    o_span = FilteredSubspace(ctx)
    for w in orbit_words:
        o_span.add(log_magnus(w, ctx))
    k_span = FilteredSubspace(ctx)
    for w in orbit_words:
        for u in short:
            if u.is_identity():
                continue
            k_span.add(log_magnus(wd.comm(w, u), ctx))
    dims = []
    for d in range(1, nil_class + 1):
        dims.append(len(o_span.leading_space(d)) - len(k_span.leading_space(d)))
    return tuple(dims)
