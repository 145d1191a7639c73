"""Disc configurations with framings, gluing, and signed composition.

A configuration is a list of disjoint closed sub-discs of the open unit
disc (one exception: the identity configuration, a single disc of radius
one at the origin).  Gluing inserts a rescaled, rotated copy of a second
configuration into a chosen slot; rotations come from per-disc framings
in Q/Z.  Slots are numbered from 1, matching the composition law

    phi(x_1..x_m) = (-1)^((|phi1| + |x_1| + .. + |x_{i1-1}|) |phi2|)
                    phi1(x_1, .., phi2(x_{i1}, ..), ..)

for multilinear operations on a small graded space.

Geometry is exact over the rationals when every rotation is a quarter
turn; any other framing forces float mode, where predicates use a 1e-9
tolerance.  A one-parameter rotating family (the marked point running
around a circle) has no single-configuration representation and is out of
this module's range.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, ZConflict

EPS = 1e-9

QUARTER_UNITS = {
    Fraction(0): (Fraction(1), Fraction(0)),
    Fraction(1, 4): (Fraction(0), Fraction(1)),
    Fraction(1, 2): (Fraction(-1), Fraction(0)),
    Fraction(3, 4): (Fraction(0), Fraction(-1)),
}


def _num(x, exact: bool):
    if exact:
        if isinstance(x, float):
            raise ValueError("float coordinate in exact mode")
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class Disc:
    re: Fraction | float
    im: Fraction | float
    radius: Fraction | float


@dataclass
class DiscConfiguration:
    """Indexed sub-discs, optional framings (in Q/Z) and marked point."""

    points: list[Disc]
    framings: list[Fraction] | None = None
    z_point: tuple | None = None
    is_identity: bool = False
    exact: bool = True

    def __post_init__(self):
        self.points = [Disc(_num(d.re, self.exact), _num(d.im, self.exact),
                            _num(d.radius, self.exact)) for d in self.points]
        if self.framings is not None:
            self.framings = [Fraction(t) % 1 for t in self.framings]
            if len(self.framings) != len(self.points):
                raise ValueError("one framing per disc")
        if self.z_point is not None:
            self.z_point = (_num(self.z_point[0], self.exact),
                            _num(self.z_point[1], self.exact))

    @classmethod
    def identity(cls) -> "DiscConfiguration":
        return cls(points=[Disc(Fraction(0), Fraction(0), Fraction(1))],
                   is_identity=True)

    def framing(self, slot: int) -> Fraction:
        if self.framings is None:
            return Fraction(0)
        return self.framings[slot - 1]

    def arity(self) -> int:
        return len(self.points)

    @classmethod
    def from_json(cls, data: dict) -> "DiscConfiguration":
        exact = data.get("mode", "exact") == "exact"
        conv = Fraction if exact else float
        try:
            points = [Disc(conv(p["re"]), conv(p["im"]), conv(p["r"]))
                      for p in data.get("points", [])]
            framings = None
            if "framings" in data:
                framings = [Fraction(t) for t in data["framings"]]
            z = None
            if data.get("z") is not None:
                z = (conv(data["z"]["re"]), conv(data["z"]["im"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad configuration: {exc}") from exc
        return cls(points=points, framings=framings, z_point=z,
                   is_identity=bool(data.get("identity", False)), exact=exact)

    def to_json(self) -> dict:
        out = {
            "mode": "exact" if self.exact else "float",
            "points": [{"re": str(p.re), "im": str(p.im), "r": str(p.radius)}
                       for p in self.points],
        }
        if self.framings is not None:
            out["framings"] = [str(t) for t in self.framings]
        if self.z_point is not None:
            out["z"] = {"re": str(self.z_point[0]), "im": str(self.z_point[1])}
        if self.is_identity:
            out["identity"] = True
        return out


def _abs2(re, im):
    return re * re + im * im


def validate(config: DiscConfiguration, eps: float = EPS) -> tuple[bool, list[str]]:
    """Check disjointness, containment, marked-point placement, and the
    framing restriction on the identity configuration."""
    problems: list[str] = []
    pts = config.points
    exact = config.exact

    def le(a, b):  # a <= b with tolerance in float mode
        return a <= b if exact else a <= b + eps

    def lt(a, b):
        return a < b if exact else a < b + eps

    if config.is_identity:
        ok = (len(pts) == 1 and pts[0].re == 0 and pts[0].im == 0
              and pts[0].radius == 1)
        if not ok:
            problems.append("identity flag requires a single unit disc at 0")
        if config.framings is not None and any(t != 0 for t in config.framings):
            problems.append("identity configuration carries only the trivial framing")
        if config.z_point is not None:
            # only the boundary circle remains outside the disc's interior
            r2 = _abs2(*config.z_point)
            on_circle = r2 == 1 if exact else abs(r2 - 1) < eps
            if not on_circle:
                problems.append("marked point of the identity configuration "
                                "must lie on the unit circle")
        return not problems, problems

    for i, p in enumerate(pts, start=1):
        if p.radius <= 0:
            problems.append(f"disc {i}: radius must be positive")
            continue
        # closed disc inside the open unit disc: |center| + r < 1
        if not lt(p.radius, 1) or not lt(_abs2(p.re, p.im), (1 - p.radius) ** 2):
            problems.append(f"disc {i}: not contained in the open unit disc")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            a, b = pts[i], pts[j]
            dist2 = _abs2(a.re - b.re, a.im - b.im)
            rsum = a.radius + b.radius
            if not (dist2 > rsum * rsum if exact else dist2 > rsum * rsum - eps):
                problems.append(f"discs {i+1} and {j+1} overlap")
    if config.z_point is not None:
        zr, zi = config.z_point
        if not le(_abs2(zr, zi), 1):
            problems.append("marked point outside the closed unit disc")
        for i, p in enumerate(pts, start=1):
            if (_abs2(zr - p.re, zi - p.im) < p.radius ** 2 if exact
                    else _abs2(zr - p.re, zi - p.im) < p.radius ** 2 - eps):
                problems.append(f"marked point inside disc {i}")
    return not problems, problems


def rotation_unit(tau: Fraction, exact: bool):
    """exp(2*pi*i*tau) as an (re, im) pair; exact only for quarter turns."""
    tau = Fraction(tau) % 1
    if exact:
        if tau not in QUARTER_UNITS:
            raise ValueError(
                f"rotation by {tau} is not exact; use float mode")
        return QUARTER_UNITS[tau]
    angle = 2 * math.pi * float(tau)
    return (math.cos(angle), math.sin(angle))


def glue(c1: DiscConfiguration, slot: int, c2: DiscConfiguration) -> DiscConfiguration:
    """Insert c2, rescaled by the slot radius and rotated by the slot
    framing, in place of disc *slot* of c1 (slots are 1-based).

    Framings of the inserted discs pick up the slot framing; at most one
    marked point may survive.
    """
    if not 1 <= slot <= c1.arity():
        raise IndexError(f"slot {slot} out of range 1..{c1.arity()}")
    if c1.z_point is not None and c2.z_point is not None:
        raise ZConflict("both configurations carry a marked point")
    for label, cfg in (("first", c1), ("second", c2)):
        ok, problems = validate(cfg)
        if not ok:
            raise ValueError(f"{label} configuration invalid: {problems[0]}")
    exact = c1.exact and c2.exact
    tau = c1.framing(slot)
    if exact and tau not in QUARTER_UNITS:
        exact = False
    host = c1.points[slot - 1]
    ur, ui = rotation_unit(tau, exact)
    cr = _num(host.re, exact)
    ci = _num(host.im, exact)
    rr = _num(host.radius, exact)

    def send(re, im):
        re, im = _num(re, exact), _num(im, exact)
        return (cr + rr * (ur * re - ui * im), ci + rr * (ui * re + ur * im))

    new_points: list[Disc] = []
    new_framings: list[Fraction] = []
    inserted_z = None
    for k, p in enumerate(c1.points):
        if k == slot - 1:
            for j, p2 in enumerate(c2.points, start=1):
                re, im = send(p2.re, p2.im)
                new_points.append(Disc(re, im, rr * _num(p2.radius, exact)))
                new_framings.append((c2.framing(j) + tau) % 1)
            if c2.z_point is not None:
                inserted_z = send(*c2.z_point)
        else:
            new_points.append(Disc(_num(p.re, exact), _num(p.im, exact),
                                   _num(p.radius, exact)))
            new_framings.append(c1.framing(k + 1))
    z = inserted_z if inserted_z is not None else (
        None if c1.z_point is None
        else (_num(c1.z_point[0], exact), _num(c1.z_point[1], exact)))
    framings = None
    if c1.framings is not None or c2.framings is not None or tau != 0:
        framings = new_framings
    return DiscConfiguration(points=new_points, framings=framings,
                             z_point=z, exact=exact)


# ---------------------------------------------------------------------------
# graded multilinear operations
# ---------------------------------------------------------------------------


def koszul_sign(deg_phi1: int, deg_phi2: int, slot: int,
                degrees_prefix: list[int]) -> int:
    """(-1)^((|phi1| + |x_1| + ... + |x_{slot-1}|) * |phi2|)."""
    if len(degrees_prefix) != slot - 1:
        raise ValueError(f"slot {slot} needs {slot - 1} prefix degrees, "
                         f"got {len(degrees_prefix)}")
    return -1 if ((deg_phi1 + sum(degrees_prefix)) * deg_phi2) % 2 else 1


@dataclass
class GradedOperation:
    """Multilinear map on a small graded space, stored as a table from
    generator index tuples to output vectors."""

    space: tuple[int, ...]  # degree of each generator
    arity: int
    degree: int
    table: dict[tuple[int, ...], dict[int, Fraction]] = field(default_factory=dict)

    @classmethod
    def identity(cls, space: tuple[int, ...]) -> "GradedOperation":
        return cls(space=tuple(space), arity=1, degree=0,
                   table={(i,): {i: Fraction(1)} for i in range(len(space))})

    def is_homogeneous(self) -> bool:
        for inputs, out in self.table.items():
            want = sum(self.space[i] for i in inputs) + self.degree
            for gen, coeff in out.items():
                if coeff and self.space[gen] != want:
                    return False
        return True

    def apply(self, inputs: tuple[int, ...]) -> dict[int, Fraction]:
        return self.table.get(tuple(inputs), {})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedOperation):
            return NotImplemented
        if (self.space, self.arity, self.degree) != (other.space, other.arity,
                                                     other.degree):
            return False
        keys = set(self.table) | set(other.table)
        for key in keys:
            a, b = self.table.get(key, {}), other.table.get(key, {})
            gens = set(a) | set(b)
            if any(a.get(g, 0) != b.get(g, 0) for g in gens):
                return False
        return True


def compose(phi1: GradedOperation, slot: int,
            phi2: GradedOperation) -> GradedOperation:
    """Signed insertion of phi2 into input *slot* of phi1 (1-based)."""
    if phi1.space != phi2.space:
        raise ValueError("operations live on different spaces")
    if not 1 <= slot <= phi1.arity:
        raise IndexError(f"slot {slot} out of range 1..{phi1.arity}")
    arity = phi1.arity + phi2.arity - 1
    out = GradedOperation(space=phi1.space, arity=arity,
                          degree=phi1.degree + phi2.degree)
    gens = range(len(phi1.space))
    for inputs in itertools.product(gens, repeat=arity):
        prefix = inputs[:slot - 1]
        inner_args = inputs[slot - 1:slot - 1 + phi2.arity]
        suffix = inputs[slot - 1 + phi2.arity:]
        inner = phi2.apply(inner_args)
        if not inner:
            continue
        sign = koszul_sign(phi1.degree, phi2.degree, slot,
                           [phi1.space[g] for g in prefix])
        acc: dict[int, Fraction] = {}
        for mid, cmid in inner.items():
            outer = phi1.apply(prefix + (mid,) + suffix)
            for gen, cout in outer.items():
                acc[gen] = acc.get(gen, Fraction(0)) + sign * cmid * cout
        acc = {g: c for g, c in acc.items() if c}
        if acc:
            out.table[tuple(inputs)] = acc
    return out
