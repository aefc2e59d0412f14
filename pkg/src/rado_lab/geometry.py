"""Symmetric polytope unit balls and the norms they induce.

A ball is a finite symmetric vertex set whose convex hull is the unit
ball; the norm is the Minkowski gauge, computed exactly by a small LP
over convex coefficients.  Balls that happen to be the standard cube,
cross-polytope or interval get closed-form norms; the LP path stays the
reference implementation and the two are cross-checked in the tests.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import lru_cache
from typing import Iterable, Sequence

from . import linalg
from .errors import (
    BadRational,
    DegenerateSpan,
    DimensionMismatch,
    DuplicatePoint,
    NotOnSphere,
    NotSymmetric,
)
from .linalg import Vec, vneg, vsub
from .lp import OPTIMAL, LpProblem, solve

_KIND_GENERIC = "generic"
_KIND_CUBE = "cube"  # vertices {-1,+1}^d: max-norm
_KIND_CROSS = "cross"  # vertices {+-e_i}: sum-norm


@dataclass(frozen=True)
class PolytopeBall:
    """Unit ball given by its extreme points (canonical descending order)."""

    dim: int
    vertices: tuple[Vec, ...]

    @property
    def kind(self) -> str:
        return _detect_kind(self.dim, self.vertices)


@lru_cache(maxsize=256)
def _detect_kind(dim: int, vertices: tuple[Vec, ...]) -> str:
    vset = set(vertices)
    if len(vset) == 2 ** dim and all(set(v) <= {Q(1), Q(-1)} for v in vertices):
        return _KIND_CUBE
    cross = set()
    for i in range(dim):
        for s in (Q(1), Q(-1)):
            e = [Q(0)] * dim
            e[i] = s
            cross.add(tuple(e))
    if vset == cross:
        return _KIND_CROSS
    return _KIND_GENERIC


def _in_convex_hull(points: Sequence[Vec], target: Vec) -> bool:
    """Exact feasibility of target = convex combination of points."""
    if not points:
        return False
    d = len(target)
    n = len(points)
    a_eq = [tuple(p[i] for p in points) for i in range(d)]
    a_eq.append((Q(1),) * n)
    b_eq = tuple(target) + (Q(1),)
    problem = LpProblem(
        objective=(Q(0),) * n, a_eq=tuple(a_eq), b_eq=b_eq, nonneg=True
    )
    return solve(problem).status == OPTIMAL


def validate_ball(vertices: Iterable[Vec]) -> PolytopeBall:
    """Build a ball from a vertex set, dropping redundant interior points.

    Symmetry violations and degenerate spans are errors: silently fixing
    either would change the norm the caller asked for.
    """
    vs = [tuple(Q(c) for c in v) for v in vertices]
    if not vs:
        raise DegenerateSpan("empty vertex set")
    dim = len(vs[0])
    if any(len(v) != dim for v in vs):
        raise DimensionMismatch("vertices of mixed dimension")
    seen = set()
    for v in vs:
        if v in seen:
            raise DuplicatePoint(f"duplicate vertex {v}")
        seen.add(v)
    for v in vs:
        if vneg(v) not in seen:
            raise NotSymmetric(f"vertex {v} has no mirror {vneg(v)}")
    if linalg.rank(vs) < dim:
        raise DegenerateSpan("vertices lie in a proper subspace")
    extreme = [v for v in vs if not _in_convex_hull([w for w in vs if w != v], v)]
    return PolytopeBall(dim=dim, vertices=tuple(sorted(extreme, reverse=True)))


def _gauge_via_lp(ball: PolytopeBall, x: Vec) -> Q:
    """Reference gauge: least total mass of a nonnegative vertex combination."""
    if all(c == 0 for c in x):
        return Q(0)
    n = len(ball.vertices)
    a_eq = [tuple(v[i] for v in ball.vertices) for i in range(ball.dim)]
    problem = LpProblem(
        objective=(Q(1),) * n, a_eq=tuple(a_eq), b_eq=tuple(x), nonneg=True
    )
    res = solve(problem)
    if res.status != OPTIMAL:
        raise DegenerateSpan("gauge LP infeasible; ball does not span")
    return res.value


def norm(ball: PolytopeBall, x: Vec) -> Q:
    """Minkowski gauge min{t >= 0 : x in t*B}, exact."""
    if len(x) != ball.dim:
        raise DimensionMismatch(f"vector of length {len(x)} in dimension {ball.dim}")
    kind = ball.kind
    if kind == _KIND_CUBE:
        return max((abs(c) for c in x), default=Q(0))
    if kind == _KIND_CROSS:
        return sum((abs(c) for c in x), Q(0))
    return _gauge_via_lp(ball, x)


def closed_ball_membership(ball: PolytopeBall, center: Vec, r: Q, x: Vec) -> bool:
    """Exact test of norm(x - center) <= r."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return norm(ball, vsub(x, center)) <= r


def is_extreme_point(ball: PolytopeBall, v: Vec) -> bool:
    """Convexity definition: v is not a convex combination of the others."""
    if norm(ball, v) != 1:
        raise NotOnSphere(f"{v} does not have norm 1")
    others = [w for w in ball.vertices if w != v]
    return not _in_convex_hull(others, v)


def intersection_coordinate_range(
    ball: PolytopeBall, c1: Vec, r1: Q, c2: Vec, r2: Q, coord: int
) -> tuple[Q, Q] | None:
    """Exact [min, max] of one coordinate over B(c1,r1) & B(c2,r2).

    Returns None when the intersection is empty.  A point z of the
    intersection is parameterized by two convex-coefficient vectors,
    z = c1 + r1 * sum(lam_i v_i) = c2 + r2 * sum(mu_j v_j).
    """
    vs = ball.vertices
    n = len(vs)
    d = ball.dim
    a_eq: list[tuple[Q, ...]] = []
    b_eq: list[Q] = []
    for i in range(d):
        a_eq.append(
            tuple(r1 * v[i] for v in vs) + tuple(-r2 * v[i] for v in vs)
        )
        b_eq.append(c2[i] - c1[i])
    a_eq.append((Q(1),) * n + (Q(0),) * n)
    b_eq.append(Q(1))
    a_eq.append((Q(0),) * n + (Q(1),) * n)
    b_eq.append(Q(1))
    out: list[Q] = []
    for sign in (Q(1), Q(-1)):
        objective = tuple(sign * r1 * v[coord] for v in vs) + (Q(0),) * n
        res = solve(
            LpProblem(objective=objective, a_eq=tuple(a_eq), b_eq=tuple(b_eq), nonneg=True)
        )
        if res.status != OPTIMAL:
            return None
        lam = res.point[:n]
        z = c1[coord] + r1 * sum((l * v[coord] for l, v in zip(lam, vs)), Q(0))
        out.append(z)
    return (min(out), max(out))


def is_extreme_via_balls(ball: PolytopeBall, v: Vec) -> bool:
    """Metric characterisation: B(0,1) & B(2v,1) is the single point {v}.

    Independent of is_extreme_point; the two must agree on every vertex.
    """
    if norm(ball, v) != 1:
        raise NotOnSphere(f"{v} does not have norm 1")
    center2 = tuple(2 * c for c in v)
    for coord in range(ball.dim):
        rng = intersection_coordinate_range(ball, linalg.zero_vec(ball.dim), Q(1), center2, Q(1), coord)
        if rng is None or rng[0] != rng[1]:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON interchange: coordinates are exact "p/q" or integer literals.

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def parse_rational(text: str) -> Q:
    """Parse an exact rational literal; floats are refused."""
    s = str(text).strip()
    if not _RATIONAL_RE.match(s):
        raise BadRational(f"not an exact rational literal: {text!r}")
    return Q(s)


def format_rational(q: Q) -> str:
    return str(q)


def vec_to_json(v: Vec) -> list[str]:
    return [format_rational(c) for c in v]


def vec_from_json(obj: Sequence[str]) -> Vec:
    return tuple(parse_rational(c) for c in obj)


def ball_to_json(ball: PolytopeBall) -> dict:
    return {"dim": ball.dim, "vertices": [vec_to_json(v) for v in ball.vertices]}


def ball_from_json(obj: dict) -> PolytopeBall:
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise BadRational(f"dim must be a positive integer, got {dim!r}")
    ball = validate_ball([vec_from_json(v) for v in obj["vertices"]])
    if ball.dim != dim:
        raise DimensionMismatch("declared dim does not match vertices")
    return ball


def load_ball(path: str) -> PolytopeBall:
    with open(path, "r", encoding="utf-8") as fh:
        return ball_from_json(json.load(fh))


def dump_ball(ball: PolytopeBall, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ball_to_json(ball), fh, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Catalog of showcase balls used by the CLI and the test corpus.


def cube_ball(d: int) -> PolytopeBall:
    """Unit ball of the max norm: vertices {-1,+1}^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    verts = []
    for bits in range(2 ** d):
        verts.append(tuple(Q(1) if bits >> i & 1 else Q(-1) for i in range(d)))
    return validate_ball(verts)


def cross_polytope_ball(d: int) -> PolytopeBall:
    """Unit ball of the sum norm: vertices +-e_i."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    verts = []
    for i in range(d):
        for s in (1, -1):
            e = [Q(0)] * d
            e[i] = Q(s)
            verts.append(tuple(e))
    return validate_ball(verts)


def square_ball() -> PolytopeBall:
    return cube_ball(2)


def l1_plane_ball() -> PolytopeBall:
    return cross_polytope_ball(2)


def hexagon_ball() -> PolytopeBall:
    """Irregular symmetric hexagon +-(1,0), +-(0,1), +-(1,1)."""
    pts = [(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)]
    return validate_ball([tuple(Q(c) for c in p) for p in pts])


def hexagonal_prism_ball() -> PolytopeBall:
    """conv(H x {-1,+1}) for the irregular hexagon H: one max-norm axis."""
    verts = []
    for v in hexagon_ball().vertices:
        for s in (Q(1), Q(-1)):
            verts.append(v + (s,))
    return validate_ball(verts)


BUILTIN_BALLS = {
    "square": square_ball,
    "cube_1": lambda: cube_ball(1),
    "cube_2": lambda: cube_ball(2),
    "cube_3": lambda: cube_ball(3),
    "cube_4": lambda: cube_ball(4),
    "cross_polytope_2": lambda: cross_polytope_ball(2),
    "cross_polytope_3": lambda: cross_polytope_ball(3),
    "cross_polytope_4": lambda: cross_polytope_ball(4),
    "hexagon": hexagon_ball,
    "hexagonal_prism": hexagonal_prism_ball,
    "l1_plane": l1_plane_ball,
}
