import random
from fractions import Fraction as Q

from rado_lab.errors import DegenerateSpan, RadoLabError
from rado_lab.geometry import validate_ball
from rado_lab.linalg import vneg


def random_symmetric_ball(rng: random.Random, dim: int):
    """A validated random symmetric polytope ball in the given dimension."""
    while True:
        k = rng.randrange(dim, dim + 3)
        pts = set()
        for _ in range(k):
            p = tuple(Q(rng.randrange(-8, 9), 4) for _ in range(dim))
            if any(c != 0 for c in p):
                pts.add(p)
                pts.add(vneg(p))
        try:
            return validate_ball(sorted(pts))
        except (DegenerateSpan, RadoLabError):
            continue
