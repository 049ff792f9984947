"""Periodic billiard orbits for a prescribed itinerary.

The reflection points on disk boundaries are parameterized by polar
angles; the periodic orbit is the critical point of the cyclic length
functional, found by damped Newton iteration with analytic gradient and
Hessian (see :mod:`billzeta._kernels`).  The solved orbit is checked
against the reflection law and against every obstacle it must clear.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry, symbolic
from ._kernels import newton_orbit
from .errors import DomainError, SolverError

SOLVER_TOL = 1e-12
REFLECTION_TOL = 1e-10
MAX_ITER = 200
MAX_HALVINGS = 30


@dataclass(frozen=True)
class PeriodicOrbit:
    word: tuple
    angles: np.ndarray
    points: np.ndarray
    flights: np.ndarray
    T: float
    cos_incidence: np.ndarray
    residual: float
    shadow_margin: float

    @property
    def n(self) -> int:
        return len(self.word)


def _check_word(config, word):
    word = tuple(int(s) for s in word)
    if len(word) < 2:
        raise DomainError(f"itinerary {word} is too short")
    if any(s < 1 or s > config.r for s in word):
        raise DomainError(f"itinerary {word} uses labels outside 1..{config.r}")
    if not symbolic.is_cyclically_admissible(word):
        raise DomainError(f"itinerary {word} repeats a label consecutively")
    return word


def default_angles(config, word) -> np.ndarray:
    """Initial boundary angles: each point faces the midpoint of the
    previous and next disk centers."""
    word = tuple(word)
    n = len(word)
    theta = np.empty(n)
    for i in range(n):
        c = config.centers[word[i] - 1]
        c_prev = config.centers[word[(i - 1) % n] - 1]
        c_next = config.centers[word[(i + 1) % n] - 1]
        mid = 0.5 * (c_prev + c_next)
        theta[i] = np.arctan2(mid[1] - c[1], mid[0] - c[0])
    return theta


def solve_orbit(
    config,
    word,
    theta0=None,
    tol: float = SOLVER_TOL,
    max_iter: int = MAX_ITER,
) -> PeriodicOrbit:
    """Solve for the periodic orbit with the given cyclic itinerary.

    Parameters
    ----------
    config : Configuration
        Must pass :func:`billzeta.geometry.validate`.
    word : sequence of int
        Cyclic itinerary, 1-based disk labels, no immediate repeats.
    theta0 : array, optional
        Starting boundary angles; defaults to :func:`default_angles`.
    tol : float
        Convergence target for the sup norm of the length gradient.

    Raises
    ------
    SolverError
        If the iteration misses ``tol`` (carries the best residual) or
        the reflection law fails its independent check.
    DomainError
        If the itinerary is inadmissible or a segment crosses an
        obstacle.
    """
    word = _check_word(config, word)
    n = len(word)
    idx = np.array(word, dtype=np.int64) - 1
    cx = np.ascontiguousarray(config.centers[idx, 0])
    cy = np.ascontiguousarray(config.centers[idx, 1])
    rad = np.ascontiguousarray(config.radii[idx])

    theta = np.array(
        default_angles(config, word) if theta0 is None else theta0, dtype=float
    )
    if theta.shape != (n,):
        raise DomainError(f"theta0 must have shape ({n},)")

    residual, _, ok = newton_orbit(cx, cy, rad, theta, tol, max_iter, MAX_HALVINGS)
    if not ok:
        raise SolverError(
            f"orbit solve for {word} stalled at residual {residual:.3e}",
            residual=float(residual),
        )
    theta = np.mod(theta, 2.0 * np.pi)

    points = np.stack([cx + rad * np.cos(theta), cy + rad * np.sin(theta)], axis=1)
    diffs = np.roll(points, -1, axis=0) - points
    flights = np.linalg.norm(diffs, axis=1)
    u = diffs / flights[:, None]
    normals = np.stack([np.cos(theta), np.sin(theta)], axis=1)

    # outgoing direction must leave the disk; its normal component is
    # the cosine of the incidence angle
    cos_inc = np.einsum("ij,ij->i", u, normals)
    if np.any(cos_inc <= 0.0):
        raise SolverError(
            f"orbit for {word} is tangential or enters its own disk",
            residual=float(residual),
        )

    for i in range(n):
        v_in = u[(i - 1) % n]
        v_out = geometry.reflect(v_in, normals[i])
        if np.linalg.norm(v_out - u[i]) > REFLECTION_TOL:
            raise SolverError(
                f"reflection law violated at bounce {i} of {word}",
                residual=float(residual),
            )

    shadow = np.inf
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        for k in range(config.r):
            if k == idx[i] or k == idx[(i + 1) % n]:
                continue
            margin = (
                geometry.segment_point_distance(p, q, config.centers[k])
                - config.radii[k]
            )
            shadow = min(shadow, margin)
            if margin <= 0.0:
                raise DomainError(
                    f"segment {i} of orbit {word} crosses disk {k + 1}"
                )

    return PeriodicOrbit(
        word=word,
        angles=theta,
        points=points,
        flights=flights,
        T=float(flights.sum()),
        cos_incidence=cos_inc,
        residual=float(residual),
        shadow_margin=float(shadow),
    )


def orbit_with_repetition(orbit: PeriodicOrbit, r: int):
    """Length data of the r-fold traversal: (tau, tau_sharp, bounces)."""
    if r < 1:
        raise DomainError("repetition count must be >= 1")
    return r * orbit.T, orbit.T, r * orbit.n
