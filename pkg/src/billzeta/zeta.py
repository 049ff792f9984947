"""Zeta-type series over periodic orbits and the truncated determinant.

Series atoms are (length, weight) pairs indexed by a primitive cycle and
a repetition count; weights use |det(Id - P)|^{-1/2} (half weight),
|det(Id - P)|^{-1} (full weight), or |Lambda|^{-r} (unstable-determinant
variant).  The determinant D(s) is handled in two equivalent layers:

* log atoms: log D(s) = -sum over (p, r, k) of
  (1/r) sgn(Lambda_p)^{kr} |Lambda_p|^{-r(k+1/2)} exp(-s r T_p),
  so (log D)'(s) reproduces the half-weight series truncated at
  (N, k_max) term by term;
* expansion atoms: the product over (p, k) of (1 - t_{p,k}) expanded
  into square-free monomials and truncated at total symbol length N.
  This finite exponential sum is what actually vanishes at the series'
  poles, so pole location runs on it.

Atoms are always generated and summed in canonical (word, repetition)
order, which keeps every downstream output byte-reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import exp_atom_sum_grid
from .errors import IncompleteDataError, TrustRegionError

# ---------------------------------------------------------------------------
# atoms over (primitive cycle, repetition)


def orbit_atoms(db, T_max=None, m_max=None):
    """Arrays over (primitive, repetition) atoms in canonical order.

    Exactly one of ``T_max`` (geometric-length cutoff) or ``m_max``
    (symbol-count cutoff) must be given.  With ``T_max`` the database
    must be deep enough that no orbit beyond its length cutoff could
    fall below ``T_max``: omitted orbits have period > (n_max+1) * d0.
    """
    if (T_max is None) == (m_max is None):
        raise ValueError("give exactly one of T_max, m_max")
    if T_max is not None:
        horizon = (db.n_max + 1) * db.config.d0
        if T_max > horizon:
            raise IncompleteDataError(
                f"cutoff T_max={T_max} exceeds the database horizon {horizon:.6g} "
                f"(n_max={db.n_max}, d0={db.config.d0:.6g})"
            )
    rows = []
    for p_idx, rec in enumerate(db.records):
        r = 1
        while True:
            if T_max is not None and r * rec.T > T_max:
                break
            if m_max is not None and r * rec.n > m_max:
                break
            det = rec.det_one_minus_p(r)
            rows.append(
                (
                    p_idx,
                    r,
                    r * rec.T,
                    rec.T,
                    r * rec.n,
                    det,
                    rec.lam_abs,
                    rec.sign,
                )
            )
            r += 1
    if not rows:
        raise IncompleteDataError("no atoms below the requested cutoff")
    p_idx, rep, tau, tsharp, m, det, lam_abs, sign = map(np.array, zip(*rows))
    return {
        "p_idx": p_idx.astype(np.int64),
        "r": rep.astype(np.int64),
        "tau": tau.astype(float),
        "tsharp": tsharp.astype(float),
        "m": m.astype(np.int64),
        "det": det.astype(float),
        "lam_abs": lam_abs.astype(float),
        "sign": sign.astype(np.int64),
        "w_half": tsharp / np.sqrt(det),
        "w_full": tsharp / det,
        "w_unstable": tsharp * lam_abs ** (-rep.astype(float)),
        "parity": np.where(m.astype(np.int64) % 2 == 0, 1.0, -1.0),
    }


def eta_direct(db, s, q: int = 1, dirichlet: bool = False, T_max=None, m_max=None):
    """Partial sum of the half-weight series at complex ``s``.

    ``q`` keeps only atoms whose bounce count is a multiple of q and
    multiplies by q; ``dirichlet`` instead applies the alternating sign
    (-1)^m (and ignores ``q``).
    """
    atoms = orbit_atoms(db, T_max=T_max, m_max=m_max)
    w = atoms["w_half"].astype(complex)
    if dirichlet:
        w = w * atoms["parity"]
    else:
        if q < 1:
            raise ValueError("q must be >= 1")
        w = np.where(atoms["m"] % q == 0, q * w, 0.0)
    return complex(np.sum(w * np.exp(-s * atoms["tau"])))


def eta_via_roots_of_unity(db, s, q: int, T_max=None, m_max=None):
    """Same q-filtered sum assembled through sum_j exp(2 pi i j m / q)."""
    atoms = orbit_atoms(db, T_max=T_max, m_max=m_max)
    total = 0.0 + 0.0j
    base = np.exp(-s * atoms["tau"]) * atoms["w_half"]
    for j in range(q):
        phase = np.exp(2.0j * np.pi * j * atoms["m"] / q)
        total += np.sum(base * phase)
    return complex(total)


def series_full_power(db, s, variant: str = "det", T_max=None, m_max=None):
    """Partial sum of the full-weight series; ``variant`` chooses the
    denominator |det(Id - P)| ("det") or |Lambda|^r ("unstable")."""
    atoms = orbit_atoms(db, T_max=T_max, m_max=m_max)
    key = {"det": "w_full", "unstable": "w_unstable"}[variant]
    return complex(np.sum(atoms[key].astype(complex) * np.exp(-s * atoms["tau"])))


def reflection_shift_matrix(q: int) -> np.ndarray:
    """Cyclic-shift permutation on q coordinates: one step per bounce."""
    A = np.zeros((q, q), dtype=np.int64)
    for i in range(q):
        A[i, (i + 1) % q] = 1
    return A


def roots_of_unity_filter(m: int, q: int) -> complex:
    return complex(sum(np.exp(2.0j * np.pi * j * m / q) for j in range(q)))


# ---------------------------------------------------------------------------
# abscissa from shell growth


def abscissa_estimate(db, weight: str = "half", parity=None, window: int = 4):
    """Growth-rate estimate for a weighted orbit series.

    Groups atoms into bounce-count shells, regresses log(shell sum)
    against the weighted mean length per shell over sliding windows, and
    reports the last-window slope with the spread over windows as the
    error bar.  ``weight`` is one of "half", "full", "unstable", "none"
    (the counting series tau_sharp e^{-s tau}); ``parity="even"``
    restricts to even bounce counts.

    Returns (estimate, error_bar, shells) where shells is the list of
    (m, shell sum, mean length).
    """
    atoms = orbit_atoms(db, m_max=db.n_max)
    w = {
        "half": atoms["w_half"],
        "full": atoms["w_full"],
        "unstable": atoms["w_unstable"],
        "none": atoms["tsharp"],
    }[weight]
    m = atoms["m"]
    keep = np.ones(len(m), dtype=bool)
    if parity == "even":
        keep = m % 2 == 0
    shells = []
    for m_val in range(2, db.n_max + 1):
        sel = keep & (m == m_val)
        if not np.any(sel):
            continue
        total = float(np.sum(w[sel]))
        mean_tau = float(np.sum(w[sel] * atoms["tau"][sel]) / total)
        shells.append((m_val, total, mean_tau))
    if len(shells) < window + 1:
        raise IncompleteDataError("not enough shells for a growth-rate fit")
    xs = np.array([t for _, _, t in shells])
    ys = np.log(np.array([a for _, a, _ in shells]))
    slopes = []
    for i in range(len(shells) - window):
        sl = np.polyfit(xs[i : i + window + 1], ys[i : i + window + 1], 1)[0]
        slopes.append(sl)
    estimate = float(slopes[-1])
    err = float(max(abs(s - estimate) for s in slopes[-3:])) if len(slopes) >= 2 else 0.0
    return estimate, err, shells


# ---------------------------------------------------------------------------
# truncated determinant


@dataclass
class DeterminantExpansion:
    """Truncated determinant: log atoms plus expanded monomial atoms."""

    N: int
    k_max: int
    log_coeff: np.ndarray
    log_tau: np.ndarray
    log_shell: np.ndarray
    poly_coeff: np.ndarray
    poly_tau: np.ndarray
    poly_shell: np.ndarray
    trust_floor: float = field(default=np.nan)
    trust_threshold: float = field(default=3e-5)

    def log_derivative_series(self, s):
        """(log D)'(s) from the log atoms; term-for-term it is the
        half-weight series truncated at (N, k_max)."""
        values = exp_atom_sum_grid(
            self.log_coeff * self.log_tau, self.log_tau, np.atleast_1d(s)
        )
        return complex(values[0]) if np.isscalar(s) else values

    def value(self, s):
        """D(s) from the expanded atoms (finite exponential sum)."""
        values = exp_atom_sum_grid(self.poly_coeff, self.poly_tau, np.atleast_1d(s))
        return complex(values[0]) if np.isscalar(s) else values

    def derivative(self, s):
        values = exp_atom_sum_grid(
            -self.poly_coeff * self.poly_tau, self.poly_tau, np.atleast_1d(s)
        )
        return complex(values[0]) if np.isscalar(s) else values

    def log_value(self, s):
        """log D(s) = -(sum of log atoms); valid right of the series abscissa."""
        values = exp_atom_sum_grid(-self.log_coeff, self.log_tau, np.atleast_1d(s))
        return complex(values[0]) if np.isscalar(s) else values

    def last_shell_value(self, s):
        sel = self.poly_shell == self.N
        values = exp_atom_sum_grid(
            self.poly_coeff[sel], self.poly_tau[sel], np.atleast_1d(s)
        )
        return complex(values[0]) if np.isscalar(s) else values


def _expansion_monomials(items, N, x_ref, prune):
    """Square-free monomials of prod (1 - t_i) with total length <= N.

    ``items`` is the (length, T, base weight) pool sorted by length.
    The running coefficient magnitude at depth Re s = x_ref is tracked;
    a subtree is abandoned when even maximal further growth (bounded by
    the largest per-bounce effective factor) cannot lift it back above
    ``prune``.
    """
    n_arr = np.array([it[0] for it in items], dtype=np.int64)
    T_arr = np.array([it[1] for it in items])
    w_arr = np.array([it[2] for it in items])
    eff = np.abs(w_arr) * np.exp(-x_ref * T_arr)
    growth = max(1.0, float(np.max(eff ** (1.0 / n_arr)))) if len(items) else 1.0
    out = {}

    def emit(tau, coeff, length):
        key = (length, tau)
        out[key] = out.get(key, 0.0) + coeff

    def walk(start, length, tau, coeff, coeff_eff):
        for i in range(start, len(items)):
            n_i = int(n_arr[i])
            if length + n_i > N:
                break  # items are sorted by length
            new_len = length + n_i
            new_tau = tau + T_arr[i]
            new_coeff = -coeff * w_arr[i]
            new_eff = coeff_eff * eff[i]
            if new_eff * growth ** (N - new_len) < prune:
                continue
            emit(new_tau, new_coeff, new_len)
            walk(i + 1, new_len, new_tau, new_coeff, new_eff)

    emit(0.0, 1.0, 0)
    walk(0, 0, 0.0, 1.0, 1.0)
    keys = sorted(out.keys())
    shell = np.array([k[0] for k in keys], dtype=np.int64)
    tau = np.array([k[1] for k in keys])
    coeff = np.array([out[k] for k in keys])
    return coeff, tau, shell


def build_determinant(
    db,
    N: int,
    k_max: int = 5,
    x_ref: float = -0.75,
    prune: float = 1e-16,
    trust_threshold: float = 3e-5,
    probe_im=None,
) -> DeterminantExpansion:
    """Assemble the truncated determinant from the orbit database.

    ``N`` caps the total symbol length, ``k_max`` the number of
    transverse factors.  ``x_ref``/``prune`` control magnitude pruning
    of expansion monomials (calibrated for rectangles with
    Re s >= x_ref).  The trust floor is the leftmost Re s at which the
    length-N shell of the expansion (the signed last-shell sum, whose
    internal cancellation tracks how shadowing actually limits the
    truncation error) stays below ``trust_threshold`` on a probe strip
    near the real axis.  The default threshold is calibrated so that
    zeros inside the trusted region shift by less than about 1e-4 when
    N changes; left of the floor they drift by an order of magnitude
    more and the search refuses to report them.
    """
    if N > db.n_max:
        raise IncompleteDataError(f"N={N} exceeds database n_max={db.n_max}")
    log_rows = []
    items = []
    for rec in db.records:
        if rec.n > N:
            continue
        for k in range(k_max + 1):
            t0 = rec.sign**k * rec.lam_abs ** (-(k + 0.5))
            items.append((rec.n, rec.T, t0))
            r = 1
            while r * rec.n <= N:
                log_rows.append(
                    (
                        r * rec.n,
                        r * rec.T,
                        rec.sign ** (k * r) * rec.lam_abs ** (-r * (k + 0.5)) / r,
                    )
                )
                r += 1
    log_rows.sort(key=lambda row: (row[0], row[1], row[2]))
    log_shell = np.array([row[0] for row in log_rows], dtype=np.int64)
    log_tau = np.array([row[1] for row in log_rows])
    log_coeff = np.array([row[2] for row in log_rows])

    items.sort(key=lambda it: (it[0], it[1], it[2]))
    poly_coeff, poly_tau, poly_shell = _expansion_monomials(items, N, x_ref, prune)

    exp = DeterminantExpansion(
        N=N,
        k_max=k_max,
        log_coeff=log_coeff,
        log_tau=log_tau,
        log_shell=log_shell,
        poly_coeff=poly_coeff,
        poly_tau=poly_tau,
        poly_shell=poly_shell,
        trust_threshold=trust_threshold,
    )
    exp.trust_floor = _trust_floor(exp, trust_threshold, probe_im, x_ref)
    return exp


def _trust_floor(exp: DeterminantExpansion, threshold, probe_im, x_min):
    """Leftmost Re s where the last shell stays below ``threshold``.

    Scans from the right; the floor is the last x before the first
    probe-line violation (max over a grid of imaginary parts).
    """
    if probe_im is None:
        probe_im = np.linspace(0.0, 1.2, 7)
    floor = None
    x = 0.5
    while x >= x_min - 1e-12:
        pts = x + 1j * np.asarray(probe_im)
        worst = float(np.max(np.abs(exp.last_shell_value(pts))))
        if worst > threshold:
            break
        floor = x
        x -= 0.02
    if floor is None:
        raise TrustRegionError(
            f"last-shell contribution already exceeds {threshold} at Re s = 0.5"
        )
    return float(floor)


def eta_tail_bound(db, exp: DeterminantExpansion, s_re: float) -> float:
    """Bound on the k > k_max remainder when comparing (log D)' with the
    half-weight series on the same (p, r) atoms."""
    total = 0.0
    for rec in db.records:
        if rec.n > exp.N:
            continue
        r = 1
        while r * rec.n <= exp.N:
            lam_r = rec.lam_abs ** (-float(r))
            tail = lam_r ** (exp.k_max + 1) / (1.0 - lam_r)
            total += rec.T * np.exp(-s_re * r * rec.T) * rec.lam_abs ** (-r / 2.0) * tail
            r += 1
    return float(total)


# ---------------------------------------------------------------------------
# pole location


@dataclass(frozen=True)
class Pole:
    s: complex
    multiplicity: int
    residual: float
    trust_margin: float


NOISE_SAFETY = 3.0


def _guarded_value(exp: DeterminantExpansion, z):
    """D(z), raising when the value is indistinguishable from the
    truncation noise (last-shell magnitude) at that point.  A contour
    through such a region can wind around noise artifacts instead of
    genuine zeros, so the search refuses to continue."""
    f = exp.value(z)
    noise = abs(exp.last_shell_value(z))
    if abs(f) < NOISE_SAFETY * noise:
        raise TrustRegionError(
            f"|D| = {abs(f):.2e} at s = {z:.4f} is below {NOISE_SAFETY} x the "
            f"truncation noise {noise:.2e}; shift the grid or reduce the depth"
        )
    return f


def _winding_on_path(exp: DeterminantExpansion, za, zb, depth=0):
    """Total phase change of D along the segment [za, zb] / (2 pi)."""
    fa = _guarded_value(exp, za)
    fb = _guarded_value(exp, zb)
    d = np.angle(fb / fa)
    if abs(d) <= 0.5 * np.pi or depth >= 44:
        return d / (2.0 * np.pi)
    mid = 0.5 * (za + zb)
    return _winding_on_path(exp, za, mid, depth + 1) + _winding_on_path(
        exp, mid, zb, depth + 1
    )


def _cell_edges(re0, re1, im0, im1, samples):
    edges = []
    for za, zb in (
        (complex(re0, im0), complex(re1, im0)),
        (complex(re1, im0), complex(re1, im1)),
        (complex(re1, im1), complex(re0, im1)),
        (complex(re0, im1), complex(re0, im0)),
    ):
        ts = np.linspace(0.0, 1.0, samples + 1)
        pts = za + (zb - za) * ts
        for k in range(samples):
            edges.append((pts[k], pts[k + 1]))
    return edges


def _cell_winding(exp, re0, re1, im0, im1, samples=12):
    total = 0.0
    for za, zb in _cell_edges(re0, re1, im0, im1, samples):
        total += _winding_on_path(exp, za, zb)
    return total


def _moment_on_path(exp: DeterminantExpansion, za, zb, depth=0):
    """Simpson approximation of (1/2 pi i) int s D'/D ds on a segment,
    refined until the phase change per piece is small."""
    fa = _guarded_value(exp, za)
    fb = _guarded_value(exp, zb)
    if abs(np.angle(fb / fa)) > 0.1 and depth < 44:
        mid = 0.5 * (za + zb)
        return _moment_on_path(exp, za, mid, depth + 1) + _moment_on_path(
            exp, mid, zb, depth + 1
        )
    mid = 0.5 * (za + zb)
    ga = za * exp.derivative(za) / fa
    gm = mid * exp.derivative(mid) / exp.value(mid)
    gb = zb * exp.derivative(zb) / fb
    integral = (zb - za) * (ga + 4.0 * gm + gb) / 6.0
    return integral / (2.0j * np.pi)


def _cell_moment(exp, re0, re1, im0, im1, samples=12):
    """Sum of the zeros inside the cell, counted with multiplicity
    (first moment by the argument principle)."""
    total = 0.0 + 0.0j
    for za, zb in _cell_edges(re0, re1, im0, im1, samples):
        total += _moment_on_path(exp, za, zb)
    return total


def _polish_zero(exp: DeterminantExpansion, s0, multiplicity: int = 1, steps=80, tol=1e-14):
    """Newton polish; the step is scaled by the multiplicity so that
    degenerate zeros (symmetry-doubled pairs) converge quadratically."""
    s = complex(s0)
    for _ in range(steps):
        f = exp.value(s)
        df = exp.derivative(s)
        if df == 0:
            break
        step = multiplicity * f / df
        s = s - step
        if abs(step) < tol:
            break
    return s


def _rect_noise(exp: DeterminantExpansion, re0, re1, im0, im1, samples=13):
    """Worst last-shell magnitude sampled across the rectangle."""
    xs = np.linspace(re0, re1, samples)
    ys = np.linspace(im0, im1, samples)
    pts = (xs[:, None] + 1j * ys[None, :]).ravel()
    return float(np.max(np.abs(exp.last_shell_value(pts))))


def _locate_in_cell(exp, re0, re1, im0, im1, w_int, depth=0):
    """Pin down the zero(s) announced by a cell's winding number.

    Newton polish from the cell center is accepted only if it stays
    near the cell; otherwise the cell is subdivided (at a slightly
    off-center fraction so symmetric zeros cannot sit on the cut) and
    the subcell carrying the winding is recursed into.
    """
    cx = 0.5 * (re0 + re1)
    cy = 0.5 * (im0 + im1)
    diag = np.hypot(re1 - re0, im1 - im0)
    s_star = _polish_zero(exp, complex(cx, cy), multiplicity=w_int)
    if (
        np.isfinite(s_star.real)
        and np.isfinite(s_star.imag)
        and re0 - diag <= s_star.real <= re1 + diag
        and im0 - diag <= s_star.imag <= im1 + diag
    ):
        return s_star
    if depth >= 24:
        return complex(cx, cy)
    t = 0.51379
    xm = re0 + t * (re1 - re0)
    ym = im0 + t * (im1 - im0)
    for a0, a1 in ((re0, xm), (xm, re1)):
        for b0, b1 in ((im0, ym), (ym, im1)):
            w = _cell_winding(exp, a0, a1, b0, b1)
            if int(round(w)) >= 1:
                return _locate_in_cell(exp, a0, a1, b0, b1, int(round(w)), depth + 1)
    return complex(cx, cy)


def find_poles(exp: DeterminantExpansion, rect, grid=(8, 8), winding_tol=0.05):
    """Zeros of the truncated determinant inside a rectangle.

    The rectangle must lie in the trusted region: its left edge right
    of the trust floor, and the sampled last-shell contribution below
    the expansion's threshold across the whole rectangle (truncation
    noise grows upward as well as leftward, and phase slips in noisy
    territory can fake integer windings).  The rectangle is subdivided
    into grid cells; the winding number of D around each cell must come
    out integer to ``winding_tol``, with every contour sample keeping
    |D| above the local noise.  Simple zeros are polished by Newton
    iteration; multiple zeros (symmetry-doubled pairs, whose polished
    position is only conditioned to the noise-splitting scale) are
    reported as the contour centroid, the first argument-principle
    moment divided by the winding.
    """
    re0, re1, im0, im1 = map(float, rect)
    if re0 >= re1 or im0 >= im1:
        raise ValueError("empty rectangle")
    if np.isnan(exp.trust_floor) or re0 < exp.trust_floor - 1e-12:
        raise TrustRegionError(
            f"rectangle reaches Re s = {re0}, left of the trust floor "
            f"{exp.trust_floor:.4f} for N={exp.N}"
        )
    noise = _rect_noise(exp, re0, re1, im0, im1)
    if noise > exp.trust_threshold:
        raise TrustRegionError(
            f"last-shell contribution reaches {noise:.2e} on the rectangle, "
            f"above the trusted level {exp.trust_threshold:.2e}; "
            "rectangle too deep for this truncation order"
        )
    nx, ny = grid
    xs = np.linspace(re0, re1, nx + 1)
    ys = np.linspace(im0, im1, ny + 1)
    poles = []
    for i in range(nx):
        for j in range(ny):
            w = _cell_winding(exp, xs[i], xs[i + 1], ys[j], ys[j + 1])
            w_int = int(round(w))
            if abs(w - w_int) > winding_tol:
                raise TrustRegionError(
                    f"non-integer winding {w:.3f} in cell "
                    f"[{xs[i]:.4f},{xs[i+1]:.4f}]x[{ys[j]:.4f},{ys[j+1]:.4f}]; "
                    "rectangle too deep for this truncation order"
                )
            if w_int < 1:
                continue
            if w_int == 1:
                s_star = _locate_in_cell(exp, xs[i], xs[i + 1], ys[j], ys[j + 1], 1)
            else:
                mu = _cell_moment(exp, xs[i], xs[i + 1], ys[j], ys[j + 1])
                s_star = mu / w_int
            poles.append(
                Pole(
                    s=s_star,
                    multiplicity=w_int,
                    residual=abs(exp.value(s_star)),
                    trust_margin=float(s_star.real - exp.trust_floor),
                )
            )
    merged = []
    for pole in sorted(poles, key=lambda p: (p.s.imag, p.s.real)):
        if merged and abs(pole.s - merged[-1].s) < 1e-8 * (1.0 + abs(pole.s)):
            prev = merged.pop()
            pole = Pole(
                s=prev.s,
                multiplicity=prev.multiplicity + pole.multiplicity,
                residual=min(prev.residual, pole.residual),
                trust_margin=prev.trust_margin,
            )
        merged.append(pole)
    return merged


def track_zero(exp: DeterminantExpansion, s0, multiplicity: int, radius: float = 0.1):
    """Re-locate a known zero cluster on another truncation.

    Computes the winding and centroid of D over a box of the given
    radius centered at ``s0``.  Unlike :func:`find_poles` this skips the
    rectangle-level gate: it is meant for comparing one established
    zero across truncation orders, and the contour noise guard still
    protects every sample.  Returns (winding, position): the centroid
    for multiple zeros, a Newton-polished point for simple ones.
    """
    re0, re1 = s0.real - radius, s0.real + radius
    im0, im1 = s0.imag - radius, s0.imag + radius
    w = _cell_winding(exp, re0, re1, im0, im1)
    w_int = int(round(w))
    if abs(w - w_int) > 0.05 or w_int < 1:
        raise TrustRegionError(
            f"tracking box at {s0:.4f} sees winding {w:.3f}, "
            f"expected about {multiplicity}"
        )
    if w_int == 1:
        return w_int, _polish_zero(exp, s0, multiplicity=1)
    mu = _cell_moment(exp, re0, re1, im0, im1)
    return w_int, mu / w_int


def real_zero(exp: DeterminantExpansion, lo: float, hi: float, tol=1e-13) -> float:
    """Real zero of D by bisection; D is real on the real axis."""
    flo = exp.value(lo).real
    fhi = exp.value(hi).real
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise TrustRegionError(f"no sign change of D on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = exp.value(mid).real
        if fm == 0.0 or hi - lo < tol:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# counting


def counting_check(db, h: float, x_values=None):
    """Primitive-orbit counting against e^{hx}/(hx).

    Returns rows (x, N(x), e^{hx}/(hx), ratio); ratio is 0 where no
    orbit is short enough.
    """
    lengths = np.sort(np.array([rec.T for rec in db.records]))
    if x_values is None:
        x_values = np.linspace(lengths[0] * 0.95, lengths[-1], 25)
    rows = []
    for x in np.asarray(x_values, dtype=float):
        count = int(np.searchsorted(lengths, x, side="right"))
        model = float(np.exp(h * x) / (h * x)) if h * x > 0 else np.nan
        ratio = count / model if model and np.isfinite(model) else 0.0
        rows.append((float(x), count, model, float(ratio)))
    return rows


def signed_shell_partials(db, s, m_max=None):
    """Per-shell sums of the full-weight series with and without the
    alternating sign; used by the directional convergence test."""
    atoms = orbit_atoms(db, m_max=m_max or db.n_max)
    shells = []
    base = atoms["w_full"] * np.exp(-np.real(s) * atoms["tau"])
    for m_val in range(2, (m_max or db.n_max) + 1):
        sel = atoms["m"] == m_val
        if not np.any(sel):
            continue
        unsigned = float(np.sum(base[sel]))
        signed = float(np.sum(base[sel] * atoms["parity"][sel]))
        shells.append((m_val, signed, unsigned))
    return shells
