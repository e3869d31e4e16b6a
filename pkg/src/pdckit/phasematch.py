"""Type-II parametric down-conversion phase matching.

Builds on the per-direction wave solutions: momentum mismatch for a pump /
signal / idler triple, the collinear phase-matching curve, non-collinear
emission-cone tracing around a pump direction, exit refraction at the crystal
facet, the cone-intersection frame (T, P, R), stereographic projection, and
the pump- / filter-bandwidth circle sweeps.

All wavelengths are vacuum nanometres and all wave vectors rad/µm in the
crystal-physical frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import (ComputationError, TotalInternalReflectionError,
               ValidationError)
from .dispersion import CrystalDefinition
from .waveoptics import (_unit, dir_from_psi_rho, indices_many, mode_indices,
                         psi_rho_from_dir)

TWO_PI = 2.0 * math.pi
_MODE_IDX = {"fast": 0, "slow": 1}

#: Points count as phase matched when |Δk|/|k_f| falls below this.
MISMATCH_THRESHOLD = 5e-5


def _k_scale(lam_nm):
    """Vacuum wavenumber 2π/λ in rad/µm."""
    return TWO_PI / (float(lam_nm) * 1e-3)


def _perp_basis(axis):
    """Deterministic orthonormal pair spanning the plane perpendicular to axis."""
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(axis)))] = 1.0
    t1 = seed - (seed @ axis) * axis
    t1 /= math.sqrt(t1 @ t1)
    return t1, np.cross(axis, t1)


def _angle_deg(a, b):
    return math.degrees(math.acos(max(-1.0, min(1.0, float(np.dot(a, b))))))


def _orient(v):
    """Deterministic overall sign: first significant component positive."""
    for comp in v:
        if abs(comp) > 1e-6:
            return v if comp > 0 else -v
    return v


@dataclass(frozen=True)
class PdcProcess:
    """One down-conversion process: pump → signal + idler with fixed modes.

    The default assignment is the type-II "fsf" case: fast pump, slow signal,
    fast idler.
    """
    lambda_f_nm: float
    lambda_s_nm: float
    lambda_i_nm: float
    pump_mode: str = "fast"
    signal_mode: str = "slow"
    idler_mode: str = "fast"

    def __post_init__(self):
        for m in (self.pump_mode, self.signal_mode, self.idler_mode):
            if m not in _MODE_IDX:
                raise ValidationError(f"mode must be 'fast' or 'slow', got {m!r}")
        for lam in (self.lambda_f_nm, self.lambda_s_nm, self.lambda_i_nm):
            if lam <= 0:
                raise ValidationError("wavelengths must be positive")
        lhs = 1.0 / self.lambda_f_nm
        rhs = 1.0 / self.lambda_s_nm + 1.0 / self.lambda_i_nm
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise ValidationError(
                f"energy is not conserved: 1/{self.lambda_f_nm} != "
                f"1/{self.lambda_s_nm} + 1/{self.lambda_i_nm} "
                f"(relative error {abs(lhs - rhs) / lhs:.2e})")

    @classmethod
    def degenerate(cls, lambda_f_nm, **modes):
        return cls(lambda_f_nm, 2.0 * lambda_f_nm, 2.0 * lambda_f_nm, **modes)

    @classmethod
    def from_signal(cls, lambda_f_nm, lambda_s_nm, **modes):
        lam_i = 1.0 / (1.0 / lambda_f_nm - 1.0 / lambda_s_nm)
        return cls(lambda_f_nm, lambda_s_nm, lam_i, **modes)


@dataclass(frozen=True)
class MismatchResult:
    delta_k: np.ndarray         # rad/µm, crystal frame
    relative_mismatch: float    # |Δk| / |k_f|


def _k_vector(crystal, lam_nm, mode, direction):
    d = _unit(direction)
    n = mode_indices(crystal, lam_nm, d)[_MODE_IDX[mode]]
    return _k_scale(lam_nm) * n * d


def mismatch(crystal: CrystalDefinition, process: PdcProcess,
             pump_dir, signal_dir, idler_dir) -> MismatchResult:
    """Δk = k_s + k_i − k_f with each wave on its assigned mode branch."""
    kf = _k_vector(crystal, process.lambda_f_nm, process.pump_mode, pump_dir)
    ks = _k_vector(crystal, process.lambda_s_nm, process.signal_mode, signal_dir)
    ki = _k_vector(crystal, process.lambda_i_nm, process.idler_mode, idler_dir)
    dk = ks + ki - kf
    return MismatchResult(dk, float(np.linalg.norm(dk) / np.linalg.norm(kf)))


# ---------------------------------------------------------------------------
# collinear solutions

def collinear_curve(crystal: CrystalDefinition, process: PdcProcess,
                    psi_range=(0.0, 90.0), rho_range=(0.0, 90.0),
                    psi_step_deg=0.25, rho_scan_step_deg=0.5):
    """Directions where the process phase matches collinearly.

    One quadrant of (ψ, ρ) is scanned: for each ψ the scalar mismatch
    n_s/λ_s + n_i/λ_i − n_f/λ_f is sampled over ρ and every sign change is
    polished by root bracketing, so multiple curve branches per ψ are kept.
    Returns a list of unit vectors (possibly empty).
    """
    si, ii, fi = (_MODE_IDX[process.signal_mode], _MODE_IDX[process.idler_mode],
                  _MODE_IDX[process.pump_mode])
    inv_s = 1.0 / (process.lambda_s_nm * 1e-3)
    inv_i = 1.0 / (process.lambda_i_nm * 1e-3)
    inv_f = 1.0 / (process.lambda_f_nm * 1e-3)

    def h_many(dirs):
        ns = indices_many(crystal, process.lambda_s_nm, dirs)[si]
        ni = indices_many(crystal, process.lambda_i_nm, dirs)[ii]
        nf = indices_many(crystal, process.lambda_f_nm, dirs)[fi]
        return ns * inv_s + ni * inv_i - nf * inv_f

    def h_one(psi, rho):
        return float(h_many(dir_from_psi_rho(psi, rho)[None, :])[0])

    points = []
    rho_grid = np.arange(rho_range[0], rho_range[1] + 1e-9, rho_scan_step_deg)
    for psi in np.arange(psi_range[0], psi_range[1] + 1e-9, psi_step_deg):
        dirs = np.array([dir_from_psi_rho(psi, r) for r in rho_grid])
        h = h_many(dirs)
        sign_flip = np.nonzero(np.diff(np.sign(h)) != 0)[0]
        for j in sign_flip:
            rho = brentq(lambda r: h_one(psi, r), rho_grid[j], rho_grid[j + 1],
                         xtol=1e-10)
            points.append(dir_from_psi_rho(psi, rho))
    return points


# ---------------------------------------------------------------------------
# non-collinear cones

@dataclass(frozen=True)
class EmissionCone:
    """Closed curve of phase-matched emission directions for one daughter wave."""
    polarization: str           # mode of the traced daughter: 'slow' or 'fast'
    lambda_nm: float
    azimuth_deg: np.ndarray     # azimuth about the pump direction
    internal: np.ndarray        # (N, 3) unit directions inside the crystal
    external: np.ndarray        # (N, 3) after exit refraction
    rel_mismatch: np.ndarray    # |Δk|/|k_f| at each kept point
    angular_radius_deg: float   # mean external angular radius
    angular_width_deg: float | None = None   # filled by bandwidth sweeps

    def __len__(self):
        return len(self.azimuth_deg)


def refract_external(internal_dir, mode_index, facet_normal):
    """Snell refraction into air at a planar facet: n·sin θ_in = sin θ_out.

    The tangential direction is preserved; the returned vector is unit.
    Raises TotalInternalReflectionError when n·sin θ_in exceeds 1.
    """
    d = _unit(internal_dir)
    nrm = _unit(facet_normal)
    cos_in = float(d @ nrm)
    if cos_in < 0.0:
        nrm = -nrm
        cos_in = -cos_in
    tang = d - cos_in * nrm
    sin_in = math.sqrt(max(0.0, float(tang @ tang)))
    if sin_in < 1e-15:
        return d
    sin_out = mode_index * sin_in
    if sin_out > 1.0:
        raise TotalInternalReflectionError(
            f"n·sin θ = {sin_out:.4f} > 1 (incidence "
            f"{math.degrees(math.asin(min(1.0, sin_in))):.2f}°, n = {mode_index:.4f})")
    return math.sqrt(1.0 - sin_out * sin_out) * nrm + (sin_out / sin_in) * tang


def _golden_min(f, lo, hi, iters=48):
    """Golden-section minimizer on [lo, hi] for a unimodal scalar function."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def _trace_circle(crystal, pump_dir, lambda_f, pump_mode,
                  watch_mode, lambda_w, partner_mode, lambda_p,
                  n_azimuth, threshold, b_max_deg):
    """Trace the emission circle of one daughter wave around the pump.

    For every azimuth about the pump direction the polar offset b of the
    watched daughter is scanned; its partner's wave vector is fixed by
    momentum conservation, and the residual |Δk| is the difference between
    the required partner wavenumber and the one the crystal allows along the
    partner direction.  A coarse scan brackets the minimum, golden-section
    refines it, and points below the mismatch threshold are kept.
    """
    T = _unit(pump_dir)
    t1, t2 = _perp_basis(T)
    n_pump = mode_indices(crystal, lambda_f, T)[_MODE_IDX[pump_mode]]
    kf_mag = _k_scale(lambda_f) * n_pump
    kf_vec = kf_mag * T
    ks_w = _k_scale(lambda_w)
    ks_p = _k_scale(lambda_p)
    wi = _MODE_IDX[watch_mode]
    pi_ = _MODE_IDX[partner_mode]

    az = np.arange(n_azimuth) * (360.0 / n_azimuth)
    az_rad = np.radians(az)
    u_all = np.cos(az_rad)[:, None] * t1 + np.sin(az_rad)[:, None] * t2

    def g_grid(b_rad):
        """Signed residual for every azimuth at polar offsets b_rad (n_b,)."""
        cb, sb = np.cos(b_rad), np.sin(b_rad)
        dirs = cb[:, None, None] * T + sb[:, None, None] * u_all[None, :, :]
        flat = dirs.reshape(-1, 3)
        nw = indices_many(crystal, lambda_w, flat)[wi]
        kw = (ks_w * nw)[:, None] * flat
        ki_vec = kf_vec[None, :] - kw
        ki_req = np.linalg.norm(ki_vec, axis=1)
        dp = ki_vec / ki_req[:, None]
        npart = indices_many(crystal, lambda_p, dp)[pi_]
        return (ki_req - ks_p * npart).reshape(len(b_rad), n_azimuth)

    def g_one(b, u_vec):
        d = math.cos(b) * T + math.sin(b) * u_vec
        nw = mode_indices(crystal, lambda_w, d)[wi]
        ki_vec = kf_vec - ks_w * nw * d
        ki_req = float(np.linalg.norm(ki_vec))
        npart = mode_indices(crystal, lambda_p, ki_vec / ki_req)[pi_]
        return ki_req - ks_p * npart

    b_max = math.radians(b_max_deg)
    coarse = np.radians(np.arange(0.05, b_max_deg, 0.1))
    g_c = np.abs(g_grid(coarse))
    best = np.argmin(g_c, axis=0)

    kept_az, kept_int, kept_rel = [], [], []
    half = math.radians(0.12)
    for j in range(n_azimuth):
        b0 = coarse[best[j]]
        u_vec = u_all[j]
        lo, hi = max(1e-6, b0 - half), min(b_max, b0 + half)
        b_star = _golden_min(lambda b: abs(g_one(b, u_vec)), lo, hi)
        rel = abs(g_one(b_star, u_vec)) / kf_mag
        if rel < threshold:
            kept_az.append(az[j])
            kept_int.append(math.cos(b_star) * T + math.sin(b_star) * u_vec)
            kept_rel.append(rel)

    internal = np.array(kept_int).reshape(-1, 3)
    if len(internal):
        n_at = indices_many(crystal, lambda_w, internal)[wi]
        external = np.array([refract_external(d, n, T)
                             for d, n in zip(internal, n_at)])
        centre = external.mean(axis=0)
        centre /= np.linalg.norm(centre)
        radius = float(np.degrees(np.arccos(
            np.clip(external @ centre, -1.0, 1.0))).mean())
    else:
        external = internal.copy()
        radius = math.nan
    return EmissionCone(
        polarization=watch_mode, lambda_nm=float(lambda_w),
        azimuth_deg=np.array(kept_az), internal=internal, external=external,
        rel_mismatch=np.array(kept_rel), angular_radius_deg=radius)


def _daughters(process: PdcProcess):
    """(slow daughter, fast daughter) as (mode, λ, partner mode, partner λ)."""
    s = (process.signal_mode, process.lambda_s_nm,
         process.idler_mode, process.lambda_i_nm)
    i = (process.idler_mode, process.lambda_i_nm,
         process.signal_mode, process.lambda_s_nm)
    by_mode = {s[0]: s, i[0]: i}
    if set(by_mode) != {"slow", "fast"}:
        raise ValidationError(
            "type-II process required: one slow and one fast daughter")
    return by_mode["slow"], by_mode["fast"]


def emission_cones(crystal: CrystalDefinition, process: PdcProcess, pump_dir,
                   n_azimuth=720, threshold=MISMATCH_THRESHOLD,
                   b_max_deg=8.0):
    """(slow cone, fast cone) of non-collinear emission around pump_dir."""
    slow_d, fast_d = _daughters(process)
    cones = []
    for mode, lam_w, pmode, lam_p in (slow_d, fast_d):
        cones.append(_trace_circle(
            crystal, pump_dir, process.lambda_f_nm, process.pump_mode,
            mode, lam_w, pmode, lam_p, n_azimuth, threshold, b_max_deg))
    return tuple(cones)


# ---------------------------------------------------------------------------
# cone-intersection geometry

@dataclass(frozen=True)
class PdcGeometry:
    """The T/P/R frame built from two intersecting external emission cones."""
    pump_dir: np.ndarray
    cones: tuple
    intersections: np.ndarray       # (2, 3) external unit directions
    separation_deg: float           # angle between the two intersections
    crossing_angle_deg: float       # angle at which the circles cross (≤ 90°)
    P: np.ndarray                   # unit connector of the intersection points
    R: np.ndarray                   # unit connector of the most distant points
    P_psi_rho: tuple
    R_psi_rho: tuple


def _radius_spline(cone, T):
    """Periodic spline of the external angular radius versus azimuth."""
    if len(cone) < 8:
        raise ComputationError(
            f"{cone.polarization} cone has only {len(cone)} phase-matched "
            "points; cannot build its closed curve")
    az = np.radians(cone.azimuth_deg)
    r = np.arccos(np.clip(cone.external @ T, -1.0, 1.0))
    az_ext = np.append(az, az[0] + TWO_PI)
    r_ext = np.append(r, r[0])
    return CubicSpline(az_ext, r_ext, bc_type="periodic")


def _curve_point_tangent(spline, az, T, t1, t2):
    r = float(spline(az))
    dr = float(spline(az, 1))
    u = math.cos(az) * t1 + math.sin(az) * t2
    du = -math.sin(az) * t1 + math.cos(az) * t2
    x = math.cos(r) * T + math.sin(r) * u
    tan = (-math.sin(r) * T + math.cos(r) * u) * dr + math.sin(r) * du
    return x, tan / np.linalg.norm(tan)


def cone_geometry(cones, pump_dir) -> PdcGeometry:
    """Intersection points, T/P/R frame and crossing angle of the two cones.

    Both external circles are represented as periodic radius-versus-azimuth
    splines about the pump axis; intersections are the sign changes of the
    radius difference, refined by bracketing.  P connects the two
    intersection points and R the most distant point pair; both keep a
    deterministic sign (first significant component positive).
    """
    slow, fast = cones
    T = _unit(pump_dir)
    t1, t2 = _perp_basis(T)
    sp_s = _radius_spline(slow, T)
    sp_f = _radius_spline(fast, T)

    dense = np.linspace(0.0, TWO_PI, 4001)
    diff = sp_s(dense) - sp_f(dense)
    if np.max(np.abs(diff)) < 1e-9:
        raise ComputationError("the two cones coincide; intersection frame "
                               "is degenerate")
    flips = np.nonzero(np.diff(np.sign(diff)) != 0)[0]
    if len(flips) < 2:
        gap = math.degrees(float(np.min(np.abs(diff))))
        raise ComputationError(
            f"cones do not intersect (minimum radial separation {gap:.3f}°)")
    az_cross = [brentq(lambda a: float(sp_s(a) - sp_f(a)),
                       dense[j], dense[j + 1], xtol=1e-12) for j in flips]

    pts = {a: _curve_point_tangent(sp_s, a, T, t1, t2)[0] for a in az_cross}
    if len(az_cross) > 2:
        (a1, a2) = max(combinations(az_cross, 2),
                       key=lambda pair: _angle_deg(pts[pair[0]], pts[pair[1]]))
    else:
        a1, a2 = az_cross
    x1, tan_s1 = _curve_point_tangent(sp_s, a1, T, t1, t2)
    x2, tan_s2 = _curve_point_tangent(sp_s, a2, T, t1, t2)
    _, tan_f1 = _curve_point_tangent(sp_f, a1, T, t1, t2)
    _, tan_f2 = _curve_point_tangent(sp_f, a2, T, t1, t2)

    cross1 = math.degrees(math.acos(min(1.0, abs(float(tan_s1 @ tan_f1)))))
    cross2 = math.degrees(math.acos(min(1.0, abs(float(tan_s2 @ tan_f2)))))

    p_vec = _orient(_unit(x2 - x1))
    dots = slow.external @ fast.external.T
    i, j = np.unravel_index(int(np.argmin(dots)), dots.shape)
    r_vec = _orient(_unit(fast.external[j] - slow.external[i]))

    return PdcGeometry(
        pump_dir=T, cones=(slow, fast),
        intersections=np.array([x1, x2]),
        separation_deg=_angle_deg(x1, x2),
        crossing_angle_deg=0.5 * (cross1 + cross2),
        P=p_vec, R=r_vec,
        P_psi_rho=psi_rho_from_dir(p_vec),
        R_psi_rho=psi_rho_from_dir(r_vec))


# ---------------------------------------------------------------------------
# stereographic projection

@dataclass(frozen=True)
class StereoPoint:
    u: float
    v: float


def stereographic_project(direction) -> StereoPoint:
    """Project a direction onto the (e_1, e_3) plane from the pole at −e_2.

    The map (u, v) = (d_1, d_3)/(1 + d_2) is conformal and sends circles on
    the sphere to circles in the plane; +e_2 lands at the origin.
    """
    d = _unit(direction)
    denom = 1.0 + d[1]
    if denom < 1e-12:
        raise ValidationError("direction at the projection pole (−e_2)")
    return StereoPoint(d[0] / denom, d[2] / denom)


# ---------------------------------------------------------------------------
# bandwidth sweeps

@dataclass(frozen=True)
class PumpSweepResult:
    """External circle radii of both polarizations versus pump wavelength."""
    lambda_f_nm: np.ndarray
    radius_slow_deg: np.ndarray
    radius_fast_deg: np.ndarray
    norm_slow: np.ndarray           # radii / degenerate-pump radius
    norm_fast: np.ndarray
    slope_slow_per_nm: float        # d(normalized radius)/dλ_f
    slope_fast_per_nm: float
    slope_ratio: float              # slow / fast
    width_slow_deg: float           # |r(λ_max) − r(λ_min)|
    width_fast_deg: float
    width_ratio: float


def _circle_pair_radii(crystal, pump_dir, lambda_f, lambda_slow, lambda_fast,
                       n_azimuth, threshold, b_max_deg):
    """Radii of the slow circle at λ_slow and the fast circle at λ_fast."""
    proc = PdcProcess.from_signal(lambda_f, lambda_slow)
    slow, fast = emission_cones(crystal, proc, pump_dir, n_azimuth=n_azimuth,
                                threshold=threshold, b_max_deg=b_max_deg)
    if not (len(slow) and len(fast)):
        raise ComputationError(
            f"no phase-matched circle at λ_f = {lambda_f} nm")
    if abs(fast.lambda_nm - lambda_fast) > 1e-6:
        raise ComputationError("daughter wavelength bookkeeping error")
    return slow.angular_radius_deg, fast.angular_radius_deg


def pump_bandwidth_sweep(crystal: CrystalDefinition, pump_dir,
                         lambda_f_list=(389.0, 390.0, 391.0),
                         lambda_dc=780.0, n_azimuth=720,
                         threshold=MISMATCH_THRESHOLD,
                         b_max_deg=8.0) -> PumpSweepResult:
    """How each polarization's circle radius responds to a pump-edge shift.

    For every pump wavelength two processes are traced, each holding one
    daughter at λ_dc: the slow daughter at λ_dc (fast partner wherever energy
    conservation puts it) and the fast daughter at λ_dc.  Radii are
    normalized by the degenerate-pump (λ_dc/2) radii.
    """
    lam_ref = lambda_dc / 2.0
    r_slow, r_fast = [], []
    for lf in lambda_f_list:
        lam_partner = 1.0 / (1.0 / lf - 1.0 / lambda_dc)
        rs, _ = _circle_pair_radii(crystal, pump_dir, lf, lambda_dc,
                                   lam_partner, n_azimuth, threshold, b_max_deg)
        _, rf = _circle_pair_radii(crystal, pump_dir, lf, lam_partner,
                                   lambda_dc, n_azimuth, threshold, b_max_deg)
        r_slow.append(rs)
        r_fast.append(rf)
    ref_s, ref_f = _circle_pair_radii(crystal, pump_dir, lam_ref, lambda_dc,
                                      lambda_dc, n_azimuth, threshold,
                                      b_max_deg)
    lam = np.asarray(lambda_f_list, dtype=float)
    r_slow = np.asarray(r_slow)
    r_fast = np.asarray(r_fast)
    norm_s = r_slow / ref_s
    norm_f = r_fast / ref_f
    slope_s = float(np.polyfit(lam, norm_s, 1)[0])
    slope_f = float(np.polyfit(lam, norm_f, 1)[0])
    w_s = float(abs(r_slow[np.argmax(lam)] - r_slow[np.argmin(lam)]))
    w_f = float(abs(r_fast[np.argmax(lam)] - r_fast[np.argmin(lam)]))
    return PumpSweepResult(
        lambda_f_nm=lam, radius_slow_deg=r_slow, radius_fast_deg=r_fast,
        norm_slow=norm_s, norm_fast=norm_f,
        slope_slow_per_nm=slope_s, slope_fast_per_nm=slope_f,
        slope_ratio=slope_s / slope_f,
        width_slow_deg=w_s, width_fast_deg=w_f,
        width_ratio=w_s / w_f if w_f else math.inf)


@dataclass(frozen=True)
class FilterSweepResult:
    """Circle radii for the filter-edge processes at a fixed pump."""
    lambda_slow_nm: np.ndarray
    lambda_fast_nm: np.ndarray
    radius_slow_deg: np.ndarray
    radius_fast_deg: np.ndarray
    ref_slow_deg: float             # degenerate-process radii
    ref_fast_deg: float
    spread_slow_deg: float          # max |r − r_ref| over the edge processes
    spread_fast_deg: float
    asymmetry_ratio: float          # spread_slow / spread_fast


def filter_bandwidth_sweep(crystal: CrystalDefinition, pump_dir,
                           lambda_f=390.0, filter_edges=(778.5, 781.5),
                           n_azimuth=720, threshold=MISMATCH_THRESHOLD,
                           b_max_deg=8.0) -> FilterSweepResult:
    """Circle radii when the daughters sit at the filter's FWHM edges.

    Each edge wavelength is assigned to the slow daughter with the fast
    partner fixed by energy conservation, so both polarizations visit both
    edges across the two processes.
    """
    lam_s, lam_f_, r_s, r_f = [], [], [], []
    for edge in filter_edges:
        partner = 1.0 / (1.0 / lambda_f - 1.0 / edge)
        rs, rf = _circle_pair_radii(crystal, pump_dir, lambda_f, edge, partner,
                                    n_azimuth, threshold, b_max_deg)
        lam_s.append(edge)
        lam_f_.append(partner)
        r_s.append(rs)
        r_f.append(rf)
    lam_deg = 2.0 * lambda_f                # degenerate daughter wavelength
    ref_s, ref_f = _circle_pair_radii(crystal, pump_dir, lambda_f, lam_deg,
                                      lam_deg, n_azimuth, threshold, b_max_deg)
    r_s = np.asarray(r_s)
    r_f = np.asarray(r_f)
    spread_s = float(np.max(np.abs(r_s - ref_s)))
    spread_f = float(np.max(np.abs(r_f - ref_f)))
    return FilterSweepResult(
        lambda_slow_nm=np.asarray(lam_s), lambda_fast_nm=np.asarray(lam_f_),
        radius_slow_deg=r_s, radius_fast_deg=r_f,
        ref_slow_deg=ref_s, ref_fast_deg=ref_f,
        spread_slow_deg=spread_s, spread_fast_deg=spread_f,
        asymmetry_ratio=spread_s / spread_f if spread_f else math.inf)
