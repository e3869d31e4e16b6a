"""Effective second-order nonlinearity for collinear type-II interactions.

d_eff is the full tensor contraction d_eff = Σ D̂ᵖᵢ d_ijk D̂ˢⱼ D̂ᶠₖ with the unit
displacement vectors of the pump and the two down-converted waves, all
propagating along one direction (the collinear second-harmonic-generation
approximation).  The contracted 3×6 d-matrix ships with the crystal data; an
optional Kleinman symmetrization averages elements that full index
permutation symmetry forces equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ComputationError, DegenerateDirectionError, ValidationError
from .dispersion import CrystalDefinition
from .waveoptics import _unit, dir_from_psi_rho, mode_polarizations, psi_rho_from_dir
from .phasematch import (PdcProcess, _MODE_IDX, _perp_basis, collinear_curve,
                         emission_cones)

_VOIGT = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def _full_tensor(d6):
    t = np.zeros((3, 3, 3))
    for i in range(3):
        for col, (j, k) in enumerate(_VOIGT):
            t[i, j, k] = t[i, k, j] = d6[i, col]
    return t


def _contracted(t):
    d6 = np.zeros((3, 6))
    for i in range(3):
        for col, (j, k) in enumerate(_VOIGT):
            d6[i, col] = t[i, j, k]
    return d6


def kleinman_symmetrized(d6):
    """Average the full tensor over all index permutations, re-contracted.

    Elements related by permutation symmetry (e.g. the 16/21 and 23/34 pairs
    and the 14/25/36 triple of a point-group-2 matrix) collapse onto their
    group mean; the point-group zero pattern is preserved because
    permutations keep each element's index multiset.
    """
    t = _full_tensor(np.asarray(d6, dtype=float))
    perms = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
    return _contracted(sum(np.transpose(t, p) for p in perms) / 6.0)


def _effective_matrix(crystal: CrystalDefinition, kleinman: bool):
    if crystal.d_matrix_frame != "crystal-physical":
        raise ValidationError(
            f"unsupported d-matrix frame {crystal.d_matrix_frame!r}")
    if kleinman:
        return kleinman_symmetrized(crystal.d_matrix)
    if crystal.d_matrix_kleinman:
        raise ValidationError(
            f"{crystal.name} ships an already-symmetrized d-matrix; the "
            "independent element set needed for kleinman=False is missing")
    return np.asarray(crystal.d_matrix, dtype=float)


def _pair_column(ds, di):
    """Symmetrized products of the two daughter D-vectors in Voigt order."""
    return np.array([
        ds[0] * di[0], ds[1] * di[1], ds[2] * di[2],
        ds[1] * di[2] + ds[2] * di[1],
        ds[0] * di[2] + ds[2] * di[0],
        ds[0] * di[1] + ds[1] * di[0]])


def deff_collinear(crystal: CrystalDefinition, direction, lambda_dc,
                   process: PdcProcess, kleinman=False):
    """|d_eff| in pm/V for a collinear interaction along `direction`.

    The pump D-vector is evaluated at the process pump wavelength, both
    down-converted D-vectors at lambda_dc (the d tensor itself is treated as
    dispersionless).
    """
    d6 = _effective_matrix(crystal, kleinman)
    d = _unit(direction)
    pol_dc = mode_polarizations(crystal, lambda_dc, d)
    pol_f = mode_polarizations(crystal, process.lambda_f_nm, d)
    dp = pol_f[_MODE_IDX[process.pump_mode]]
    ds = pol_dc[_MODE_IDX[process.signal_mode]]
    di = pol_dc[_MODE_IDX[process.idler_mode]]
    return float(abs(dp @ (d6 @ _pair_column(ds, di))))


@dataclass(frozen=True)
class DeffMap:
    """d_eff sampled on a (ψ, ρ) grid with the collinear curve overlaid.

    values[i, j] belongs to (rho_deg[i], psi_deg[j]); nodes where the
    polarization is undefined (optic-axis directions) hold NaN.
    """
    psi_deg: np.ndarray
    rho_deg: np.ndarray
    values: np.ndarray
    curve_psi_rho: np.ndarray       # (M, 2) collinear-curve overlay
    lambda_dc: float
    kleinman: bool
    process: PdcProcess


def deff_map(crystal: CrystalDefinition, lambda_dc, process: PdcProcess,
             psi_range=(0.0, 90.0), rho_range=(0.0, 90.0), step_deg=0.25,
             kleinman=False) -> DeffMap:
    """Evaluate deff_collinear on a quadrant grid (collinear approximation)."""
    psi = np.arange(psi_range[0], psi_range[1] + 1e-9, step_deg)
    rho = np.arange(rho_range[0], rho_range[1] + 1e-9, step_deg)
    values = np.empty((len(rho), len(psi)))
    for i, r in enumerate(rho):
        for j, p in enumerate(psi):
            try:
                values[i, j] = deff_collinear(
                    crystal, dir_from_psi_rho(p, r), lambda_dc, process,
                    kleinman=kleinman)
            except DegenerateDirectionError:
                values[i, j] = math.nan
    curve = collinear_curve(crystal, process)
    overlay = np.array([psi_rho_from_dir(d) for d in curve]).reshape(-1, 2)
    return DeffMap(psi_deg=psi, rho_deg=rho, values=values,
                   curve_psi_rho=overlay, lambda_dc=float(lambda_dc),
                   kleinman=kleinman, process=process)


# ---------------------------------------------------------------------------
# pump-direction design scan

@dataclass(frozen=True)
class DesignCandidate:
    direction: np.ndarray
    psi_deg: float
    rho_deg: float
    deff_pm_v: float
    crossing_angle_deg: float       # NaN when the circles do not intersect
    separation_deg: float           # distance between the circle contacts


@dataclass(frozen=True)
class DesignScanResult:
    evaluated: tuple                # every collinear-curve point visited
    candidates: tuple               # the subset inside the angle window,
                                    # sorted by d_eff descending
    angle_window: tuple


def _fit_circle(points_2d):
    """Algebraic least-squares circle fit; returns (centre, radius)."""
    x, y = points_2d[:, 0], points_2d[:, 1]
    a = np.column_stack([2.0 * x, 2.0 * y, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(a, x * x + y * y, rcond=None)
    cx, cy, c0 = sol
    return np.array([cx, cy]), math.sqrt(max(c0 + cx * cx + cy * cy, 0.0))


def _chart_points(cone, pump_dir, t1, t2, b_floor_deg=0.05):
    """External cone points in the azimuthal-equidistant chart about the pump.

    Points closer than b_floor to the pump axis are dropped: a pump sitting
    exactly on the collinear curve re-emits along itself at every azimuth,
    and those degenerate points would bias the circle fit.
    """
    b = np.degrees(np.arccos(np.clip(cone.external @ pump_dir, -1.0, 1.0)))
    keep = b > b_floor_deg
    if keep.sum() < 8:
        return None
    ext = cone.external[keep]
    x = ext @ t1
    y = ext @ t2
    az = np.arctan2(y, x)
    br = np.radians(b[keep])
    return np.column_stack([br * np.cos(az), br * np.sin(az)])


def _circle_crossing(crystal, process, pump_dir, n_azimuth, threshold):
    """(crossing angle, contact separation) of the two emission circles.

    Both circles are traced coarsely, fitted as planar circles in the
    transverse chart, and intersected in closed form; the angle between the
    circles at their contacts is folded to ≤ 90°.  Returns NaNs when either
    circle is missing or they do not intersect.
    """
    T = _unit(pump_dir)
    t1, t2 = _perp_basis(T)
    try:
        slow, fast = emission_cones(crystal, process, T, n_azimuth=n_azimuth,
                                    threshold=threshold)
    except ComputationError:
        return math.nan, math.nan
    pts_s = _chart_points(slow, T, t1, t2)
    pts_f = _chart_points(fast, T, t1, t2)
    if pts_s is None or pts_f is None:
        return math.nan, math.nan
    c_s, r_s = _fit_circle(pts_s)
    c_f, r_f = _fit_circle(pts_f)
    gap = float(np.linalg.norm(c_s - c_f))
    if gap >= r_s + r_f or gap <= abs(r_s - r_f) or gap < 1e-12:
        return math.nan, math.nan
    cos_t = (r_s * r_s + r_f * r_f - gap * gap) / (2.0 * r_s * r_f)
    angle = math.degrees(math.acos(max(-1.0, min(1.0, cos_t))))
    if angle > 90.0:
        angle = 180.0 - angle
    # chord between the two contact points of intersecting circles
    s = 0.5 * (r_s + r_f + gap)
    area = math.sqrt(max(s * (s - r_s) * (s - r_f) * (s - gap), 0.0))
    half_chord = 2.0 * area / gap
    return angle, math.degrees(2.0 * math.asin(min(1.0, half_chord)))


def design_scan(crystal: CrystalDefinition, lambda_f, process=None,
                kleinman=False, psi_step_deg=1.0, n_azimuth=96,
                angle_window=(88.0, 92.0),
                threshold=5e-5) -> DesignScanResult:
    """Rank collinear-curve points as pump-direction candidates.

    Every curve point gets d_eff and the crossing angle of its two emission
    circles; candidates are the points whose crossing angle falls inside
    angle_window, sorted by d_eff.  An empty candidate tuple (window never
    met) is a valid result, not an error.
    """
    if process is None:
        process = PdcProcess.degenerate(float(lambda_f))
    curve = collinear_curve(crystal, process, psi_step_deg=psi_step_deg)
    if not curve:
        raise ComputationError("collinear curve is empty at these wavelengths")
    lambda_dc = 2.0 / (1.0 / process.lambda_s_nm + 1.0 / process.lambda_i_nm)
    rows = []
    for d in curve:
        try:
            deff = deff_collinear(crystal, d, lambda_dc, process,
                                  kleinman=kleinman)
        except DegenerateDirectionError:
            continue
        angle, sep = _circle_crossing(crystal, process, d, n_azimuth,
                                      threshold)
        psi, rho = psi_rho_from_dir(d)
        rows.append(DesignCandidate(direction=d, psi_deg=psi, rho_deg=rho,
                                    deff_pm_v=deff, crossing_angle_deg=angle,
                                    separation_deg=sep))
    lo, hi = angle_window
    picked = sorted((r for r in rows
                     if math.isfinite(r.crossing_angle_deg)
                     and lo <= r.crossing_angle_deg <= hi),
                    key=lambda r: -r.deff_pm_v)
    return DesignScanResult(evaluated=tuple(rows), candidates=tuple(picked),
                            angle_window=(float(lo), float(hi)))
