"""Plane-wave propagation in anisotropic crystals.

For a wave normal k̂ and wavelength the crystal supports two polarization
eigenmodes ("fast" and "slow") with distinct refractive indices, orthogonal
displacement vectors D, and Poynting vectors that generally walk off from k̂.
Everything here works in the crystal-physical frame {e_i}; principal-axis
quantities are obtained through the wavelength-dependent indicatrix rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import DegenerateDirectionError, ValidationError
from .dispersion import CrystalDefinition, indicatrix_rotation, principal_indices

C_UM_PER_FS = 0.299792458       # vacuum speed of light in micrometres per femtosecond

#: Two mode indices closer than this are treated as degenerate (optic axis).
DEGENERACY_TOL = 1e-9

_MODES = ("fast", "slow")


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = math.sqrt(v @ v)
    if not n > 0:
        raise ValidationError("direction vector must be non-zero")
    return v / n


def dir_from_psi_rho(psi_deg, rho_deg):
    """Unit vector for spherical angles (psi, rho) in the crystal frame.

    psi is measured in the (e_1, e_3) plane from e_1 toward e_3; rho is the
    elevation out of that plane toward e_2.
    """
    psi = math.radians(psi_deg)
    rho = math.radians(rho_deg)
    return np.array([math.cos(rho) * math.cos(psi),
                     math.sin(rho),
                     math.cos(rho) * math.sin(psi)])


def psi_rho_from_dir(d):
    """Inverse of dir_from_psi_rho; returns (psi_deg, rho_deg)."""
    d = _unit(d)
    rho = math.degrees(math.asin(max(-1.0, min(1.0, d[1]))))
    psi = math.degrees(math.atan2(d[2], d[0]))
    return psi, rho


def _band_data(crystal: CrystalDefinition, lam_nm):
    """(a, n, basis) at one wavelength, cached on the crystal instance.

    a = 1/n_i^2 along the indicatrix axes, n the principal indices, basis the
    rotation matrix with the indicatrix axes as rows.
    """
    key = float(lam_nm)
    hit = crystal._band_cache.get(key)
    if hit is None:
        p = principal_indices(crystal, lam_nm)
        n = p.as_array()
        basis = indicatrix_rotation(crystal, lam_nm).matrix
        hit = (1.0 / (n * n), n, basis)
        if len(crystal._band_cache) > 200000:
            crystal._band_cache.clear()
        crystal._band_cache[key] = hit
    return hit


def _fresnel_u(a, q):
    """Roots of the wave-normal equation, quadratic in u = 1/n^2.

    Returns (u_plus, u_minus) with u_plus >= u_minus; u_plus belongs to the
    fast mode (smaller index).
    """
    q2 = q * q
    b1 = (q2[0] * (a[1] + a[2]) + q2[1] * (a[0] + a[2]) + q2[2] * (a[0] + a[1]))
    c0 = q2[0] * a[1] * a[2] + q2[1] * a[0] * a[2] + q2[2] * a[0] * a[1]
    disc = b1 * b1 - 4.0 * c0
    root = math.sqrt(disc) if disc > 0.0 else 0.0
    u_plus = 0.5 * (b1 + root)
    return u_plus, 0.5 * (b1 - root)


def mode_indices(crystal: CrystalDefinition, lam_nm, k_dir):
    """(n_fast, n_slow) for propagation along k_dir, n_fast <= n_slow."""
    a, _, basis = _band_data(crystal, lam_nm)
    q = basis @ _unit(k_dir)
    u_plus, u_minus = _fresnel_u(a, q)
    return 1.0 / math.sqrt(u_plus), 1.0 / math.sqrt(u_minus)


def indices_many(crystal: CrystalDefinition, lam_nm, dirs):
    """mode_indices vectorized over an (N, 3) array of unit directions."""
    a, _, basis = _band_data(crystal, lam_nm)
    q2 = (np.asarray(dirs, dtype=float) @ basis.T) ** 2
    b1 = q2 @ np.array([a[1] + a[2], a[0] + a[2], a[0] + a[1]])
    c0 = q2 @ np.array([a[1] * a[2], a[0] * a[2], a[0] * a[1]])
    root = np.sqrt(np.maximum(b1 * b1 - 4.0 * c0, 0.0))
    return 1.0 / np.sqrt(0.5 * (b1 + root)), 1.0 / np.sqrt(0.5 * (b1 - root))


def _pol_ratio(a, q, u):
    """D components from the eigenmode ratio formula D_i ∝ q_i/(a_i − u).

    Returns None when a denominator collapses (propagation in a principal
    plane with the mode polarized along a principal axis) so the caller can
    fall back to the exact transverse eigenproblem.
    """
    den = a - u
    if np.any(np.abs(den) < 1e-10):
        return None
    d = q / den
    norm = math.sqrt(d @ d)
    if not np.isfinite(norm) or norm < 1e-8:
        return None
    return d / norm


def _pol_transverse(a, q, u):
    """Exact 2x2 eigenproblem restricted to the plane perpendicular to q."""
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(q)))] = 1.0
    t1 = seed - (seed @ q) * q
    t1 /= math.sqrt(t1 @ t1)
    t2 = np.cross(q, t1)
    m = np.array([[t1 @ (a * t1), t1 @ (a * t2)],
                  [t2 @ (a * t1), t2 @ (a * t2)]])
    w, v = np.linalg.eigh(m)
    i = int(np.argmin(np.abs(w - u)))
    d = v[0, i] * t1 + v[1, i] * t2
    return d / math.sqrt(d @ d)


def _fix_sign(d):
    if d[int(np.argmax(np.abs(d)))] < 0.0:
        return -d
    return d


def mode_polarizations(crystal: CrystalDefinition, lam_nm, k_dir,
                       tol=DEGENERACY_TOL):
    """Unit displacement vectors (D_fast, D_slow) in the crystal frame.

    Computed from the component-ratio form of the eigenmode equations in the
    indicatrix axes, then rotated back.  The returned sign is deterministic
    (largest-magnitude component positive); callers comparing against
    reference directions should fold angles to [0, 90).
    """
    a, _, basis = _band_data(crystal, lam_nm)
    q = basis @ _unit(k_dir)
    u_plus, u_minus = _fresnel_u(a, q)
    n_f, n_s = 1.0 / math.sqrt(u_plus), 1.0 / math.sqrt(u_minus)
    if n_s - n_f < tol:
        raise DegenerateDirectionError(
            f"mode indices coincide along this direction "
            f"(split {n_s - n_f:.2e}); polarization is undefined")
    out = []
    for u in (u_plus, u_minus):
        d = _pol_ratio(a, q, u)
        if d is None:
            d = _pol_transverse(a, q, u)
        out.append(_fix_sign(basis.T @ d))
    return tuple(out)


def _rotated(k, axis, angle):
    # axis is unit and perpendicular to k, so Rodrigues reduces to two terms
    return k * math.cos(angle) + np.cross(axis, k) * math.sin(angle)


def poynting_vector(crystal: CrystalDefinition, lam_nm, k_dir, mode,
                    step_rad=1e-4):
    """Unit Poynting vector of one mode, from its wave-vector surface.

    The surface point is n(k̂)·k̂; the energy flow is normal to that surface.
    The normal is found numerically: the wave normal is rotated by ±step_rad
    about two orthogonal transverse axes and their bisector, the chords
    between opposite perturbations are formed, and the normal of the plane
    they span is taken (cross products of the chord vectors), oriented to
    positive projection on k̂.  Pairing opposite perturbations makes the
    chords central differences, so the result converges at second order in
    the step.
    """
    if mode not in _MODES:
        raise ValidationError(f"mode must be 'fast' or 'slow', got {mode!r}")
    k = _unit(k_dir)
    a, _, basis = _band_data(crystal, lam_nm)
    idx = 0 if mode == "fast" else 1
    n_f, n_s = mode_indices(crystal, lam_nm, k)
    if n_s - n_f < DEGENERACY_TOL:
        raise DegenerateDirectionError(
            "wave-vector surfaces touch along this direction (optic axis); "
            "the surface normal is not single-valued")

    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(k)))] = 1.0
    t1 = seed - (seed @ k) * k
    t1 /= math.sqrt(t1 @ t1)
    t2 = np.cross(k, t1)
    bis = (t1 + t2) / math.sqrt(2.0)

    chords = []
    for axis in (t1, t2, bis):
        pts = []
        for sgn in (1.0, -1.0):
            kk = _rotated(k, axis, sgn * step_rad)
            n = mode_indices(crystal, lam_nm, kk)[idx]
            pts.append(n * kk)
        chords.append(pts[0] - pts[1])
    c1, c2, c3 = chords
    normal = np.cross(c1, c2) + np.cross(c2, c3) + np.cross(c3, c1)
    normal /= math.sqrt(normal @ normal)
    if normal @ k < 0.0:
        normal = -normal
    return normal


def _is_isotropic(a):
    return float(np.ptp(a)) < 1e-12


@dataclass(frozen=True)
class WalkoffResult:
    """Angle between the two modes' Poynting vectors and the resulting
    transverse displacement after a slab of thickness L_mm."""
    theta_swo_deg: float
    displacement_um: float
    L_mm: float


def spatial_walkoff(crystal: CrystalDefinition, lam_nm, k_dir, L_mm) -> WalkoffResult:
    a, _, _ = _band_data(crystal, lam_nm)
    if _is_isotropic(a):
        return WalkoffResult(0.0, 0.0, float(L_mm))
    s_f = poynting_vector(crystal, lam_nm, k_dir, "fast")
    s_s = poynting_vector(crystal, lam_nm, k_dir, "slow")
    theta = math.degrees(math.acos(max(-1.0, min(1.0, s_f @ s_s))))
    disp = float(L_mm) * 1e3 * math.tan(math.radians(theta))
    return WalkoffResult(theta, disp, float(L_mm))


def ray_indices(crystal: CrystalDefinition, lam_nm, k_dir):
    """(n_r_fast, n_r_slow): phase index projected on the ray, n_r = n cos α."""
    a, _, _ = _band_data(crystal, lam_nm)
    k = _unit(k_dir)
    n_f, n_s = mode_indices(crystal, lam_nm, k)
    if _is_isotropic(a):
        return n_f, n_s
    cos_f = poynting_vector(crystal, lam_nm, k, "fast") @ k
    cos_s = poynting_vector(crystal, lam_nm, k, "slow") @ k
    return n_f * cos_f, n_s * cos_s


@dataclass(frozen=True)
class TemporalWalkoff:
    """Differential delay of the two modes across a slab: δT = L·Δn_r/c."""
    delta_T_fs: float
    delta_n_r: float
    L_mm: float


def temporal_walkoff(crystal: CrystalDefinition, lam_nm, k_dir, L_mm) -> TemporalWalkoff:
    if L_mm < 0:
        raise ValidationError("slab thickness must be non-negative")
    n_r_f, n_r_s = ray_indices(crystal, lam_nm, k_dir)
    dn_r = n_r_s - n_r_f
    delta_t = float(L_mm) * 1e3 * dn_r / C_UM_PER_FS
    return TemporalWalkoff(delta_t, dn_r, float(L_mm))


@dataclass(frozen=True)
class WaveSolution:
    """Everything about plane-wave propagation along one direction."""
    lambda_nm: float
    k_dir: np.ndarray
    n_fast: float
    n_slow: float
    D_fast: np.ndarray
    D_slow: np.ndarray
    S_fast: np.ndarray
    S_slow: np.ndarray
    alpha_fast_deg: float
    alpha_slow_deg: float
    n_r_fast: float
    n_r_slow: float


def solve_wave(crystal: CrystalDefinition, lam_nm, k_dir) -> WaveSolution:
    """Bundle indices, polarizations, Poynting vectors and ray indices."""
    k = _unit(k_dir)
    n_f, n_s = mode_indices(crystal, lam_nm, k)
    d_f, d_s = mode_polarizations(crystal, lam_nm, k)
    s_f = poynting_vector(crystal, lam_nm, k, "fast")
    s_s = poynting_vector(crystal, lam_nm, k, "slow")
    a_f = math.degrees(math.acos(max(-1.0, min(1.0, s_f @ k))))
    a_s = math.degrees(math.acos(max(-1.0, min(1.0, s_s @ k))))
    return WaveSolution(
        lambda_nm=float(lam_nm), k_dir=k,
        n_fast=n_f, n_slow=n_s,
        D_fast=d_f, D_slow=d_s,
        S_fast=s_f, S_slow=s_s,
        alpha_fast_deg=a_f, alpha_slow_deg=a_s,
        n_r_fast=n_f * math.cos(math.radians(a_f)),
        n_r_slow=n_s * math.cos(math.radians(a_s)),
    )
