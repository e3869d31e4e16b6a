"""Crystal definitions, principal refractive indices, indicatrix orientation.

A crystal is described by a declarative JSON document (see data/bibo.json for
the reference layout): three Sellmeier sets for the principal indices along the
indicatrix axes e_1_0, e_2_0, e_3_0, an orientation model giving the rotation
angle Phi(lambda) of those axes about e_2, a contracted d-matrix, and a
transparency interval.  Everything downstream consumes the validated
CrystalDefinition produced here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import ValidationError

_REQUIRED_FIELDS = (
    "name", "symmetry", "sellmeier", "indicatrix_orientation",
    "d_matrix", "transparency_nm", "handedness",
)

_SYMMETRIES = ("biaxial-monoclinic", "uniaxial")


def _sellmeier_abcd(coef, lam_um_sq):
    """n^2 = A + B/(lambda^2 - C) - D*lambda^2, lambda in micrometres."""
    a, b, c, d = coef
    return a + b / (lam_um_sq - c) - d * lam_um_sq


SELLMEIER_FORMULAS = {
    "sellmeier_abcd": _sellmeier_abcd,
}


@dataclass(frozen=True)
class SellmeierSet:
    axis: str
    formula: str
    coefficients: tuple
    provenance: str = ""

    def index(self, lam_nm):
        lam2 = (lam_nm * 1e-3) ** 2
        n2 = SELLMEIER_FORMULAS[self.formula](self.coefficients, lam2)
        if n2 <= 1.0:
            raise ValidationError(
                f"Sellmeier set for axis {self.axis} gives n^2 = {n2:.4f} <= 1 "
                f"at {lam_nm} nm")
        return math.sqrt(n2)


@dataclass(frozen=True)
class PrincipalIndices:
    """Indices n_1, n_2, n_3 along e_1_0, e_2_0, e_3_0 at one wavelength."""
    n_1: float
    n_2: float
    n_3: float
    lambda_nm: float

    def as_array(self):
        return np.array([self.n_1, self.n_2, self.n_3])

    def sorted(self):
        """(n_x, n_y, n_z) in the ascending-index naming convention."""
        return tuple(sorted((self.n_1, self.n_2, self.n_3)))


@dataclass(frozen=True)
class FrameRotation:
    """Rotation between the crystal-physical frame {e_i} and the indicatrix
    axes {e_i_0(lambda)}.  The rotation is about e_2 (e_2_0 = e_2) by the
    orientation angle Phi; `matrix` has the indicatrix axes as rows, so
    `matrix @ v` expresses a crystal-frame vector in indicatrix axes.
    """
    phi_deg: float
    lambda_nm: float
    matrix: np.ndarray

    def to_indicatrix(self, v):
        return self.matrix @ np.asarray(v, dtype=float)

    def to_crystal(self, v):
        return self.matrix.T @ np.asarray(v, dtype=float)


@dataclass
class CrystalDefinition:
    name: str
    symmetry: str
    sellmeier: tuple            # three SellmeierSet, axis order e_1_0..e_3_0
    phi_interp: object          # callable nm -> degrees
    rotation_sense: int
    d_matrix: np.ndarray        # 3x6, pm/V
    d_matrix_frame: str
    d_matrix_kleinman: bool
    transparency_nm: tuple
    handedness: int
    provenance: str = ""
    _band_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def is_uniaxial(self):
        return self.symmetry == "uniaxial"

    def check_wavelength(self, lam_nm):
        lo, hi = self.transparency_nm
        if not (lo <= lam_nm <= hi):
            raise ValidationError(
                f"{lam_nm} nm outside {self.name} transparency "
                f"[{lo}, {hi}] nm")


def _build_phi(model, symmetry):
    if "phi_formula" in model:
        a, b, c = model["phi_formula"]["coefficients"]

        def phi(lam_nm):
            lam2 = (lam_nm * 1e-3) ** 2
            return a - b / (lam2 - c)
        return phi
    table = np.asarray(model["phi_table"], dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
        raise ValidationError("phi_table must be a list of [nm, degrees] pairs")
    lam, ang = table[:, 0], table[:, 1]
    if symmetry == "uniaxial" and np.any(ang != 0.0):
        raise ValidationError("uniaxial crystals require Phi identically 0")
    interp = PchipInterpolator(lam, ang, extrapolate=True)
    return lambda lam_nm: float(interp(lam_nm))


def load_crystal(source) -> CrystalDefinition:
    """Parse and validate a crystal-definition document.

    `source` may be a path, a JSON string, or an already-parsed dict.
    Raises ValidationError on parse failure, missing fields, an unknown
    Sellmeier formula family, or a set that dips below n = 1 inside the
    declared transparency interval.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = None
        if isinstance(source, (str, Path)):
            p = Path(source)
            try:
                looks_like_path = p.suffix == ".json" or p.exists()
            except OSError:
                looks_like_path = False
            if looks_like_path:
                try:
                    text = p.read_text()
                except OSError as exc:
                    raise ValidationError(f"cannot read crystal file: {exc}") from exc
            else:
                text = str(source)
        else:
            text = source.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"crystal document does not parse: {exc}") from exc

    for key in _REQUIRED_FIELDS:
        if key not in doc:
            raise ValidationError(f"missing field: {key}")
    if doc["symmetry"] not in _SYMMETRIES:
        raise ValidationError(f"unknown symmetry: {doc['symmetry']!r}")
    if len(doc["sellmeier"]) != 3:
        raise ValidationError("exactly three Sellmeier sets are required")

    sets = []
    for entry in doc["sellmeier"]:
        if entry.get("formula") not in SELLMEIER_FORMULAS:
            raise ValidationError(
                f"unknown Sellmeier formula family: {entry.get('formula')!r}")
        sets.append(SellmeierSet(
            axis=entry.get("axis", "?"),
            formula=entry["formula"],
            coefficients=tuple(float(c) for c in entry["coefficients"]),
            provenance=entry.get("provenance", "")))

    d = np.asarray(doc["d_matrix"], dtype=float)
    if d.shape != (3, 6) or not np.all(np.isfinite(d)):
        raise ValidationError("d_matrix must be a finite 3x6 array")

    lo, hi = (float(v) for v in doc["transparency_nm"])
    if not (0 < lo < hi):
        raise ValidationError("transparency_nm must be an increasing positive pair")

    orient = doc["indicatrix_orientation"]
    crystal = CrystalDefinition(
        name=doc["name"],
        symmetry=doc["symmetry"],
        sellmeier=tuple(sets),
        phi_interp=_build_phi(orient, doc["symmetry"]),
        rotation_sense=int(orient.get("rotation_sense", 1)),
        d_matrix=d,
        d_matrix_frame=doc.get("d_matrix_frame", "crystal-physical"),
        d_matrix_kleinman=bool(doc.get("d_matrix_kleinman", False)),
        transparency_nm=(lo, hi),
        handedness=int(doc["handedness"]),
        provenance=doc.get("provenance", ""),
    )

    # sanity sweep of the declared transparency interval
    for lam in np.linspace(lo, hi, 41):
        for s in crystal.sellmeier:
            s.index(lam)            # raises if n <= 1
    if crystal.is_uniaxial:
        pairs = [s.coefficients for s in crystal.sellmeier]
        if len({pairs[0], pairs[1], pairs[2]}) != 2:
            raise ValidationError(
                "uniaxial crystal needs exactly two identical principal sets")
    return crystal


def bundled_crystal(name) -> CrystalDefinition:
    """Load one of the crystals shipped with the package ('bibo' or 'bbo')."""
    stem = str(name).lower().removesuffix(".json")
    try:
        text = resources.files("pdckit.data").joinpath(f"{stem}.json").read_text()
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise ValidationError(f"no bundled crystal named {name!r}") from exc
    return load_crystal(text)


def principal_indices(crystal: CrystalDefinition, lam_nm) -> PrincipalIndices:
    """The three principal refractive indices at `lam_nm` (within transparency)."""
    crystal.check_wavelength(lam_nm)
    n = tuple(s.index(lam_nm) for s in crystal.sellmeier)
    return PrincipalIndices(n[0], n[1], n[2], float(lam_nm))


def indicatrix_rotation(crystal: CrystalDefinition, lam_nm) -> FrameRotation:
    """Orientation of the indicatrix axes at `lam_nm`.

    The axes {e_i_0} are obtained from {e_i} by rotating about e_2 by
    Phi(lambda) with the crystal's stored sense; for uniaxial crystals Phi
    is identically zero and the rotation is the identity.
    """
    crystal.check_wavelength(lam_nm)
    phi = crystal.phi_interp(lam_nm)
    s = crystal.rotation_sense
    cp = math.cos(math.radians(phi))
    sp = s * math.sin(math.radians(phi))
    # rows: e_1_0, e_2_0, e_3_0 expressed in {e_i}
    m = np.array([[cp, 0.0, -sp],
                  [0.0, 1.0, 0.0],
                  [sp, 0.0, cp]])
    return FrameRotation(phi_deg=phi, lambda_nm=float(lam_nm), matrix=m)


def dn_dlambda(crystal: CrystalDefinition, lam_nm, direction, mode,
               step_nm=0.1):
    """Central-difference wavelength derivative (per nm) of a mode index.

    `mode` is 'fast' or 'slow'; the step is 0.1 nm by default, well below any
    spectral feature of the Sellmeier sets yet far above double-precision
    noise on n.
    """
    from .waveoptics import mode_indices
    crystal.check_wavelength(lam_nm - step_nm)
    crystal.check_wavelength(lam_nm + step_nm)
    idx = {"fast": 0, "slow": 1}[mode]
    hi = mode_indices(crystal, lam_nm + step_nm, direction)[idx]
    lo = mode_indices(crystal, lam_nm - step_nm, direction)[idx]
    return (hi - lo) / (2.0 * step_nm)
