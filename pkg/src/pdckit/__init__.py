"""pdckit — design toolkit for non-collinear type-II PDC sources.

Covers dispersion and indicatrix orientation of biaxial/uniaxial crystals,
per-direction wave solutions (mode indices, polarizations, Poynting vectors,
walk-offs), phase-matching searches (collinear curves, emission cones, cone
geometry), effective-nonlinearity maps, and joint-spectrum / spectral-overlap
estimates, plus a CLI front end.
"""

__version__ = "0.1.0"


class PdckitError(Exception):
    """Base class for all package errors."""


class ValidationError(PdckitError, ValueError):
    """Bad input: out-of-range wavelength, malformed crystal file, etc."""


class ComputationError(PdckitError, RuntimeError):
    """A well-formed request that has no computable answer."""


class DegenerateDirectionError(ComputationError):
    """Propagation along (or too close to) an optic axis: the two mode
    indices coincide and the polarization decomposition is undefined."""


class TotalInternalReflectionError(ComputationError):
    """Exit refraction impossible at this incidence angle."""


class NoPhaseMatchError(ComputationError):
    """No phase-matching solution exists for the requested configuration."""


from .dispersion import load_crystal, bundled_crystal  # noqa: E402,F401
