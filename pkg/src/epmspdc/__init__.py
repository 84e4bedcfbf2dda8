"""Type-II quasi-phase-matched down-conversion under extended phase matching.

Modules: ``dispersion`` (Sellmeier indices and analytic derivatives),
``phasematch`` (mismatch, EPM solver, bandwidths), ``jsa`` (joint spectra,
Schmidt analysis), ``hom`` (HOM curves and dip fits), ``counts`` (gated
coincidence statistics), ``cli`` (command-line front end).
"""

from .dispersion import SellmeierSet, load_sellmeier_file
from .errors import ConfigError, EpmError
from .phasematch import CrystalSpec, EpmSolution, solve_epm_point

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CrystalSpec",
    "EpmError",
    "EpmSolution",
    "SellmeierSet",
    "load_sellmeier_file",
    "solve_epm_point",
]
