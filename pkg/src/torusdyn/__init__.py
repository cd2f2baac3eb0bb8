"""torusdyn: entropy estimation and quasiconformal dilatation diagnostics
for diffeomorphisms of the flat torus."""

from . import cli, config, dilatation, disk, domains, entropy, maps, svd2, torus
from .errors import TorusDynError

__all__ = [
    "TorusDynError",
    "cli",
    "config",
    "dilatation",
    "disk",
    "domains",
    "entropy",
    "maps",
    "svd2",
    "torus",
]

__version__ = "0.1.0"
