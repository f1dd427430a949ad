"""linkforge: planar linkage catalogs, kinematics, paired-image datasets,
evaluation and curve-driven mechanism synthesis."""

from . import backend

__version__ = "0.1.0"


def backend_name():
    """Active kernel backend: "compiled" or "python"."""
    return backend.NAME
