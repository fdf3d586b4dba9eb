"""Distributed quantum metrology with two-mode nonclassical input light.

Subpackages:
    states     single-mode state catalog, moments, metrological power
    network    weight vectors, optimal network synthesis, mesh decomposition
    qfim       analytic Fisher matrices, sensitivity bounds, scaling scans
    focksim    truncated Fock-space brute-force oracle and photon counting
    protocols  two-step function estimation and energy allocation
    cli        command-line driver
"""

__version__ = "0.1.0"

from . import states, network, qfim, focksim, protocols  # noqa: F401
