"""Exact classical waves, spectral propagators and Dyson-Schwinger checks.

Modules
-------
elliptic
    Jacobi ``sn, cn, dn`` and ``K`` in the parameter convention (``m < 1``).
solutions
    Scalar ``phi**4`` and diagonal SU(2) waves built on ``sn(., -1)``.
fluctuations
    Lame operator about the scalar wave, zero mode and stability check.
spectral
    Mass spectrum, weights, propagator, rest-frame kernel, regularization.
dyson_schwinger
    Residuals of the correlator tower and the Yang-Mills reduction.
lattice
    Symplectic evolution and spectral mass-gap measurement.
report, cli
    JSON/CSV reports and the ``massgap`` command.
"""
__version__ = "0.1.0"
