"""
betaperturb

Rank-one multiplicative non-Hermitian perturbations of Gaussian, Laguerre and
chiral beta-ensembles: samplers, spectra, closed-form densities, inverse maps
and a verification harness, with a command line in ``app.py``.
"""
