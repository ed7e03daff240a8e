"""
Small rank-one couplings can destroy stability
==============================================

An exponentially stable block diag(-1 + ik) coupled to a polynomially
stable block diag(-1/k^a + ik) through mode n alone. The four-norm product
shrinks like n^(-a), yet i n is always an eigenvalue.
"""

from fractions import Fraction

import numpy as np

from polystab import LoopOperatorError, dlambda_margin, full_graph_norms, resolvent_full_schur, rhp_grid
from polystab.repro import exp_pol_rankone_system

for n in (2, 5, 10, 40):
    sys = exp_pol_rankone_system(1.0, Fraction(5, 3), n, 64)
    eig = np.linalg.eigvals(sys.matrix)
    gap = np.min(np.abs(eig - 1j * n))
    product = np.prod(full_graph_norms(sys))
    cert = dlambda_margin(sys, rhp_grid(np.arange(1, 2 * n + 1)))
    print(f"n = {n:3d}: norm product {product:.3e}, |eig - in| = {gap:.1e}, "
          f"min s(D) = {cert.d_min_singular:.1e} at {cert.argmin}")

# %% The Schur-complement resolvent refuses to return a value at the singular point
try:
    resolvent_full_schur(exp_pol_rankone_system(1.0, Fraction(5, 3), 5, 64), 5j)
except LoopOperatorError as exc:
    print("structured resolvent at 5i:", exc)
