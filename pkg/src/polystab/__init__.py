"""Polynomial stability of semigroups generated by 2x2 block operator matrices.

Finite spectral truncations of block generators are assembled, their
resolvents and semigroups evaluated, decay exponents fitted from frequency
and time data, and sufficient stability conditions checked on declared
exponents and computed graph norms.
"""

from ._exponents import EXPONENTIAL
from .blocks import (FULL, LOWER_TRIANGULAR, TRIANGULAR, BlockSystem, CouplingFactors, Exponents,
                     assemble_full, assemble_triangular, similarity_swap)
from .errors import (DimensionError, InsufficientSamplesError, LoopOperatorError, NonConvergentTailError,
                     NumericalError, PolystabError, QuadratureError, SpectralPointError, ValidationError)
from .resolvent import (PowerFit, SweepSamples, coupling_growth_product, fit_growth_exponent,
                        frequency_grid, gomilko_closed_form, gomilko_integral, resolvent_direct,
                        resolvent_full_schur, resolvent_norm_sweep, resolvent_triangular)
from .semigroup import (LOG_CORRECTED, PURE_POWER, DecayFit, convolution_block, decay_curve,
                        fit_decay_model, matexp, truncation_horizon)
from .spectral import (DiagonalGenerator, OperatorMatrix, adjoint_graph_norm, fractional_power,
                       graph_norm, negative_fractional_power, polynomial_damped, shifted_imaginary)
from .verdict import (DeltaCertificate, SpectralReport, StabilityVerdict, Theorem, check_full,
                      check_triangular, dlambda_margin, full_graph_norms, rhp_grid, spectral_check,
                      verdict_for)
from .waves import (WaveSpec, assemble_wave1d_placed, assemble_wave2d, assemble_wave_coupling,
                    build_coupled_wave, damping_overlap)

__version__ = "0.1.0"
