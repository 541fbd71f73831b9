"""Scaling limits of threshold flip times for monotone Boolean functions.

Core objects: one array of uniform labels drives the canonical monotone
coupling; `flip_time` locates the density at which a monotone function turns
on; the zoo in `families` pairs each classical function with its limit law;
`itermaj` computes the iterated-majority limit analytically; `construct`
builds functions realizing arbitrary finitely-supported limits; `percolation`
covers near-critical crossing flip times on the triangular lattice; and
`montecarlo` ties samples to laws with KS/DKW comparisons.

Hot sampling kernels run from a compiled extension when built (see
`kernels.get_backend()`); a pure NumPy/Python fallback is selected
automatically otherwise.
"""

__version__ = "0.1.0"

from .coupling import (BitConfig, FlipTime, LabelAssignment, MonotoneFunction,
                       assign_uniform_labels, configuration_at, flip_time,
                       flip_time_via_witnesses, reverse)
from .errors import (CalibrationError, NoFlipError, ToleranceError,
                     UnsupportedLimitError)
from .families import (AnalyticLimit, FamilySpec, clique_size, limit_law,
                       make_family)
from .itermaj import (IterMajParams, LimitEvaluation, centered_cdf,
                      centered_map, centered_map_deriv, growth_rate,
                      growth_rate_by_recursion, large_m_density, limit_cdf,
                      limit_density, limit_quantile, log_upper_tail,
                      majority_map, majority_map_deriv, tail_exponent,
                      upper_tail)
from .kernels import get_backend
from .montecarlo import (EmpiricalCdf, FlipTimeSample, InfluenceEstimate,
                         dkw_bound, estimate_influence, ks_distance, rescale,
                         sample_flip_times)
from .construct import (ConstructionSpec, FiniteMeasure, ScalingReport,
                        build_plain, build_transitive, find_threshold_string,
                        gaussian_quantiles, interval_dominance_prob,
                        validate_scaling)
from .percolation import (CrossingFlip, NearCriticalParams, PercolationGrid,
                          build_lattice, crossing_flip_time,
                          dynamical_no_crossing_prob, estimate_pivotal_count,
                          has_crossing, near_critical_crossing_curve,
                          near_critical_crossing_prob, pivotal_count,
                          tail_exponent_fit, window_width)
