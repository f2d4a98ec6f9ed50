"""gapsurvey: spectral-gap survey of a 1D elliptic eigenvalue problem with
random coefficients.

The package assembles P1 finite-element pencils for QMC-sampled coefficient
realisations, locates the two smallest generalized eigenvalues by
inertia-counting bisection, tracks the running minimum of the gap at dyadic
sample counts, and exposes the computable diagnostics (eigenvalue brackets,
gap condition, Lipschitz constants) alongside the experiment driver.
"""

from ._kernels import BACKEND as kernel_backend
from .analysis import (GapCondition, LipschitzReport, PowerLawFit, TheoryReport,
                       empirical_lipschitz_check, eigenvalue_brackets,
                       gap_condition_report, lipschitz_report, power_law_fit,
                       theory_report)
from .coefficient import (CoefficientBounds, CoefficientModel, Family,
                          ParameterPoint, bounds, evaluate, inverse_normal_cdf,
                          summability, term_sup_norm)
from .discretization import (GaussLegendre, TridiagonalSymmetric, UniformMesh,
                             assemble_mass, assemble_stiffness,
                             coefficient_range_on_quadrature)
from .eigensolve import (EigenResult, ToleranceSpec, discrete_laplacian_eigenvalue,
                         inertia, inverse_iteration, smallest_eigenvalues)
from .qmc import (LatticeSequence, korobov_vector, lattice_point,
                  lattice_points_block, parse_generating_vector,
                  radical_inverse_base2, random_shift)
from .survey import (GapSample, SolverOptions, SurveyResult, run_survey,
                     sample_gap, write_gap_csv)

__version__ = "0.1.0"
