"""Numerics for Bochner-Kähler metrics: structure-space invariants, characteristic
polynomials, momentum cells and their metrics, explicit metric families, a
finite-difference curvature verifier and the structure ODE along geodesics."""

from .config import DEFAULT, Tolerances
from .errors import (BochnerError, ConvergenceError, DomainError, InconsistencyError, InvalidCellPointError,
                     InvalidPolynomialError, ParameterError, PreconditionError, SingularError, UnitarityError)
from .polynomial import RealPolynomial
from .structure_space import (ConservedVector, InvariantVector, StructurePoint, conserved_Ck, invariants_phi,
                              momentum_poly, normal_form, scale, symmetry_dims, unitary_act)
from .classification import (MomentumCell, char_poly_pC, classify_cells, construct_from_cell, locate_cell,
                             orbifold_case40, reduced_polys, verdict)
from .explicit_metrics import MetricField, RotSymParams, grho_metric, rotsym_metric, wps_metric
from .curvature_verifier import CALIBRATION, CurvatureReport, calibrate, curvature_report
from .geodesic_ode import StructurePath, conserved_drift, constant_factor_check, integrate

__version__ = "0.1.0"
