"""Exact computations on Carnot groups: BCH products, endpoint and multiexponential
maps, their differentials, and regularity of horizontal straight lines."""

from carnot.catalog import abelian, engel, from_file, heisenberg, step2_nonmetivier
from carnot.conditions import (
    check_abnormal_line,
    check_reg,
    check_sbh,
    classify,
    find_sbh_witness,
    is_metivier,
)
from carnot.differential import dendpoint, dendpoint_pc, dexp_left, dmultiexp, fd_jacobian
from carnot.endpoint import PiecewiseConstantControl, endpoint, multiexp
from carnot.group import GroupElement, adjoint, bch, dilate_group, identity, inverse, multiply
from carnot.hall import free_nilpotent
from carnot.lie_algebra import StratifiedAlgebra, ad_matrix, bracket, dilate_vector, validate
from carnot.linalg import Matrix, rank
from carnot.probe import ProbeConfig, probe_h

__version__ = "0.1.0"
