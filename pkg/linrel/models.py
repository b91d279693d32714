"""
Pydantic report records returned by the certifiers and metric operations
"""

from typing import Any, Dict, Iterator, Optional, Tuple

from pydantic import BaseModel, Field


class ReportModel(BaseModel):
    """Base record; witness objects are carried but not printed"""

    class Config:
        arbitrary_types_allowed = True

    def report_items(self) -> Iterator[Tuple[str, Any]]:
        """Scalar fields in declaration order, flattening dict-valued quantities"""
        for name in type(self).model_fields:
            value = getattr(self, name)
            if isinstance(value, dict):
                for key in sorted(value):
                    if _is_scalar(value[key]):
                        yield f"{name}.{key}", value[key]
            elif _is_scalar(value):
                yield name, value


def _is_scalar(value) -> bool:
    return value is None or isinstance(value, (bool, int, float, complex, str))


class Interval(ReportModel):
    """Certified bracket [lo, hi]"""
    lo: float = Field(..., description="Lower bound (sampled)")
    hi: float = Field(..., description="Upper bound (certified)")


class GapReport(ReportModel):
    """Directed gaps and minimum gaps between two subspaces"""
    delta_MN: float = Field(..., ge=0.0, le=1.0)
    delta_NM: float = Field(..., ge=0.0, le=1.0)
    hat_delta: float = Field(..., ge=0.0, le=1.0)
    gamma_MN: float = Field(..., ge=0.0, le=1.0)
    gamma_NM: float = Field(..., ge=0.0, le=1.0)
    hat_gamma: float = Field(..., ge=0.0, le=1.0)

    class Config:
        json_schema_extra = {
            "example": {
                "delta_MN": 0.5,
                "delta_NM": 0.5,
                "hat_delta": 0.5,
                "gamma_MN": 0.5,
                "gamma_NM": 0.5,
                "hat_gamma": 0.5
            }
        }


class FredholmPairReport(ReportModel):
    dim_intersection: int = Field(..., ge=0)
    codim_sum: int = Field(..., ge=0)
    index: int


class FormCertificate(ReportModel):
    """Nondegeneracy certificate of a form"""
    sigma_min: float = Field(..., ge=0.0, description="Smallest singular value of G")
    cutoff: float = Field(..., ge=0.0)
    nondegenerate: bool


class IndexReport(ReportModel):
    ker_dim: int = Field(..., ge=0)
    coker_dim: int = Field(..., ge=0)
    index: int
    parity: int = Field(..., ge=0, le=1)


class SymmetryReport(ReportModel):
    """h-symmetry classification of a relation"""
    h: Any = Field(..., description="Unit scalar")
    is_h_symmetric: bool
    is_h_selfadjoint: bool
    is_maximal_h_symmetric: bool
    adjoint_dim: int = Field(..., ge=0)
    adjoint: Any = Field(None, description="The Omega-adjoint relation")


class SelfadjointCriteria(ReportModel):
    """Conditions under which a maximal h-symmetric relation is h-selfadjoint"""
    ran_equals_adjoint_ran: bool
    ran_equals_double_annihilator: bool
    dom_equals_adjoint_dom: bool
    dom_equals_double_annihilator: bool
    is_maximal: bool
    is_selfadjoint: bool
    implies_selfadjoint: bool
    consistent: bool


class TwoPhaseReport(ReportModel):
    """Symmetry for two distinct unit scalars against the domain/range pairing"""
    h1: Any = Field(..., description="Unit scalar")
    h2: Any = Field(..., description="Unit scalar")
    symmetric_h1: bool
    symmetric_h2: bool
    dom_annihilates_ran: bool
    consistent: bool


class KernelIdentities(ReportModel):
    """Kernel and multivalued-part identities of an h-symmetric relation"""
    ker_dim: int
    adjoint_ker_dim: int
    ker_Q_dim: int
    ker_equals_adjoint_ker: bool
    mul_equals_adjoint_mul: bool
    mul_equals_dom_annihilator: bool
    ker_equals_ran_annihilator: bool
    ker_equals_ker_Q: bool


class IsotropicReport(ReportModel):
    """Classification of a subspace of a symplectic space"""
    dim: int = Field(..., ge=0)
    annihilator_dim: int = Field(..., ge=0)
    isotropic: bool
    coisotropic: bool
    symplectic_subspace: bool
    lagrangian: bool
    maximal_isotropic: Optional[bool] = Field(None, description="None when indeterminate")
    h_lambda: Optional[int] = Field(None, ge=-1, le=1)
    gamma_lambda: float = Field(0.0, ge=0.0)


class SplitReport(ReportModel):
    """Transversal splitting T = T0 + T1 of a skew-adjoint relation"""
    ker_dim: int
    ran_dim: int
    auto_y0: bool
    reassembly_gap: float
    identities_hold: bool
    X0: Any = None
    X1: Any = None
    Y0: Any = None
    Y1: Any = None
    T0: Any = None
    T1: Any = None


class PairStats(ReportModel):
    """Norm, inertia and reduced minimum modulus of a symmetric pair"""
    norm: float = Field(..., ge=0.0)
    m_plus: int = Field(..., ge=0)
    m_minus: int = Field(..., ge=0)
    m_zero: int = Field(..., ge=0)
    gamma_Q: Optional[float] = Field(None, ge=0.0)


class MorseCertificate(ReportModel):
    hypothesis_certified: bool
    lhs: float
    rhs: float
    k: int = Field(..., ge=1)
    c_gap_upper: float = Field(..., ge=0.0)
    gap_VW: float = Field(..., ge=0.0, le=1.0)
    m_plus_hR: Optional[int] = None
    conclusion_checked: bool


class WittReport(ReportModel):
    dom_dim: int
    m_minus_iQ: int
    ker_Q_dim: int
    ker_T_dim: int
    identity_holds: bool
    parity_consistent: bool


class HessKatoReport(ReportModel):
    product: float
    passes: bool
    dims_equal: bool
    conclusion_checked: bool


class StabilityReport(ReportModel):
    """Hypothesis values and verdicts of a stability certifier"""
    theorem: str
    quantities: Dict[str, float] = Field(default_factory=dict)
    lhs: float
    rhs: float
    hypothesis_certified: bool
    h_lambda: int
    h_mu: Optional[int] = None
    mu_maximal_isotropic: Optional[bool] = None
    conclusion_checked: bool
    witnesses: Dict[str, Any] = Field(default_factory=dict)


class FamilyReport(ReportModel):
    """Sign and maximality of lambda(s) along a sampled family of forms"""
    samples: int = Field(..., ge=2)
    h_lambda: int
    h_values: str
    all_maximal: bool
    h_constant: bool
    certified_steps: int = Field(..., ge=0)
    chain_certified: bool
    min_margin: Optional[float] = None
    max_step_gap: float = Field(..., ge=0.0)
    conclusion_checked: bool


class OperatorGapReport(ReportModel):
    norm_C: float
    bound_a: float
    observed: float
    holds: bool
    bound_b: Optional[float] = None
    observed_b: Optional[float] = None
    holds_b: Optional[bool] = None
    reverse_bound: Optional[float] = None
    reverse_observed: Optional[float] = None
    reverse_holds: Optional[bool] = None


class PencilGapReport(ReportModel):
    method: str = Field(..., description="operator_norm, generalized_eigenvalue or sampling")
    bound: float
    observed: float
    holds: bool


class Mod2Report(ReportModel):
    base_parity: int = Field(..., ge=0, le=1)
    trials: int
    violations: int
    path_violations: int
    rejected: int
    min_observed_margin: float


class PathReport(ReportModel):
    steps: int
    parity: int
    ker_dims: str = Field(..., description="Kernel dimension at each sample, comma separated")
    endpoint_gap: float


class SuiteResult(ReportModel):
    """Outcome of one acceptance suite"""
    suite: str
    instances: int
    certified: int = 0
    failures: int = 0
    precondition_failures: int = 0
    max_defect: float = 0.0
    seconds: float = 0.0
    counts: Dict[str, int] = Field(default_factory=dict, description="Suite-specific instance counts")
