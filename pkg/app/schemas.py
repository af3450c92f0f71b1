from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing import Optional, Any, List, Dict, Literal


class Residual(BaseModel):
    index: List[int]
    value: str
    magnitude: Optional[float] = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    residuals: List[Residual] = Field(default_factory=list)
    max_residual: Optional[float] = None
    notes: List[str] = Field(default_factory=list)


class CalibrationComparison(BaseModel):
    target: str
    printed: str
    transported: str
    matches: bool
    difference: Optional[str] = None
    note: Optional[str] = None


class NumericBlock(BaseModel):
    q_terms: int = Field(default=40, ge=1)
    tol: float = Field(default=1e-9, gt=0)
    samples: int = Field(default=20, ge=1)
    seed: int = 20240601


class SpecFile(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    variables: List[str]
    chart: Literal["affine", "exp"] = "affine"
    kappa: Literal["1", "i"] = "1"
    lambda_: Optional[str] = Field(default=None, alias="lambda")
    weights: Optional[List[List[str]]] = None
    d: Optional[str] = None
    mode: Literal["exact", "numeric"] = "exact"
    F: Optional[str] = None
    Omega: Optional[str] = None
    numeric: NumericBlock = Field(default_factory=NumericBlock)

    @field_validator("variables")
    @classmethod
    def distinct_names(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("at least one flat variable is required")
        if len(set(value)) != len(value):
            raise ValueError("variable names must be distinct")
        for name in value:
            if name in ("p", "z", "I", "sqrt2", "exp", "log"):
                raise ValueError(f"{name!r} is reserved")
        return value

    @field_validator("weights")
    @classmethod
    def weight_pairs(cls, value: Optional[List[List[str]]]) -> Optional[List[List[str]]]:
        if value is not None and any(len(pair) != 2 for pair in value):
            raise ValueError("weights are [q, r] pairs")
        return value


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    tool_version: str
    input_hash: str
    source: str
    mode: str
    chart: str
    variables: List[str]
    lambda_: Optional[str] = Field(default=None, alias="lambda")
    lambda_human: Optional[str] = None
    eta: Optional[List[List[str]]] = None
    c: Optional[List[List[List[str]]]] = None
    F: Optional[str] = None
    Lambda: Optional[str] = None
    Lambda_human: Optional[str] = None
    Omega_tilde: Optional[str] = None
    Omega: Optional[str] = None
    Omega_human: Optional[str] = None
    intersection_form_upper: Optional[List[List[str]]] = None
    euler_weights: Optional[Dict[str, Any]] = None
    checks: List[CheckResult] = Field(default_factory=list)
    calibration: List[CalibrationComparison] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    numeric: Optional[Dict[str, Any]] = None
    timings: Optional[Dict[str, float]] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class CatalogListing(BaseModel):
    name: str
    mode: Literal["exact", "numeric"]
    arity: int
    description: str
