"""Request/response models for the computation service.

Documents travel as raw JSON text inside the request body so that the
exact-rational parser owns all validation and error locations; everything
numeric in responses is an integer or an exact "p/q" string.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class PointModel(BaseModel):
    vertex: Optional[str] = None
    edge: Optional[str] = None
    offset: Optional[str] = None
    end: Optional[str] = None


class TermModel(BaseModel):
    point: PointModel
    coeff: int


class DocumentRequest(BaseModel):
    document: str = Field(description="the full document as JSON text")


class RankRequest(DocumentRequest):
    divisor: str
    scale_cap: int = 4


class RankResponse(BaseModel):
    rank: int
    scales_tested: List[int]
    stabilized: bool
    witness: Optional[List[TermModel]] = None


class RRRequest(DocumentRequest):
    divisor: str
    scale_cap: int = 4


class RRResponse(BaseModel):
    status: str  # pass | fail | inconclusive
    rank_d: int
    rank_kd: int
    lhs: int
    rhs: int
    degree: int
    genus: int
    scales: List[int]
    stabilized: bool


class CanonicalResponse(BaseModel):
    divisor: List[TermModel]
    degree: int


class ReduceRequest(DocumentRequest):
    divisor: str
    base: Optional[str] = None  # vertex id; lowest id when omitted


class ReduceResponse(BaseModel):
    reduced: List[TermModel]
    base: str
    scale: int


class EquivRequest(DocumentRequest):
    divisor1: str
    divisor2: str


class FunctionFragment(BaseModel):
    edge: Optional[str] = None
    breakpoints: Optional[List[Dict[str, str]]] = None
    end_slope: Optional[int] = None
    value: Optional[str] = None  # edgeless graphs


class EquivResponse(BaseModel):
    equivalent: bool
    witness: Optional[List[FunctionFragment]] = None


class CellCapsModel(BaseModel):
    max_edges: int = 4
    max_degree: int = 3
    slope_cap: Optional[int] = None


class CellsRequest(DocumentRequest):
    divisor: str
    caps: CellCapsModel = CellCapsModel()


class CellModel(BaseModel):
    placement: List[Tuple[str, str]]
    slopes: List[Tuple[str, int]]
    dimension: int
    orbit_size: int
    sample_offsets: List[str]
    feasible: bool


class CellsResponse(BaseModel):
    cells: List[CellModel]
    dims: Dict[int, int]
    max_dimension: int
    truncated: bool


class OrdRequest(DocumentRequest):
    function: str
    point: PointModel


class OrdResponse(BaseModel):
    order: int


class CampaignConfigModel(BaseModel):
    seed: int
    instances: int = 200
    genus_range: Tuple[int, int] = (0, 3)
    edge_range: Tuple[int, int] = (1, 6)
    degree_range: Tuple[int, int] = (-3, 6)
    max_denominator: int = 4
    scale_cap: int = 4
    max_ends: int = 2


class CampaignRequest(BaseModel):
    config: CampaignConfigModel


class CampaignResponse(BaseModel):
    summary: Dict
    records: List[Dict]


class ErrorBody(BaseModel):
    message: str
    line: Optional[int] = None
    column: Optional[int] = None
    where: Optional[str] = None
