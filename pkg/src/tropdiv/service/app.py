"""The computation service: stateless endpoints over the core package.

Every endpoint takes a document (raw JSON text) plus operation parameters
and returns exact results.  Domain errors map to 400 with a structured
error body carrying the parse location when there is one.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..cells import CellCaps, enumerate_cells, max_cell_dimension
from ..chipfiring import UnitGraph, dhar_reduce
from ..divisors import Divisor, DivisorError, canonical_divisor
from ..functions import FunctionError
from ..graphs import GraphError
from ..harness import CampaignConfig, run_campaign
from ..rationals import format_rational
from ..ranks import RankError, _chips_of, _clearing_scale, linear_equiv, tropical_rank
from ..documents import (DocumentError, divisor_to_obj, function_to_obj,
                         parse_document, parse_point)
from .schemas import (CampaignRequest, CampaignResponse, CanonicalResponse,
                      CellsRequest, CellsResponse, DocumentRequest, EquivRequest,
                      EquivResponse, FunctionFragment, OrdRequest, OrdResponse,
                      RankRequest, RankResponse, ReduceRequest, ReduceResponse,
                      RRRequest, RRResponse)

_DOMAIN_ERRORS = (DocumentError, GraphError, DivisorError, RankError,
                  FunctionError, ValueError)


def create_app() -> FastAPI:
    app = FastAPI(title="tropdiv", version="0.1.0",
                  description="Exact divisor ranks on metric graphs and tropical curves")

    @app.exception_handler(DocumentError)
    async def document_error(request: Request, exc: DocumentError):
        return JSONResponse(status_code=400, content={"error": exc.to_dict()})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": {"message": str(exc)}})

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/rank", response_model=RankResponse, response_model_exclude_none=True)
    def rank(req: RankRequest):
        doc = parse_document(req.document)
        d = doc.divisor(req.divisor)
        report = tropical_rank(doc.graph, d, req.scale_cap)
        return RankResponse(rank=report.rank, scales_tested=report.scales_tested,
                            stabilized=report.stabilized,
                            witness=divisor_to_obj(report.witness)
                            if report.witness is not None else None)

    @app.post("/v1/rr", response_model=RRResponse)
    def rr(req: RRRequest):
        doc = parse_document(req.document)
        d = doc.divisor(req.divisor)
        g = doc.graph
        k = canonical_divisor(g)
        rep_d = tropical_rank(g, d, req.scale_cap)
        rep_kd = tropical_rank(g, k - d, req.scale_cap)
        lhs = rep_d.rank - rep_kd.rank
        rhs = d.degree() + 1 - g.genus()
        stabilized = rep_d.stabilized and rep_kd.stabilized
        status = "inconclusive" if not stabilized else ("pass" if lhs == rhs else "fail")
        return RRResponse(status=status, rank_d=rep_d.rank, rank_kd=rep_kd.rank,
                          lhs=lhs, rhs=rhs, degree=d.degree(), genus=g.genus(),
                          scales=sorted(set(rep_d.scales_tested) | set(rep_kd.scales_tested)),
                          stabilized=stabilized)

    @app.post("/v1/canonical", response_model=CanonicalResponse)
    def canonical(req: DocumentRequest):
        doc = parse_document(req.document)
        k = canonical_divisor(doc.graph)
        return CanonicalResponse(divisor=divisor_to_obj(k), degree=k.degree())

    @app.post("/v1/reduce", response_model=ReduceResponse)
    def reduce(req: ReduceRequest):
        doc = parse_document(req.document)
        g = doc.graph
        if g.has_infinite_edges():
            raise DocumentError("reduction needs a finite graph (retract ends first)")
        d = doc.divisor(req.divisor)
        base = req.base if req.base is not None else min(g.vertices)
        if base not in g.vertices:
            raise DocumentError(f"unknown base vertex {base!r}", where="base")
        sigma = _clearing_scale(g, [d])
        resc = g.rescale(sigma)
        sub = resc.target.unit_subdivide()
        unit = UnitGraph.from_subdivision(sub)
        q = sub.index_of(resc.target.vertex_point(base))
        reduced = dhar_reduce(unit, _chips_of(sub, d.transport(resc)), q)
        terms = []
        for i, a in enumerate(reduced):
            if a:
                terms.append((a, resc.inverse_point(sub.points[i])))
        out = Divisor.of(g, *terms)
        return ReduceResponse(reduced=divisor_to_obj(out), base=base, scale=sigma)

    @app.post("/v1/equiv", response_model=EquivResponse, response_model_exclude_none=True)
    def equiv(req: EquivRequest):
        doc = parse_document(req.document)
        d1 = doc.divisor(req.divisor1)
        d2 = doc.divisor(req.divisor2)
        ok, witness = linear_equiv(doc.graph, d1, d2)
        body = EquivResponse(equivalent=ok)
        if ok and witness is not None:
            if doc.graph.edges:
                fragments = function_to_obj(witness)
            else:
                v = doc.graph.vertices[0]
                fragments = [{"value": format_rational(witness.vertex_value(v))}]
            body.witness = [FunctionFragment(**frag) for frag in fragments]
        return body

    @app.post("/v1/cells", response_model=CellsResponse)
    def cells(req: CellsRequest):
        doc = parse_document(req.document)
        d = doc.divisor(req.divisor)
        caps = CellCaps(max_edges=req.caps.max_edges, max_degree=req.caps.max_degree,
                        slope_cap=req.caps.slope_cap)
        report = enumerate_cells(doc.graph, d, caps)
        cells = [{
            "placement": list(c.signature.placement),
            "slopes": list(c.signature.slopes),
            "dimension": c.dimension,
            "orbit_size": c.orbit_size,
            "sample_offsets": [format_rational(t) for t in c.sample_offsets],
            "feasible": c.feasible,
        } for c in report.cells]
        return CellsResponse(cells=cells, dims=report.dims(),
                             max_dimension=max_cell_dimension(report.cells),
                             truncated=report.truncated)

    @app.post("/v1/ord", response_model=OrdResponse)
    def ord_at(req: OrdRequest):
        doc = parse_document(req.document)
        f = doc.function(req.function)
        p = parse_point(doc.graph, req.point.model_dump(exclude_none=True), "point")
        return OrdResponse(order=f.order(p))

    @app.post("/v1/campaign", response_model=CampaignResponse)
    def campaign(req: CampaignRequest):
        cfg = CampaignConfig(
            seed=req.config.seed, instances=req.config.instances,
            genus_range=tuple(req.config.genus_range),
            edge_range=tuple(req.config.edge_range),
            degree_range=tuple(req.config.degree_range),
            max_denominator=req.config.max_denominator,
            scale_cap=req.config.scale_cap, max_ends=req.config.max_ends)
        report = run_campaign(cfg)
        return CampaignResponse(summary=report.summary(),
                                records=[r.to_dict() for r in report.records])

    return app


app = create_app()
