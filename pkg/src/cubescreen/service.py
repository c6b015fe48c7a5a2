"""HTTP JSON API over a built cube (versioned under /v1).

Endpoints: health, schema, count, timeline, screen (async job), pivot,
summary. The cube is immutable, so concurrent requests need no locking;
screen jobs run in background threads and are polled by id.
"""
from __future__ import annotations

import datetime as dt
import itertools
import threading
import uuid
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .cube import Conjunction, CountCube, DateWindow
from .errors import CubescreenError
from .geo import CentroidTable, RegionSet, enumerate_region_sets
from .ingest import DatasetSummary
from .pivot import pivot as build_pivot
from .screen import (ScreeningConfig, massive_screen, pvalue_timeline,
                     reports_to_jsonl)


class CountRequest(BaseModel):
    conjunction: dict = Field(default_factory=dict)  # attr -> label | [labels]
    window: dict  # {"start": ISO date, "length": days}


class TimelineRequest(BaseModel):
    conjunction: dict = Field(default_factory=dict)
    region: Optional[list[str]] = None
    window_length: int = 28
    stride: int = 1
    reference_length: int = 365


class ScreenRequest(BaseModel):
    config: dict


class PivotRequest(BaseModel):
    row: str
    col: str
    filter: dict = Field(default_factory=dict)
    window: Optional[dict] = None


def _parse_window(obj: dict, cube: CountCube) -> DateWindow:
    return DateWindow(dt.date.fromisoformat(obj["start"]), int(obj["length"]))


def _region_from_members(members: list[str]) -> RegionSet:
    return RegionSet(members=frozenset(members), seed=sorted(members)[0])


def create_app(cube: CountCube, centroids: Optional[CentroidTable] = None,
               summary: Optional[DatasetSummary] = None,
               location_attribute: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="cubescreen", version="1")
    jobs: dict = {}

    @app.exception_handler(CubescreenError)
    def _domain_error(request, exc):
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "total_events": cube.total_events}

    @app.get("/v1/schema")
    def schema():
        return {
            "attributes": [
                {"name": a.name, "kind": a.kind, "labels": list(a.labels)}
                for a in cube.schema.attributes
            ],
            "calendar": {"start": cube.start.isoformat(),
                         "end": cube.end.isoformat()},
            "location_attribute": location_attribute,
        }

    @app.post("/v1/count")
    def count(req: CountRequest):
        q = Conjunction.from_dict(req.conjunction)
        w = _parse_window(req.window, cube)
        return {"count": cube.count(q, w)}

    @app.post("/v1/timeline")
    def timeline(req: TimelineRequest):
        conj = Conjunction.from_dict(req.conjunction)
        region = _region_from_members(req.region) if req.region else None
        if region is not None and location_attribute is None:
            raise HTTPException(400, "no location attribute configured")
        attrs = tuple(conj.attributes)
        if region is not None and location_attribute not in attrs:
            attrs += (location_attribute,)
        cfg = ScreeningConfig(
            attributes=attrs or (cube.schema.attributes[0].name,),
            location_attribute=location_attribute if region else None,
            window_length=req.window_length, stride=req.stride,
            reference_length=req.reference_length)
        entries = pvalue_timeline(cube, conj, region, cfg)
        return [{"window": {"start": w.start.isoformat(),
                            "end": w.end.isoformat()},
                 "observed": obs, "p_value": p}
                for w, obs, p in entries]

    @app.post("/v1/screen")
    def screen(req: ScreenRequest):
        cfg = ScreeningConfig(**{**req.config,
                                 "attributes": tuple(req.config["attributes"])})
        if cfg.location_attribute and centroids is None:
            raise HTTPException(400, "no centroid table configured")
        regions = (enumerate_region_sets(
            centroids, cfg.k_max, cfg.d_max,
            locations=[l for l in cube.schema[cfg.location_attribute].domain
                       if l in centroids.entries])
            if cfg.location_attribute else [])
        job_id = uuid.uuid4().hex
        jobs[job_id] = {"status": "running", "reports": None}

        def run():
            try:
                outcome = massive_screen(cube, cfg, regions)
                jobs[job_id] = {
                    "status": "done",
                    "n_queries": outcome.n_queries,
                    "reports": [r.to_dict() for r in outcome.reports],
                }
            except Exception as e:  # surfaced via status polling
                jobs[job_id] = {"status": "error", "error": str(e)}

        threading.Thread(target=run, daemon=True).start()
        return {"job_id": job_id}

    @app.get("/v1/screen/{job_id}")
    def screen_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, "unknown job")
        return job

    @app.post("/v1/pivot")
    def pivot_endpoint(req: PivotRequest):
        filt = Conjunction.from_dict(req.filter)
        window = _parse_window(req.window, cube) if req.window else None
        table = build_pivot(cube, req.row, req.col, filter=filt,
                            window=window)
        import json
        return json.loads(table.to_json())

    @app.get("/v1/summary")
    def get_summary():
        if summary is None:
            raise HTTPException(404, "no summary available")
        out = summary.to_dict()
        # per-location totals for the rate/bar view
        if location_attribute:
            out["per_location_counts"] = \
                summary.per_category_counts.get(location_attribute, {})
        return out

    return app
