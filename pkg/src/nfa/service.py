"""HTTP service: schema, estimation, what-if sweeps, projects, training, rules.

Request bodies are validated by hand so that every rejection carries the
offending field path; fastapi's own model validation is deliberately not
used.  The parameter document lives in memory behind a single writer lock
and is swapped as one reference, so concurrent reads always see a complete
document.  Training additionally holds a non-blocking lock; a second
training request gets 409 instead of queueing.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import replace

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .errors import DocumentError, NfaError, StageError, TrainingDivergedError
from .models import ModelInputs, full_pipeline_estimate, get_model
from .storage import (
    ParameterDocument,
    append_records,
    attach_coefficients,
    read_dataset,
    read_parameter_document,
    rules_from_payload,
    rules_to_payload,
    write_parameter_document,
)
from .training import ProjectRecord, TrainingConfig, train

_ID_PATTERN = re.compile(r"[A-Za-z0-9_]+\Z")
_MAX_SWEEP_STEPS = 1000

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>nfa</title></head>
<body>
<h1>nfa estimation service</h1>
<p>No web-ui assets are configured. The JSON API is live:</p>
<ul>
<li>GET /api/schema</li>
<li>POST /api/estimate</li>
<li>POST /api/whatif</li>
<li>POST /api/projects</li>
<li>POST /api/train</li>
<li>PUT /api/rules</li>
</ul>
</body></html>
"""


class DocumentStore:
    """Shared state: the live parameter document plus its file paths.

    ``doc`` is replaced as a whole (never mutated), so readers that grab the
    reference once see a consistent document.  ``write_lock`` serializes
    mutations; ``training_lock`` admits at most one training run.
    """

    def __init__(self, params_path: str, data_path: str):
        self.params_path = params_path
        self.data_path = data_path
        self.doc = read_parameter_document(params_path)
        self.write_lock = threading.Lock()
        self.training_lock = threading.Lock()

    def swap(self, doc: ParameterDocument) -> None:
        with self.write_lock:
            write_parameter_document(self.params_path, doc)
            self.doc = doc


def _bad(path: str, message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=f"{path}: {message}")


async def _json_body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        payload = json.loads(raw)
    except ValueError:
        raise _bad("$", "request body is not valid JSON")
    if not isinstance(payload, dict):
        raise _bad("$", "request body must be a JSON object")
    return payload


def _require_keys(payload: dict, path: str, required: tuple, optional: tuple = ()) -> None:
    for key in payload:
        if key not in required and key not in optional:
            raise _bad(f"{path}.{key}", "unknown key")
    for key in required:
        if key not in payload:
            raise _bad(f"{path}.{key}", "missing")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _bad(path, f"must be a number, got {value!r}")
    return float(value)


def _ratings_and_inputs(payload: dict, doc: ParameterDocument):
    """Validate the common estimate-request fields against the live schema."""
    size = _number(payload["size"], "$.size")
    if not size > 0:
        raise _bad("$.size", f"must be positive, got {size}")
    model_id = payload.get("model_id", doc.schema.model_binding)
    if not isinstance(model_id, str):
        raise _bad("$.model_id", "must be a string")
    try:
        get_model(model_id)
    except NfaError as e:
        raise _bad("$.model_id", str(e))
    raw_ratings = payload["ratings"]
    if not isinstance(raw_ratings, dict):
        raise _bad("$.ratings", "must be an object of factor id to rating")
    try:
        ratings = doc.schema.validate_ratings(raw_ratings)
    except NfaError as e:
        raise _bad("$.ratings", str(e))
    coefficients = doc.coefficients if model_id == doc.schema.model_binding else None
    return ratings, ModelInputs(size=size, model_id=model_id, coefficients=coefficients)


def _run_pipeline(ratings, inputs, doc: ParameterDocument):
    try:
        return full_pipeline_estimate(ratings, inputs, doc.rules, doc.params, doc.schema)
    except StageError as e:
        raise HTTPException(status_code=500, detail=str(e))


def create_app(
    params_path: str, data_path: str, assets_dir: str | None = None
) -> FastAPI:
    """Build the service around one parameter document and one dataset file."""
    store = DocumentStore(params_path, data_path)
    app = FastAPI(title="nfa", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.store = store

    @app.get("/api/schema")
    def get_schema():
        doc = store.doc
        return {
            "model_binding": doc.schema.model_binding,
            "factors": [
                {
                    "id": f.id,
                    "name": f.name,
                    "level_labels": list(f.level_labels),
                    "direction": f.direction,
                }
                for f in doc.schema.factors
            ],
            "rules": rules_to_payload(doc.rules),
        }

    @app.post("/api/estimate")
    def post_estimate(payload: dict = Depends(_json_body)):
        doc = store.doc
        _require_keys(payload, "$", required=("ratings", "size"), optional=("model_id",))
        ratings, inputs = _ratings_and_inputs(payload, doc)
        return _run_pipeline(ratings, inputs, doc).to_dict()

    @app.post("/api/whatif")
    def post_whatif(payload: dict = Depends(_json_body)):
        doc = store.doc
        _require_keys(
            payload, "$", required=("ratings", "size", "sweep"), optional=("model_id",)
        )
        ratings, inputs = _ratings_and_inputs(payload, doc)
        sweep = payload["sweep"]
        if not isinstance(sweep, dict):
            raise _bad("$.sweep", "must be an object")
        _require_keys(sweep, "$.sweep", required=("factor_id", "from", "to", "steps"))
        factor_id = sweep["factor_id"]
        if not isinstance(factor_id, str) or factor_id not in doc.schema:
            raise _bad("$.sweep.factor_id", f"unknown factor {factor_id!r}")
        factor = doc.schema.factor(factor_id)
        start = _number(sweep["from"], "$.sweep.from")
        stop = _number(sweep["to"], "$.sweep.to")
        span = factor.level_count - 1
        for path, value in (("$.sweep.from", start), ("$.sweep.to", stop)):
            if not 0.0 <= value <= span:
                raise _bad(path, f"rating {value} out of range [0, {span}]")
        steps = sweep["steps"]
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
            raise _bad("$.sweep.steps", f"must be a positive integer, got {steps!r}")
        if steps > _MAX_SWEEP_STEPS:
            raise _bad("$.sweep.steps", f"at most {_MAX_SWEEP_STEPS} steps")
        if steps == 1:
            points = [start]
        else:
            points = [start + (stop - start) * k / (steps - 1) for k in range(steps)]
        out = []
        for rating in points:
            swept = dict(ratings)
            swept[factor_id] = rating
            result = _run_pipeline(swept, inputs, doc)
            out.append({"rating": rating, "effort_pm": result.effort_pm})
        return {"factor_id": factor_id, "points": out}

    @app.post("/api/projects")
    def post_project(payload: dict = Depends(_json_body)):
        doc = store.doc
        _require_keys(
            payload,
            "$",
            required=("id", "size", "model_id", "ratings", "actual_effort"),
            optional=("weight",),
        )
        record_id = payload["id"]
        if not isinstance(record_id, str) or not _ID_PATTERN.match(record_id):
            raise _bad("$.id", f"must match [A-Za-z0-9_]+, got {record_id!r}")
        ratings, inputs = _ratings_and_inputs(
            {k: payload[k] for k in ("ratings", "size", "model_id")}, doc
        )
        effort = _number(payload["actual_effort"], "$.actual_effort")
        if not effort > 0:
            raise _bad("$.actual_effort", f"must be positive, got {effort}")
        weight = 1.0
        if "weight" in payload:
            weight = _number(payload["weight"], "$.weight")
            if weight < 0:
                raise _bad("$.weight", f"must be non-negative, got {weight}")
        record = ProjectRecord(
            id=record_id,
            inputs=ModelInputs(size=inputs.size, model_id=inputs.model_id),
            ratings=ratings,
            actual_effort=effort,
            weight=weight,
        )
        try:
            with store.write_lock:
                combined = append_records(store.data_path, [record], doc.schema)
        except NfaError as e:
            raise HTTPException(status_code=500, detail=f"dataset: {e}")
        return {"n": len(combined)}

    @app.post("/api/train")
    def post_train(payload: dict = Depends(_json_body)):
        _require_keys(
            payload, "$", required=(), optional=("epochs", "learning_rate", "seed")
        )
        epochs = payload.get("epochs", 500)
        if isinstance(epochs, bool) or not isinstance(epochs, int) or epochs < 1:
            raise _bad("$.epochs", f"must be a positive integer, got {epochs!r}")
        learning_rate = _number(payload.get("learning_rate", 0.05), "$.learning_rate")
        if learning_rate < 0:
            raise _bad("$.learning_rate", f"must be >= 0, got {learning_rate}")
        seed = payload.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise _bad("$.seed", f"must be an integer, got {seed!r}")
        if not store.training_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="training already running")
        try:
            doc = store.doc
            if not os.path.exists(store.data_path):
                raise _bad("$", f"dataset file not found: {store.data_path}")
            try:
                records = attach_coefficients(
                    read_dataset(store.data_path, doc.schema), doc
                )
                config = TrainingConfig(
                    learning_rate=learning_rate, epochs=epochs, seed=seed
                )
                report = train(records, doc.params, config, doc.rules, doc.schema)
            except TrainingDivergedError as e:
                raise HTTPException(status_code=500, detail=f"[training] {e}")
            except NfaError as e:
                raise _bad("$", str(e))
            new_doc = replace(
                doc,
                params=report.final_params,
                provenance=(
                    f"trained on {os.path.basename(store.data_path)} "
                    f"(n={len(records)}): epochs={epochs}, lr={learning_rate}, "
                    f"seed={seed}, best_epoch={report.best_epoch}, "
                    f"loss {report.initial_loss:.6f} -> {report.final_loss:.6f}"
                ),
            )
            store.swap(new_doc)
            return {
                "initial_loss": report.initial_loss,
                "final_loss": report.final_loss,
                "best_epoch": report.best_epoch,
                "epochs": len(report.loss_history) - 1,
            }
        finally:
            store.training_lock.release()

    @app.put("/api/rules")
    def put_rules(payload: dict = Depends(_json_body)):
        doc = store.doc
        _require_keys(payload, "$", required=("rules",))
        try:
            rule_set = rules_from_payload(payload["rules"], doc.schema, path="$.rules")
        except DocumentError as e:
            raise HTTPException(status_code=400, detail=str(e))
        store.swap(replace(doc, rules=rule_set))
        return {"rules": rules_to_payload(rule_set)}

    if assets_dir is not None:
        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return HTMLResponse(_PLACEHOLDER_PAGE)

    return app
