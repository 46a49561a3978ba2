import os
import json
import platform
import asyncio
import tempfile
from importlib import metadata
from typing import Optional

from fastapi import FastAPI, UploadFile, Form, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.util import get_remote_address
from slowapi.errors import RateLimitExceeded
from anyio import to_thread

import logging

from cli import SEP, curve_table, solve_config, solve_report
from config import SolverOptions, parse_config
from errors import BoundaryNotSupportedError, ConfigError, ConvergenceError, DomainError
from welfare_sim import worked_examples_report

logging.basicConfig(
    level=os.getenv("DISCLOSURE_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)

limiter = Limiter(key_func=get_remote_address)
app = FastAPI(title="Disclosure Equilibrium Solver")
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

ALLOWED_ORIGINS = os.getenv("ALLOWED_ORIGINS", "*").split(",")
app.add_middleware(
    CORSMiddleware,
    allow_origins=ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["GET", "POST", "HEAD"],
    allow_headers=["*"],
)

MAX_CONFIG_SIZE = int(os.getenv("MAX_CONFIG_SIZE", str(256 * 1024)))
MIN_TOLERANCE   = 1e-12
MAX_TOLERANCE   = 1e-2

solver_semaphore = asyncio.Semaphore(int(os.getenv("MAX_CONCURRENT_SOLVES", "2")))


def _version(package: str) -> str:
    try:
        return metadata.version(package)
    except metadata.PackageNotFoundError:
        return "not installed"


async def read_config_upload(file: UploadFile, seed: Optional[int] = None, tolerance: Optional[float] = None):
    """Validate an uploaded JSON config and apply the optional form overrides."""
    if not file.filename or not file.filename.endswith(".json"):
        raise HTTPException(status_code=400, detail="Only .json config files accepted")
    if tolerance is not None and not (MIN_TOLERANCE <= tolerance <= MAX_TOLERANCE):
        raise HTTPException(status_code=400,
            detail=f"Tolerance must be {MIN_TOLERANCE:g} to {MAX_TOLERANCE:g}")

    content = await file.read()
    if len(content) > MAX_CONFIG_SIZE:
        raise HTTPException(status_code=400,
            detail=f"Config too large (max {MAX_CONFIG_SIZE // 1024} KB)")
    try:
        data = json.loads(content.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise HTTPException(status_code=400, detail=f"Config is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise HTTPException(status_code=400, detail="Config top level must be a JSON object")

    try:
        config = parse_config(data, source=file.filename)
        # results stay in memory; nothing is written next to the service
        return config.with_overrides(seed=seed, tolerance=tolerance, out=tempfile.gettempdir())
    except (ConfigError, DomainError) as e:
        raise HTTPException(status_code=400, detail=str(e))


def solve_sync(config):
    outcome = solve_config(config)
    posterior = None
    if outcome.posterior is not None:
        dist = outcome.posterior
        posterior = {
            "mean":       dist.mean(),
            "dm_welfare": dist.second_moment() - dist.mean(),
            "atoms":      dist.atoms,
            "branches":   [{"label": b.label, "mass": b.mass, "interval": b.interval} for b in dist.branches],
        }
    return {
        "success":     True,
        "game":        outcome.game,
        "equilibria":  json.loads(outcome.table.to_json(orient="records")),
        "best_welfare": outcome.best_welfare,
        "notes":       outcome.notes,
        "posterior":   posterior,
        "report":      solve_report(config, outcome),
        "solver":      config.solver.describe(),
    }


def curves_sync(config):
    table = curve_table(config)
    return {
        "success": True,
        "columns": list(table.columns),
        "rows":    json.loads(table.to_json(orient="records")),
        "solver":  config.solver.describe(),
    }


async def run_solver(fn, config, label: str):
    logger.info(f"\n{SEP}\nNEW REQUEST: {label} game={config.game}\nPlatform: {platform.system()}\n{SEP}")
    try:
        async with solver_semaphore:
            return await to_thread.run_sync(fn, config)
    except (ConfigError, DomainError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except (ConvergenceError, BoundaryNotSupportedError) as e:
        logger.error(f"{label}: {e}")
        raise HTTPException(status_code=500, detail=f"Solver failed: {e}")
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"{str(e)}")
        raise HTTPException(status_code=500, detail=str(e))


@app.get("/")
@limiter.limit("10/minute")
async def root(request: Request):
    return {"status": "ok", "service": "Disclosure equilibrium API"}


@app.head("/health")
@app.get("/health")
@limiter.limit("20/minute")
async def health(request: Request):
    return {
        "status":   "healthy",
        "numpy":    _version("numpy"),
        "scipy":    _version("scipy"),
        "pandas":   _version("pandas"),
        "pydantic": _version("pydantic"),
        "solver":   SolverOptions().model_dump(),
        "platform": platform.system(),
    }


@app.post("/solve")
@limiter.limit("5/minute")
async def solve(
    request:   Request,
    file:      UploadFile,
    seed:      Optional[int] = Form(None),
    tolerance: Optional[float] = Form(None),
):
    config = await read_config_upload(file, seed, tolerance)
    return await run_solver(solve_sync, config, f"solve {file.filename}")


@app.post("/curves")
@limiter.limit("5/minute")
async def curves(
    request: Request,
    file:    UploadFile,
):
    config = await read_config_upload(file)
    return await run_solver(curves_sync, config, f"curves {file.filename}")


@app.get("/examples")
@limiter.limit("10/minute")
async def examples(request: Request):
    async with solver_semaphore:
        table = await to_thread.run_sync(worked_examples_report)
    return {
        "passed":    table.passed,
        "tolerance": table.tolerance,
        "rows":      json.loads(table.to_frame().to_json(orient="records")),
    }


if __name__ == "__main__":
    import uvicorn
    port = int(os.getenv("PORT", "8000"))
    uvicorn.run(app, host="0.0.0.0", port=port)
