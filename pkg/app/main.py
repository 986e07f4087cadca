"""
FastAPI application for the HankelRank counting service
"""

from contextlib import asynccontextmanager
from pathlib import Path
import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.config import settings
from app.api.v1.api import api_router
from app.middleware.error_handler import setup_exception_handlers

logger = logging.getLogger(__name__)


def configure_logging() -> None:
    """Console plus LOG_FILE; the CLI configures its own stderr-only logging"""
    Path(settings.LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.FileHandler(settings.LOG_FILE), logging.StreamHandler()],
    )


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"Starting {settings.APP_NAME} v{settings.APP_VERSION} ({settings.ENVIRONMENT})")
    logger.info(f"Bit budget: {settings.BIT_BUDGET}, workers: {settings.WORKERS}, chunk bits: {settings.CHUNK_BITS}")

    for path in (settings.catalog_path, settings.golden_path, settings.errata_path):
        if not path.exists():
            logger.warning(f"Data file not found: {path}")

    # Parse the catalog before the first request
    try:
        from app.services.recurrence_service import get_recurrence_service
        catalog = get_recurrence_service().formulas.catalog
        logger.info(f"[STARTUP] Catalog loaded: {len(catalog.cases)} cases, {len(catalog.withdrawn)} withdrawn")
    except Exception as e:
        logger.error(f"[STARTUP] Failed to load the formula catalog: {e}")

    yield

    logger.info(f"Shutting down {settings.APP_NAME}")


configure_logging()

app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="""
    # HankelRank API

    Exact rank distributions of stacked persymmetric matrices over F2:
    - Closed forms with validity windows and errata
    - Memoized recurrence with enumeration fallback
    - Solution counts of the associated polynomial systems
    - Worked-example tables and verification suites

    All counts are exact integers, serialized as decimal strings.
    """,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins_list,
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

setup_exception_handlers(app)
app.include_router(api_router, prefix="/api/v1")


@app.get("/", tags=["Root"])
async def root():
    """Service name, version and where to look next"""
    return {
        "service": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "docs": "/docs",
        "health": "/api/v1/health",
        "tables": "/api/v1/tables",
    }
