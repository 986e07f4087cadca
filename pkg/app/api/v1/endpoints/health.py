"""
Health check and system info endpoints
"""

from fastapi import APIRouter, Depends
from datetime import datetime
import sys

from app.config import settings
from app.core.catalog import load_errata
from app.models.common import HealthResponse, ResponseModel
from app.services.recurrence_service import RecurrenceService, get_recurrence_service
from app.services.table_service import TableService, get_table_service

router = APIRouter()


@router.get("/health", response_model=HealthResponse)
async def health_check(recurrence: RecurrenceService = Depends(get_recurrence_service)):
    """Liveness plus the enumeration budget and catalog size this process serves with"""
    catalog = recurrence.formulas.catalog
    return HealthResponse(
        status="healthy",
        environment=settings.ENVIRONMENT,
        version=settings.APP_VERSION,
        bit_budget=recurrence.bit_budget,
        catalog={"cases": len(catalog.cases), "reductions": len(catalog.reductions)},
        timestamp=datetime.now()
    )


@router.get("/info", response_model=ResponseModel)
async def system_info(
    recurrence: RecurrenceService = Depends(get_recurrence_service),
    tables: TableService = Depends(get_table_service),
):
    """
    System information: budgets, catalog size, errata and cache state
    """
    catalog = recurrence.formulas.catalog
    return ResponseModel(
        success=True,
        message="System information retrieved",
        data={
            "app_name": settings.APP_NAME,
            "version": settings.APP_VERSION,
            "environment": settings.ENVIRONMENT,
            "python_version": f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}",
            "bit_budget": settings.BIT_BUDGET,
            "workers": settings.WORKERS,
            "catalog": {
                "version": catalog.version,
                "cases": len(catalog.cases),
                "reductions": len(catalog.reductions),
                "withdrawn": len(catalog.withdrawn),
            },
            "errata": len(load_errata()),
            "tables": len(tables.tables),
            "counts": len(tables.counts),
            "cache": recurrence.cache_info(),
        }
    )
