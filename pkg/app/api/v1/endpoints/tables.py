"""
Worked-example table endpoints
"""

from fastapi import APIRouter, Depends, Query
from typing import Optional

from app.models.common import ResponseModel
from app.services.table_service import TableService, get_table_service

router = APIRouter()


@router.get("", response_model=ResponseModel)
async def list_tables(service: TableService = Depends(get_table_service)):
    """List every table and solution count id"""
    return ResponseModel(
        success=True,
        message="Tables retrieved",
        data=service.list_tables()
    )


@router.get("/{table_id}", response_model=ResponseModel)
async def get_table(
    table_id: str,
    k: Optional[int] = Query(None, ge=1, description="Width at which to evaluate a symbolic table"),
    service: TableService = Depends(get_table_service)
):
    """
    One table with its expressions, the evaluated counts and the errata applied to it
    """
    return ResponseModel(
        success=True,
        message=f"Table {table_id}",
        data=service.record(table_id, k)
    )
