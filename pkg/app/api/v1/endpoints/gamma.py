"""
Rank distribution endpoints
"""

from fastapi import APIRouter, HTTPException, Depends
from fastapi.concurrency import run_in_threadpool
import logging

from app.core.exceptions import HankelRankError
from app.models.common import ResponseModel
from app.models.shapes import MixedShapeModel, OutputRecord, TripleShapeModel
from app.services.recurrence_service import RecurrenceService, get_recurrence_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("", response_model=ResponseModel)
async def gamma(
    request: TripleShapeModel,
    service: RecurrenceService = Depends(get_recurrence_service)
):
    """
    Rank distribution of the stack [s, s+m, s+m+l] x k

    - **method**: closed, recurrence, brute or auto (closed -> recurrence -> brute per rank)

    Counts are returned as decimal strings.
    """
    try:
        dist = await run_in_threadpool(service.distribution, request.to_shape(), request.method.value)
        return ResponseModel(
            success=True,
            message="Distribution computed",
            data=OutputRecord.from_distribution(dist)
        )

    except (HTTPException, HankelRankError):
        raise
    except Exception as e:
        logger.error(f"Error computing distribution: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/mixed", response_model=ResponseModel)
async def gamma_mixed(
    request: MixedShapeModel,
    service: RecurrenceService = Depends(get_recurrence_service)
):
    """
    Rank distribution of n unstructured rows over [1+m, 1+m+l] x k
    """
    try:
        dist = await run_in_threadpool(service.mixed_distribution, request.to_shape(), request.method.value)
        return ResponseModel(
            success=True,
            message="Mixed distribution computed",
            data=OutputRecord.from_distribution(dist)
        )

    except (HTTPException, HankelRankError):
        raise
    except Exception as e:
        logger.error(f"Error computing mixed distribution: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))
