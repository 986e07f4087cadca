"""
Solution count endpoint
"""

from fastapi import APIRouter, HTTPException, Depends
from fastapi.concurrency import run_in_threadpool
import logging

from app.core.exceptions import HankelRankError
from app.models.common import ResponseModel
from app.models.shapes import CountRecord, CountRequest
from app.services.counting_service import CountingService, get_counting_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("", response_model=ResponseModel)
async def count(
    request: CountRequest,
    service: CountingService = Depends(get_counting_service)
):
    """
    Number of solutions of the q-fold system

    - **s** selects the triple system, **n** the mixed one
    - **corrected**: mixed system with the exponent matching the degree caps
    - **allow_extrapolated**: accept l > 0 for the triple system
    """
    try:
        value, dist = await run_in_threadpool(
            service.count_solutions,
            request.q,
            request.k,
            request.m,
            s=request.s,
            l=request.l,
            n=request.n,
            method=request.method.value,
            corrected=request.corrected,
            allow_extrapolated=request.allow_extrapolated,
        )
        params = request.model_dump(exclude={"method", "corrected", "allow_extrapolated"}, exclude_none=True)
        return ResponseModel(
            success=True,
            message="Solutions counted",
            data=CountRecord.build(params, dist.method, value)
        )

    except (HTTPException, HankelRankError):
        raise
    except Exception as e:
        logger.error(f"Error counting solutions: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))
