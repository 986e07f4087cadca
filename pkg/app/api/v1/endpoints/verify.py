"""
Verification endpoints
"""

from fastapi import APIRouter, HTTPException, Depends
from fastapi.concurrency import run_in_threadpool
from typing import Optional
import logging

from app.core.exceptions import HankelRankError
from app.models.common import ResponseModel
from app.models.shapes import Suite, VerifyReport, VerifyRequest
from app.services.verification_service import VerificationService, get_verification_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/{suite}", response_model=ResponseModel)
async def verify(
    suite: Suite,
    request: Optional[VerifyRequest] = None,
    service: VerificationService = Depends(get_verification_service)
):
    """
    Run one verification suite

    `success` is false when any check failed; the failures carry per-case diffs.
    """
    request = request or VerifyRequest()
    try:
        report = await run_in_threadpool(service.run, suite.value, request.max_bits, request.workers)
        return ResponseModel(
            success=report.passed,
            message=f"Suite {suite.value}: {'passed' if report.passed else 'failed'}",
            data=VerifyReport(**report.as_dict())
        )

    except (HTTPException, HankelRankError):
        raise
    except Exception as e:
        logger.error(f"Error running suite {suite.value}: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))
