"""Response envelopes shared by every endpoint"""

from pydantic import BaseModel, Field
from typing import Optional, Any, Dict
from datetime import datetime


class ResponseModel(BaseModel):
    """Standard API response model; exact integers inside `data` are decimal strings"""
    success: bool = True
    message: str = "Success"
    data: Optional[Any] = None
    timestamp: datetime = Field(default_factory=datetime.now)


class ErrorResponse(BaseModel):
    """Body of every error reply"""
    error: bool = True
    message: str
    status_code: int = 400
    details: Optional[Any] = Field(
        None,
        description="Structured context: known ids, needed bits and budget, or the validity frontier",
    )


class HealthResponse(BaseModel):
    status: str = "healthy"
    environment: str
    version: str
    bit_budget: int = Field(..., description="Largest coefficient space enumerated on request, in bits")
    catalog: Dict[str, int] = Field(default_factory=dict, description="Case counts of the loaded formula catalog")
    timestamp: datetime = Field(default_factory=datetime.now)
