"""
API v1 Router

Aggregates all endpoint routers
"""

from fastapi import APIRouter
from app.api.v1.endpoints import health, gamma, count, tables, verify

api_router = APIRouter()

# Include all endpoint routers
api_router.include_router(health.router, tags=["Health"])
api_router.include_router(gamma.router, prefix="/gamma", tags=["Rank Distributions"])
api_router.include_router(count.router, prefix="/count", tags=["Solution Counts"])
api_router.include_router(tables.router, prefix="/tables", tags=["Tables"])
api_router.include_router(verify.router, prefix="/verify", tags=["Verification"])
