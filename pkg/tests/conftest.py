"""
Shared fixtures: services with small enumeration budgets and an ASGI client
"""

import pytest
import pytest_asyncio
from httpx import ASGITransport, AsyncClient

from app.services.counting_service import CountingService
from app.services.formula_service import FormulaService, get_formula_service
from app.services.recurrence_service import RecurrenceService
from app.services.table_service import TableService, get_table_service
from app.services.verification_service import VerificationService

TEST_BIT_BUDGET = 20


@pytest.fixture(scope="session")
def formulas() -> FormulaService:
    return get_formula_service()


@pytest.fixture
def recurrence(formulas) -> RecurrenceService:
    return RecurrenceService(formulas, bit_budget=TEST_BIT_BUDGET)


@pytest.fixture
def counting(recurrence) -> CountingService:
    return CountingService(recurrence)


@pytest.fixture(scope="session")
def tables() -> TableService:
    return get_table_service()


@pytest.fixture
def verification(counting, tables) -> VerificationService:
    return VerificationService(counting, tables)


@pytest_asyncio.fixture
async def client():
    from app.main import app

    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as http:
        yield http
