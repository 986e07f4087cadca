"""HTTP API"""

import pytest

pytestmark = pytest.mark.asyncio


async def test_root_and_health(client):
    response = await client.get("/")
    assert response.status_code == 200
    assert response.json()["health"] == "/api/v1/health"

    response = await client.get("/api/v1/health")
    assert response.status_code == 200
    health = response.json()
    assert health["status"] == "healthy"
    assert health["bit_budget"] > 0
    assert health["catalog"]["cases"] > 0


async def test_info_reports_catalog(client):
    response = await client.get("/api/v1/info")
    data = response.json()["data"]
    assert data["catalog"]["cases"] > 0
    assert data["errata"] > 0
    assert set(data["cache"]) == {"entries", "enumerated_shapes", "hits", "misses"}


async def test_gamma_closed(client):
    response = await client.post("/api/v1/gamma", json={"s": 2, "k": 6, "method": "closed"})
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["data"]["counts"] == ["1", "21", "1162", "20160", "258720", "1128960", "688128"]
    assert body["data"]["shape"] == {"s": 2, "m": 0, "l": 0, "k": 6}


async def test_gamma_mixed(client):
    response = await client.post("/api/v1/gamma/mixed", json={"n": 2, "m": 1, "l": 3, "k": 5})
    assert response.status_code == 200
    assert response.json()["data"]["counts"] == ["1", "129", "4566", "94440", "1714368", "31740928"]


async def test_gamma_validation(client):
    response = await client.post("/api/v1/gamma", json={"s": 0, "k": 3})
    assert response.status_code == 422
    assert response.json()["message"] == "Validation error"


async def test_gamma_budget(client):
    response = await client.post("/api/v1/gamma", json={"s": 3, "m": 3, "l": 3, "k": 12, "method": "brute"})
    assert response.status_code == 413
    details = response.json()["details"]
    assert details["needed_bits"] > details["budget"]


async def test_count_triple(client):
    response = await client.post("/api/v1/count", json={"q": 3, "k": 5, "s": 3})
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["value"] == str(3563904 << 6)
    assert data["factored"] == "27843·2^13"
    assert data["params"] == {"q": 3, "k": 5, "s": 3, "m": 0, "l": 0}


async def test_count_mixed_corrected(client):
    response = await client.post("/api/v1/count", json={"q": 1, "k": 2, "n": 1, "corrected": True})
    assert response.status_code == 200
    assert response.json()["data"]["value"] == "11"


async def test_count_needs_opt_in_for_third_block_offset(client):
    response = await client.post("/api/v1/count", json={"q": 2, "k": 2, "s": 1, "l": 1})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] is True
    assert body["status_code"] == 422
    assert body["details"]["frontier"] is None or isinstance(body["details"]["frontier"], list)


async def test_count_needs_one_system(client):
    response = await client.post("/api/v1/count", json={"q": 2, "k": 2})
    assert response.status_code == 400


async def test_tables(client):
    response = await client.get("/api/v1/tables")
    ids = [item["id"] for item in response.json()["data"]]
    assert "sss-s2-k6" in ids

    response = await client.get("/api/v1/tables/sss-s2-symbolic", params={"k": 6})
    entries = response.json()["data"]["entries"]
    assert entries[6]["value"] == "688128"


async def test_unknown_table(client):
    response = await client.get("/api/v1/tables/nothing-here")
    assert response.status_code == 404
    assert "sss-s2-k6" in response.json()["details"]["known"]


async def test_verify_profiles(client):
    response = await client.post("/api/v1/verify/profiles", json={"max_bits": 8})
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["data"]["suite"] == "profiles"
    assert body["data"]["failures"] == []


async def test_verify_unknown_suite(client):
    response = await client.post("/api/v1/verify/everything")
    assert response.status_code == 422
