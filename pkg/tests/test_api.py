import pytest

from latpoly.core.config import settings

DIAMOND = "cross d=2 a=[1, 1]"


def test_requires_api_key(client):
    assert client.get("/health").status_code == 401
    assert client.get("/health", headers={settings.api_key_header: "otra"}).status_code == 401
    assert client.get("/count", params={"polytope": DIAMOND, "t": "1"}).status_code == 401


def test_health(client, auth_headers):
    response = client.get("/health", headers=auth_headers)
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "precision_bits": settings.precision_bits, "elasticsearch": False}
    assert response.headers["X-Request-ID"]


def test_request_id_is_echoed(client, auth_headers):
    response = client.get("/health", headers={**auth_headers, "X-Request-ID": "abc-123"})
    assert response.headers["X-Request-ID"] == "abc-123"


def test_count(client, auth_headers):
    response = client.get("/count", params={"polytope": DIAMOND, "t": "1"}, headers=auth_headers)
    assert response.status_code == 200
    assert response.json() == {"count": 5, "boundary_hits": 4, "certified": True}
    brute = client.get("/count", params={"polytope": DIAMOND, "t": "7/2", "brute_force": "true"}, headers=auth_headers)
    fast = client.get("/count", params={"polytope": DIAMOND, "t": "7/2"}, headers=auth_headers)
    assert brute.json()["count"] == fast.json()["count"] == 25


@pytest.mark.parametrize(
    "params",
    [
        {"polytope": "sphere d=2 a=[1, 1]", "t": "1"},
        {"polytope": DIAMOND, "t": "0"},
        {"polytope": DIAMOND, "t": "sqrt("},
        {"polytope": "standard d=2", "t": "1"},
        {"polytope": "standard d=2", "t": "1", "brute_force": "true"},
    ],
)
def test_count_rejects_bad_input(client, auth_headers, params):
    response = client.get("/count", params=params, headers=auth_headers)
    assert response.status_code == 422


def test_count_respects_max_t(client, auth_headers, monkeypatch):
    monkeypatch.setattr(settings, "api_max_t", 10)
    response = client.get("/count", params={"polytope": DIAMOND, "t": "11"}, headers=auth_headers)
    assert response.status_code == 422
    assert "API_MAX_T" in response.json()["detail"]


def test_poly(client, auth_headers):
    response = client.get("/poly", params={"axes": "[1, sqrt(2)]"}, headers=auth_headers)
    assert response.status_code == 200
    body = response.json()
    assert body["axes"] == ["1", "sqrt(2)"]
    assert body["coefficients"][2]["symbolic"] == {"a1*a2": "2"}
    assert client.get("/poly", params={"axes": "[1]", "kind": "ball"}, headers=auth_headers).status_code == 422


def test_fourier(client, auth_headers):
    params = {"simplex": "standard d=2", "y": "[1, 2]", "t": "3/2"}
    residues = client.get("/fourier", params=params, headers=auth_headers).json()
    contour = client.get("/fourier", params={**params, "method": "contour"}, headers=auth_headers).json()
    assert residues["method"] == "residues"
    assert contour["re"] == pytest.approx(residues["re"], abs=1e-8)
    assert contour["im"] == pytest.approx(residues["im"], abs=1e-8)
    cross = client.get("/fourier", params={"simplex": DIAMOND, "y": "[1, 2]", "t": "1"}, headers=auth_headers)
    assert cross.status_code == 200
    assert abs(cross.json()["im"]) < 1e-10
    unknown = client.get("/fourier", params={**params, "method": "fft"}, headers=auth_headers)
    assert unknown.status_code == 422


def test_cesaro(client, auth_headers, monkeypatch):
    response = client.get("/cesaro", params={"axes": "[1]", "t": "5/2", "N": 16}, headers=auth_headers)
    assert response.status_code == 200
    body = response.json()
    assert body["count"] == 5
    assert body["ces"] == pytest.approx(5.0, abs=1e-9)
    monkeypatch.setattr(settings, "api_max_n", 8)
    too_big = client.get("/cesaro", params={"axes": "[1]", "t": "5/2", "N": 16}, headers=auth_headers)
    assert too_big.status_code == 422


def test_ehrhart(client, auth_headers):
    response = client.get("/ehrhart", params=[("axes", 1), ("axes", 2), ("axes", 3)], headers=auth_headers)
    assert response.status_code == 200
    assert response.json()["coefficients"] == ["1", "3", "3", "1"]
    assert response.json()["match"] is True
    huge = client.get("/ehrhart", params=[("axes", 10 ** 6), ("axes", 1)], headers=auth_headers)
    assert huge.status_code == 422


def test_scan(client, auth_headers):
    body = {"polytope": DIAMOND, "t_start": "1", "t_stop": "3", "t_count": 3}
    response = client.post("/scan", json=body, headers=auth_headers)
    assert response.status_code == 200
    payload = response.json()
    assert payload["polytope"] == DIAMOND
    assert [r["count"] for r in payload["records"]] == [5, 13, 25]
    assert payload["fit"] is None
    assert payload["persisted"] is False
    assert payload["run_id"]


def test_scan_validation(client, auth_headers, monkeypatch):
    bad = {"polytope": DIAMOND, "t_start": "1/2", "t_stop": "3", "t_count": 3}
    assert client.post("/scan", json=bad, headers=auth_headers).status_code == 422
    assert client.post("/scan", json={"polytope": DIAMOND}, headers=auth_headers).status_code == 422
    monkeypatch.setattr(settings, "api_max_t", 10)
    far = {"polytope": DIAMOND, "t_start": "1", "t_stop": "50", "t_count": 3}
    assert client.post("/scan", json=far, headers=auth_headers).status_code == 422


def test_docs_behind_auth(client, auth_headers):
    assert client.get("/openapi.json").status_code == 401
    schema = client.get("/openapi.json", headers=auth_headers)
    assert schema.status_code == 200
    assert "/count" in schema.json()["paths"]
    assert client.get("/docs", headers=auth_headers).status_code == 200
    assert client.get("/redoc", headers=auth_headers).status_code == 404


def test_slow_requests_are_logged_as_warnings(client, auth_headers, monkeypatch, caplog):
    monkeypatch.setattr(settings, "api_slow_ms", 0.0)
    with caplog.at_level("INFO", logger="latpoly.http"):
        response = client.get("/count", params={"polytope": DIAMOND, "t": "2"}, headers=auth_headers)
    assert float(response.headers["X-Elapsed-Ms"]) >= 0
    records = [r for r in caplog.records if r.name == "latpoly.http" and "REQ#" in r.getMessage()]
    assert records and records[-1].levelname == "WARNING"
    assert "/count?polytope=" in records[-1].getMessage()


def test_forwarded_client_ip_only_when_trusted(client, auth_headers, monkeypatch, caplog):
    headers = {**auth_headers, "X-Forwarded-For": "203.0.113.7, 10.0.0.1"}
    with caplog.at_level("INFO", logger="latpoly.http"):
        client.get("/health", headers=headers)
        monkeypatch.setattr(settings, "trust_x_forwarded_for", True)
        client.get("/health", headers=headers)
    lines = [r.getMessage() for r in caplog.records if "REQ#" in r.getMessage()]
    assert "client=203.0.113.7" not in lines[-2]
    assert "client=203.0.113.7" in lines[-1]
