import pytest
from fastapi.testclient import TestClient

from latpoly.api.routes import limiter
from latpoly.core.config import settings
from latpoly.polytope import AxisLengths

API_KEY = "test-key"


@pytest.fixture
def service_settings(monkeypatch):
    monkeypatch.setattr(settings, "api_key", API_KEY)
    monkeypatch.setattr(settings, "api_key_required", True)
    monkeypatch.setattr(settings, "elasticsearch_url", "")
    monkeypatch.setattr(limiter, "enabled", False)
    return settings


@pytest.fixture
def client(service_settings):
    from latpoly.main import app

    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def auth_headers():
    return {settings.api_key_header: API_KEY}


@pytest.fixture
def unit_axes():
    return AxisLengths.of([1, 1])


@pytest.fixture
def algebraic_axes():
    return AxisLengths.parse("[sqrt(2), sqrt(3)]")
