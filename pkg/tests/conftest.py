import random

import pytest

from app import create_app
from app.config import RegistryConfig
from app.services.registry_service import RegistryService
from tests.factories import load_fixture_record

API_TOKEN = "segredo-de-teste"


@pytest.fixture
def rng():
    return random.Random(20200301)


@pytest.fixture
def bodc_record():
    return load_fixture_record("bodc-sbe37.pidinst")


@pytest.fixture
def hzb_record():
    return load_fixture_record("hzb-e2.pidinst")


@pytest.fixture
def registry_config(tmp_path):
    return RegistryConfig(
        store_path=str(tmp_path / "store"),
        cache_type="SimpleCache",
        cache_dir=str(tmp_path / "cache"),
        api_token=API_TOKEN,
    )


@pytest.fixture
def registry(registry_config):
    return RegistryService(registry_config)


@pytest.fixture
def app(registry_config):
    app = create_app(registry_config)
    app.config['TESTING'] = True
    return app


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def auth_headers():
    return {"Authorization": f"Bearer {API_TOKEN}", "Content-Type": "application/pidinst+json"}
