import json

import pytest
from fastapi.testclient import TestClient
from typer.testing import CliRunner

from app.main import app


@pytest.fixture
def client():
    return TestClient(app)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_spec(tmp_path):
    """Écrit une spécification de modèle JSON et renvoie son chemin"""

    def write(payload: dict, name: str = "model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return write
