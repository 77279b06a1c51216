"""Test configuration and fixtures."""

import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from app.core.database import Base, get_db
from app.graph.comm_graph import build_graph
from app.graph.labelling import Labelling
from app.main import app

# Create in-memory SQLite database for testing
SQLALCHEMY_DATABASE_URL = "sqlite:///:memory:"

engine = create_engine(
    SQLALCHEMY_DATABASE_URL,
    connect_args={"check_same_thread": False},
    poolclass=StaticPool,
)
TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


@pytest.fixture(scope="function")
def db():
    """Create a fresh database for each test."""
    Base.metadata.create_all(bind=engine)
    db = TestingSessionLocal()
    try:
        yield db
    finally:
        db.close()
        Base.metadata.drop_all(bind=engine)


@pytest.fixture(scope="function")
def client(db):
    """Create a test client with database dependency override."""
    def override_get_db():
        try:
            yield db
        finally:
            pass

    app.dependency_overrides[get_db] = override_get_db
    with TestClient(app) as test_client:
        yield test_client
    app.dependency_overrides.clear()


@pytest.fixture
def path3():
    """Path 0-1-2."""
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def square():
    """4-cycle 0-1-2-3-0."""
    return build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def square_weights(square):
    """Weights 1, 2, 3, 4 around the square; the MST is {0,1} {1,2} {2,3}."""
    return Labelling.weights(square, {(0, 1): 1, (1, 2): 2, (2, 3): 3, (3, 0): 4})


@pytest.fixture
def clique5():
    return build_graph(5, [(a, b) for a in range(5) for b in range(a + 1, 5)])

