import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from embedmatch import FixtureEmbeddingProvider, HashEmbeddingProvider, load_instances, load_schema

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def hash_provider() -> HashEmbeddingProvider:
    return HashEmbeddingProvider(dimension=256)


@pytest.fixture
def bilingual_provider() -> FixtureEmbeddingProvider:
    return FixtureEmbeddingProvider.from_file(FIXTURES / "bilingual" / "vectors.json")


@pytest.fixture
def movie_provider() -> FixtureEmbeddingProvider:
    return FixtureEmbeddingProvider.from_file(FIXTURES / "movies" / "vectors.json")


def load_bilingual():
    base = FIXTURES / "bilingual"
    source = load_instances(
        load_schema(base / "geo_en.json"),
        {
            "country": base / "en_country.csv",
            "city": base / "en_city.csv",
            "river": base / "en_river.csv",
        },
    )
    target = load_instances(
        load_schema(base / "geo_de.json"),
        {
            "land": base / "de_land.csv",
            "stadt": base / "de_stadt.csv",
            "fluss": base / "de_fluss.csv",
        },
    )
    return source, target


@pytest.fixture
def bilingual_schemas():
    return load_bilingual()


def load_movies():
    base = FIXTURES / "movies"
    source = load_instances(load_schema(base / "left.json"), {"films": base / "films.csv"})
    target = load_instances(load_schema(base / "right.json"), {"movies": base / "movies.csv"})
    return source, target


@pytest.fixture
def movie_schemas():
    return load_movies()


def selfmatch_inputs():
    from embedmatch.run import RunInputs

    base = FIXTURES / "selfmatch"
    instance_map = {t: str(base / f"{t}.csv") for t in ("country", "city", "river")}
    return RunInputs(
        source_schema=str(base / "left.json"),
        target_schema=str(base / "right.json"),
        source_instances=dict(instance_map),
        target_instances=dict(instance_map),
        alignment=str(base / "gold.json"),
    )
