import pathlib

import pytest

MODELS = pathlib.Path(__file__).resolve().parents[1] / "src" / "fsc" / "models"


def model_text(*names: str) -> str:
    return "\n".join((MODELS / name).read_text() for name in names)


def model_path(name: str) -> pathlib.Path:
    return MODELS / name


@pytest.fixture(scope="session")
def coffee_full():
    from fsc.lang.parser import parse
    from fsc.lang.resolver import resolve

    return resolve(parse(model_text("coffee_full.fsc")))


@pytest.fixture(scope="session")
def coffee_full_synthesis(coffee_full):
    from fsc.synth import normalize, synthesize

    return synthesize(normalize(coffee_full), engine="explicit")
