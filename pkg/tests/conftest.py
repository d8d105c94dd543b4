import sys
from pathlib import Path

import pytest

from bkfix import kernels
from bkfix.model import load_model_file

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

M1_PATH = HERE / "fixtures" / "m1.json"

BACKENDS = [kernels.python] + ([kernels.compiled] if kernels.compiled is not None else [])


@pytest.fixture
def m1():
    return load_model_file(M1_PATH)


@pytest.fixture
def m1_path():
    return M1_PATH


@pytest.fixture(params=BACKENDS, ids=lambda k: k.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param
