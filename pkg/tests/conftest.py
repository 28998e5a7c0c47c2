import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fracfde.psi import BUILTIN_PSI


@pytest.fixture(params=sorted(BUILTIN_PSI))
def psi_label(request):
    return request.param


@pytest.fixture
def identity_psi():
    return BUILTIN_PSI["identity"]
