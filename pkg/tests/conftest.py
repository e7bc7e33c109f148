import sys

from functools import lru_cache

from hypothesis import settings

from blochlab.basis import Mode
from blochlab.dispersion import find_bands
from blochlab.potential import make_biparabolic, make_kronig_penney

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


@lru_cache(maxsize=None)
def bands_for(kind: str, V: float, mode: str = "exact"):
    spec = make_kronig_penney(V) if kind == "kp" else make_biparabolic(V)
    return spec, tuple(find_bands(spec, Mode(mode)))


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
