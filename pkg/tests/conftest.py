import os

import pytest

from exdim import formats
from exdim.suite import DATA_DIR

MODULE_CATS = ["mod_a2", "mod_a3r", "mod_tri", "rec_x1.B", "rec_x2.B", "rec_x3.B", "rec_x4.B"]
EXTRI_CATS = ["extri_a1", "extri_a2", "extri_b1", "extri_b2", "extri_c1", "extri_c2"]
X_RECS = ["rec_x1", "rec_x2", "rec_x3", "rec_x4"]
ALL_RECS = X_RECS + ["rec_tri"]


class Shipped:
    """Loads each shipped file once per test session."""

    def __init__(self):
        self.cats = {}
        self.recs = {}

    def path(self, name):
        return os.path.join(DATA_DIR, name)

    def cat(self, name):
        path = os.path.normpath(self.path(name + ".cat"))
        if path not in self.cats:
            self.cats[path] = formats.load_category(path)
        return self.cats[path]

    def rec(self, name):
        if name not in self.recs:
            self.recs[name] = formats.load_recollement(self.path(name + ".rec"), self.cats)
        return self.recs[name]


@pytest.fixture(scope="session")
def shipped():
    return Shipped()


@pytest.fixture(scope="session")
def a2(shipped):
    return shipped.cat("mod_a2")


@pytest.fixture(scope="session")
def a3r(shipped):
    return shipped.cat("mod_a3r")


@pytest.fixture(scope="session")
def quivers():
    q1 = formats.load_quiver(os.path.join(DATA_DIR, "a2.quiver"))
    q2 = formats.load_quiver(os.path.join(DATA_DIR, "a3r.quiver"))
    return {q1.name: q1, q2.name: q2}
