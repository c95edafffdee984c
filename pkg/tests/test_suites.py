import pytest

from gorenstein_kit.suites import DEFAULT_GRID, PROPERTIES, SUITES, run_property


def test_registry_covers_every_suite():
    assert SUITES == ["biduals", "complexes", "fitting", "kolyvagin", "limits", "linalg", "modules", "ring", "stark"]
    for name, p in PROPERTIES.items():
        assert name == f"{p.suite}.{name.split('.', 1)[1]}" and p.anchor


@pytest.mark.parametrize("name", sorted(PROPERTIES))
def test_property_smoke(name):
    for label in DEFAULT_GRID:
        e = run_property(name, label, 2024, 2, 65536)
        assert e["failures"] == 0, e["counterexample"]
