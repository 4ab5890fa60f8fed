import pytest

from regfid.errors import ConfigError
from regfid.properties import PROPERTIES, format_report, run_properties


@pytest.mark.parametrize("name", [p.name for p in PROPERTIES])
def test_property_holds(name):
    (outcome,) = run_properties(seed=0, names=[name])
    assert outcome.passed, outcome.line()


def test_report_is_reproducible():
    names = ["trace_preservation", "fidelity_gradient_fd", "determinism"]
    first = format_report(run_properties(seed=3, trials=4, names=names))
    assert first == format_report(run_properties(seed=3, trials=4, names=names))
    assert first.count("\n") == 4


def test_unknown_property_name():
    with pytest.raises(ConfigError):
        run_properties(names=["no_such_property"])
