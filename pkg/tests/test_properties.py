"""Property tests over generated packages: the ordering, conservation and
truncation invariants must hold structurally for any input."""

from hypothesis import given, settings
from hypothesis import strategies as st

from genpkg import generate_package
from seqscan.features import FeatureId
from seqscan.methods import assign_trigger_scenario, import_closure
from seqscan.pipeline import analyze_package
from seqscan.render import render
from seqscan.tables import default_tables

TABLES = default_tables()


def check_invariants(package, result):
    closure = import_closure(package)
    scenarios = [assign_trigger_scenario(m, package.manifest, package, closure)
                 for m in result.roots]

    # scenario monotonicity + alphabetical order within a scenario
    values = [s.value for s in scenarios]
    assert values == sorted(values)
    for scenario in set(scenarios):
        names = [m.qualified_name for m, s in zip(result.roots, scenarios)
                 if s == scenario]
        assert names == sorted(names)

    # entries appear in root order
    assert [e.root for e in result.sequence.entries] == list(result.roots)

    extracted = set(result.instances)
    for entry in result.sequence.entries:
        # termination/no-duplicates: a method contributes at most once per entry
        assert len(entry.items) == len(set(entry.items))
        per_method: dict = {}
        for item in entry.items:
            assert item in extracted  # conservation
            per_method.setdefault(item.method, []).append((item.line, item.column))
        for positions in per_method.values():
            assert positions == sorted(positions)  # intra-method line order

    # ablation relation: distinct sequence items == instances of visited methods
    visited = {item.method for item in result.sequence.items}
    assert set(result.sequence.items) == {i for i in result.instances
                                          if i.method in visited}

    # every instance id is one of the 16; none from the metadata dimension
    assert all(item.id in FeatureId for item in result.instances)

    # rendering: truncation safety and vocabulary closure
    full = render(result.sequence, token_limit=100000)
    capped = render(result.sequence, token_limit=16)
    assert capped.token_count <= 16
    assert capped.text.split() == full.text.split()[:capped.token_count]
    allowed = {"start", "entry", "end", "of"}
    for fid in FeatureId:
        allowed.update(fid.description.split())
    allowed.update(e.root.file for e in result.sequence.entries)
    assert all(w in allowed for w in full.text.replace(",", "").split())


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000_000))
def test_generated_package_invariants(tmp_path_factory, seed):
    tmp_path = tmp_path_factory.mktemp("gen")
    package = generate_package(tmp_path, seed)
    result = analyze_package(package, tables=TABLES)
    check_invariants(package, result)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000_000))
def test_determinism_across_runs(tmp_path_factory, seed):
    tmp_path = tmp_path_factory.mktemp("det")
    package = generate_package(tmp_path, seed)
    one = analyze_package(package, tables=TABLES)
    two = analyze_package(package, tables=TABLES)
    assert one.description.text.encode() == two.description.text.encode()
    assert [i for i in one.instances] == [i for i in two.instances]
