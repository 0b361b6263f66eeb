from conftest import make_package, source
from seqscan.methods import (
    MethodKind,
    TriggerScenario,
    Visibility,
    assign_trigger_scenario,
    enumerate_methods,
    import_closure,
    methods_for_file,
    prioritize_methods,
)
from seqscan.model import Ecosystem


def test_two_top_level_functions_yield_three_methods():
    refs = methods_for_file(source("m.py", "def a():\n    pass\n\ndef b():\n    pass\n"))
    assert len(refs) == 3
    assert refs[0].kind is MethodKind.IMPLICIT_MAIN
    assert {r.simple_name for r in refs[1:]} == {"a", "b"}


def test_implicit_main_spans_whole_file():
    refs = methods_for_file(source("m.py", "x = 1\n\n\ny = 2\n"))
    assert refs[0].span == (1, 5)


def test_python_private_visibility():
    refs = methods_for_file(source(
        "m.py",
        "def __secret():\n    pass\n"
        "def __init__():\n    pass\n"
        "def normal():\n    pass\n"))
    vis = {r.simple_name: r.visibility for r in refs if r.kind is MethodKind.EXPLICIT}
    assert vis["__secret"] is Visibility.PRIVATE
    assert vis["__init__"] is Visibility.PUBLIC  # dunder prefix AND suffix
    assert vis["normal"] is Visibility.PUBLIC


def test_js_private_visibility():
    refs = methods_for_file(source(
        "a.js", "class A {\n  #hidden() {}\n  shown() {}\n}\n"))
    vis = {r.simple_name: r.visibility for r in refs if r.kind is MethodKind.EXPLICIT}
    assert vis["#hidden"] is Visibility.PRIVATE
    assert vis["shown"] is Visibility.PUBLIC


def test_nested_functions_get_dotted_names():
    refs = methods_for_file(source(
        "m.py", "def outer():\n    def inner():\n        pass\n    return inner\n"))
    names = {r.local_name for r in refs if r.kind is MethodKind.EXPLICIT}
    assert names == {"outer", "outer.inner"}


def test_duplicate_names_get_numeric_suffix():
    refs = methods_for_file(source(
        "m.py",
        "if True:\n    def f():\n        pass\nelse:\n    def f():\n        pass\n"))
    names = [r.local_name for r in refs if r.kind is MethodKind.EXPLICIT]
    assert names == ["f", "f#2"]
    assert len(set(r.qualified_name for r in refs)) == len(refs)


def test_unparseable_file_contributes_only_main():
    refs = methods_for_file(source("bad.py", "def broken(:\n"))
    assert len(refs) == 1
    assert refs[0].kind is MethodKind.IMPLICIT_MAIN


def test_setup_py_main_is_install_time(tmp_path):
    package = make_package(tmp_path, {"setup.py": "x = 1\n", "pkg/__init__.py": ""})
    methods = enumerate_methods(package)
    main = next(m for m in methods if m.file == "setup.py")
    assert assign_trigger_scenario(main, package.manifest, package) \
        is TriggerScenario.INSTALL_TIME


def test_init_main_is_import_time(tmp_path):
    package = make_package(tmp_path, {"pkg/__init__.py": "x = 1\n"})
    main = enumerate_methods(package)[0]
    assert assign_trigger_scenario(main, package.manifest, package) \
        is TriggerScenario.IMPORT_TIME


def test_import_closure_is_transitive(tmp_path):
    package = make_package(tmp_path, {
        "pkg/__init__.py": "from pkg import a\n",
        "pkg/a.py": "import pkg.b\n",
        "pkg/b.py": "x = 1\n",
        "pkg/unrelated.py": "y = 2\n",
    })
    closure = import_closure(package)
    assert "pkg/a.py" in closure and "pkg/b.py" in closure
    assert "pkg/unrelated.py" not in closure
    mains = {m.file: m for m in enumerate_methods(package)
             if m.kind is MethodKind.IMPLICIT_MAIN}
    assert assign_trigger_scenario(mains["pkg/unrelated.py"], package.manifest,
                                   package) is TriggerScenario.RUN_TIME


def test_js_relative_require_closure(tmp_path):
    package = make_package(tmp_path, {
        "index.js": "const a = require('./lib/a');\n",
        "lib/a.js": "require('./b.js');\n",
        "lib/b.js": "module.exports = 1;\n",
        "lib/external.js": "x;\n",
    }, Ecosystem.NPM)
    closure = import_closure(package)
    assert closure == frozenset({"index.js", "lib/a.js", "lib/b.js"})


def test_public_function_is_runtime_root(tmp_path):
    package = make_package(tmp_path, {
        "pkg/__init__.py": "from pkg import debug\n",
        "pkg/debug.py": "def start_sub():\n    pass\nstart_sub()\n",
    })
    start_sub = next(m for m in enumerate_methods(package)
                     if m.simple_name == "start_sub")
    assert assign_trigger_scenario(start_sub, package.manifest, package) \
        is TriggerScenario.RUN_TIME
    assert start_sub in prioritize_methods(package)


def test_prioritization_order(tmp_path):
    package = make_package(tmp_path, {
        "setup.py": "x = 1\n",
        "pkg/__init__.py": "y = 1\n",
        "zz.py": "def foo():\n    pass\n",
    })
    roots = [m.qualified_name for m in prioritize_methods(package)]
    assert roots[0] == "setup.py::__main__"
    assert roots[1] == "pkg/__init__.py::__main__"
    # run-time roots: alphabetical, mains and explicit methods interleaved
    assert roots[2:] == ["zz.py::__main__", "zz.py::foo"]


def test_two_import_time_mains_alphabetical(tmp_path):
    package = make_package(tmp_path, {
        "pkg/__init__.py": "from pkg import b\nfrom pkg import a\n",
        "pkg/a.py": "x = 1\n",
        "pkg/b.py": "y = 1\n",
    })
    roots = [m.qualified_name for m in prioritize_methods(package)]
    imports = [r for r in roots if r.endswith("::__main__")]
    assert imports == ["pkg/__init__.py::__main__", "pkg/a.py::__main__",
                       "pkg/b.py::__main__"]


def test_private_methods_excluded_from_roots(tmp_path):
    package = make_package(tmp_path, {
        "m.py": "def __helper():\n    pass\n",
    })
    roots = prioritize_methods(package)
    assert [m.qualified_name for m in roots] == ["m.py::__main__"]


def test_scenario_monotonicity(tmp_path):
    package = make_package(tmp_path, {
        "setup.py": "import a\n",
        "a.py": "def z():\n    pass\n",
        "b/__init__.py": "q = 1\n",
    })
    roots = prioritize_methods(package)
    closure = import_closure(package)
    scenarios = [assign_trigger_scenario(m, package.manifest, package, closure).value
                 for m in roots]
    assert scenarios == sorted(scenarios)
