import io
import json
import shutil
import tarfile
from pathlib import Path

import pytest

from seqscan.model import Ecosystem, Language, SourceFile

FIXTURES = Path(__file__).parent / "fixtures"


def make_tarball(tree_dir: Path, out_path: Path) -> Path:
    """Pack a fixture directory into name-version.tar.gz with a top-level dir."""
    with tarfile.open(out_path, "w:gz") as tar:
        tar.add(tree_dir, arcname=tree_dir.name)
    return out_path


def make_tarball_from_files(files: dict[str, str], out_path: Path,
                            top_dir: str | None = None) -> Path:
    with tarfile.open(out_path, "w:gz") as tar:
        for rel, content in files.items():
            name = f"{top_dir}/{rel}" if top_dir else rel
            data = content.encode("utf-8")
            info = tarfile.TarInfo(name=name)
            info.size = len(data)
            tar.addfile(info, io.BytesIO(data))
    return out_path


def source(path: str, content: str) -> SourceFile:
    if path.endswith(".py"):
        lang = Language.PYTHON
    elif path.endswith((".js", ".cjs", ".mjs")):
        lang = Language.JAVASCRIPT
    else:
        lang = Language.OTHER
    return SourceFile(path=path, language=lang, content=content)


def make_package(tmp_path: Path, files: dict[str, str],
                 ecosystem: Ecosystem = Ecosystem.PYPI,
                 name: str = "pkg", version: str = "1.0.0"):
    """Materialize files on disk and build a loaded-Package equivalent."""
    from seqscan.model import Package, parse_manifest

    root = tmp_path / f"{name}-{version}"
    if root.exists():
        shutil.rmtree(root)
    for rel, content in files.items():
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")
    manifest = parse_manifest(ecosystem, root)
    sources = tuple(source(rel, files[rel]) for rel in sorted(files))
    return Package(name=name, version=version, ecosystem=ecosystem, root=root,
                   manifest=manifest, sources=sources)


@pytest.fixture
def superoptimzer_archive(tmp_path):
    return make_tarball(FIXTURES / "superoptimzer-1.0.0",
                        tmp_path / "superoptimzer-1.0.0.tar.gz")


@pytest.fixture
def dpp_client_archive(tmp_path):
    return make_tarball(FIXTURES / "dpp_client-1.0.3",
                        tmp_path / "dpp_client-1.0.3.tar.gz")


@pytest.fixture
def botbait_archive(tmp_path):
    return make_tarball(FIXTURES / "botbait-1.0.0",
                        tmp_path / "botbait-1.0.0.tar.gz")


@pytest.fixture(scope="session")
def oracle():
    with open(FIXTURES / "superoptimzer_oracle.json", encoding="utf-8") as handle:
        return json.load(handle)
