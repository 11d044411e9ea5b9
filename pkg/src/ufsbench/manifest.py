"""Dataset manifest: download, checksum-verified cache, offline reuse.

A manifest is a JSON array of entries::

    {"name": "emotions",
     "url": "https://host/path/emotions.zip",
     "sha256": "...",
     "labels": {"xml": "emotions.xml"} | {"first": n} | {"last": n}}

Archives land in the cache directory under their entry name; cached files
that pass the checksum are reused without touching the network.  Failures
are isolated per entry so one bad download never aborts a benchmark run.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
import urllib.request
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from .arff import LabelSpec, parse_arff, parse_label_xml
from .dataset import MultiLabelDataset

CACHE_ENV_VAR = "UFSBENCH_CACHE"


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    url: str
    sha256: str
    labels: dict

    @property
    def filename(self) -> str:
        tail = self.url.rsplit("/", 1)[-1] or "archive"
        return f"{self.name}__{tail}"


@dataclass
class FetchResult:
    datasets: list[MultiLabelDataset] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from None
    if not isinstance(raw, list) or not raw:
        raise ManifestError("manifest must be a non-empty JSON array")
    entries = []
    for item in raw:
        missing = {"name", "url", "sha256", "labels"} - set(item)
        if missing:
            raise ManifestError(f"manifest entry missing fields: {sorted(missing)}")
        labels = item["labels"]
        if not isinstance(labels, dict) or not (
            set(labels) & {"xml", "first", "last"}
        ):
            raise ManifestError(
                f"entry '{item['name']}': labels must specify xml, first or last"
            )
        entries.append(
            ManifestEntry(
                name=item["name"], url=item["url"],
                sha256=item["sha256"].lower(), labels=labels,
            )
        )
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise ManifestError("duplicate dataset names in manifest")
    return entries


def default_cache_dir() -> Path:
    override = os.environ.get(CACHE_ENV_VAR)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "ufsbench"


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _download(url: str, dest: Path) -> None:
    # write-then-atomic-rename keeps concurrent fetchers safe
    dest.parent.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(url) as response:
        with tempfile.NamedTemporaryFile(dir=dest.parent, delete=False) as tmp:
            tmp.write(response.read())
            tmp_path = Path(tmp.name)
    os.replace(tmp_path, dest)


def ensure_cached(entry: ManifestEntry, cache_dir: Path, offline: bool = False) -> Path:
    """Return the verified local archive path for one entry."""
    path = Path(cache_dir) / entry.filename
    if path.exists():
        actual = _sha256_file(path)
        if actual == entry.sha256:
            return path
        if offline:
            raise ManifestError(
                f"cached file checksum mismatch (expected {entry.sha256}, got {actual})"
            )
        path.unlink()
    if offline:
        raise ManifestError("not cached and offline mode requested")
    _download(entry.url, path)
    actual = _sha256_file(path)
    if actual != entry.sha256:
        raise ManifestError(
            f"downloaded file checksum mismatch (expected {entry.sha256}, got {actual})"
        )
    return path


def _label_spec_for(entry: ManifestEntry, xml_text: str | None) -> LabelSpec:
    labels = entry.labels
    if "xml" in labels:
        if xml_text is None:
            raise ManifestError(f"entry '{entry.name}': label XML not found in archive")
        return parse_label_xml(xml_text)
    if "first" in labels:
        return LabelSpec.first(int(labels["first"]))
    return LabelSpec.last(int(labels["last"]))


def load_entry(entry: ManifestEntry, archive: Path) -> MultiLabelDataset:
    """Parse a cached archive (bare .arff or .zip with arff [+ label xml])."""
    xml_text = None
    if archive.suffix.lower() == ".zip" or zipfile.is_zipfile(archive):
        with zipfile.ZipFile(archive) as zf:
            arff_members = [n for n in zf.namelist() if n.lower().endswith(".arff")]
            if len(arff_members) != 1:
                raise ManifestError(
                    f"entry '{entry.name}': expected exactly one .arff in archive, "
                    f"found {len(arff_members)}"
                )
            arff_text = zf.read(arff_members[0]).decode("utf-8")
            wanted = entry.labels.get("xml")
            xml_members = [n for n in zf.namelist() if n.lower().endswith(".xml")]
            if isinstance(wanted, str):
                if wanted not in zf.namelist():
                    raise ManifestError(
                        f"entry '{entry.name}': member '{wanted}' not in archive"
                    )
                xml_text = zf.read(wanted).decode("utf-8")
            elif xml_members:
                xml_text = zf.read(xml_members[0]).decode("utf-8")
    else:
        arff_text = archive.read_text()
    spec = _label_spec_for(entry, xml_text)
    parsed = parse_arff(arff_text, spec)
    return MultiLabelDataset(
        name=entry.name, X=parsed.X, Y=parsed.Y,
        feature_names=parsed.feature_names, label_names=parsed.label_names,
    )


def fetch_manifest(
    manifest_path: str | Path,
    cache_dir: str | Path | None = None,
    offline: bool = False,
) -> FetchResult:
    """Fetch, verify and parse every manifest entry; failures are per-entry."""
    entries = load_manifest(manifest_path)
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    result = FetchResult()
    for entry in entries:
        try:
            archive = ensure_cached(entry, cache, offline=offline)
            result.datasets.append(load_entry(entry, archive))
        except Exception as exc:  # noqa: BLE001 - isolate entry failures
            result.failures.append((entry.name, str(exc)))
    return result
