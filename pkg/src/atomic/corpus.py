import logging
import shutil
import tarfile
import tempfile
import zipfile
from pathlib import Path

import requests

logger = logging.getLogger(__name__)


def fetch_corpus(url: str, dest: Path, timeout: float = 60.0) -> list[Path]:
    """Download a corpus archive (zip or tar) and unpack it into dest.

    Returns the DIMACS files found under dest afterwards.
    """
    dest.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(suffix=Path(url).suffix, delete=False) as tmp:
        archive = Path(tmp.name)

    try:
        with open(archive, "wb") as out, requests.get(url, stream=True, timeout=timeout) as r:
            r.raise_for_status()
            for chunk in r.iter_content(chunk_size=1 << 16):
                out.write(chunk)
        logger.info("Downloaded %s (%d bytes)", url, archive.stat().st_size)

        if zipfile.is_zipfile(archive):
            with zipfile.ZipFile(archive) as zf:
                zf.extractall(dest)
        elif tarfile.is_tarfile(archive):
            with tarfile.open(archive) as tf:
                tf.extractall(dest, filter="data")
        else:
            target = dest / Path(url).name
            shutil.copyfile(archive, target)
    finally:
        archive.unlink(missing_ok=True)

    found = sorted(p for p in dest.rglob("*") if p.suffix in (".cnf", ".dimacs"))
    logger.info("Corpus at %s holds %d instances", dest, len(found))
    return found
