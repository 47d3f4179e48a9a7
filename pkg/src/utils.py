"""Utility functions for the order atlas and JSON exports."""

import json
import logging
import os
import tempfile
from typing import Dict, List, Optional, Sequence, Tuple, Union
from pathlib import Path

from .lie_core import PrimePowerField, SemisimpleGroup, group_order, parse_group
from .models import AtlasBounds, AtlasEntry, AtlasFile, CatalogDocument


logger = logging.getLogger(__name__)

Atlas = Dict[int, List[Tuple[SemisimpleGroup, PrimePowerField]]]


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write text to a temporary file next to path, then rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def atlas_to_file(atlas: Atlas, max_rank: int, q_values: Sequence[int]) -> AtlasFile:
    entries = {
        str(order): [AtlasEntry(group=str(g), q=str(f.q)) for g, f in pairs]
        for order, pairs in sorted(atlas.items())
    }
    return AtlasFile(bounds=AtlasBounds(max_rank=max_rank, q_values=sorted(set(q_values))), entries=entries)


def atlas_from_file(data: AtlasFile) -> Atlas:
    """
    Rebuild the in-memory atlas, re-validating every entry.

    Raises:
        ValueError: If an entry's order does not match its key
    """
    atlas: Atlas = {}
    for key, entries in data.entries.items():
        order = int(key)
        pairs = []
        for entry in entries:
            g, f = parse_group(entry.group), PrimePowerField.from_q(int(entry.q))
            if group_order(g, f) != order:
                raise ValueError(f"Atlas entry {entry.group} over F_{entry.q} does not have order {key}")
            pairs.append((g, f))
        atlas[order] = pairs
    return atlas


def save_atlas(data: AtlasFile, file_path: Union[str, Path]) -> None:
    """
    Save an atlas to JSON atomically.

    Args:
        data: Atlas to save
        file_path: Destination path; parent directories are created
    """
    atomic_write_text(file_path, data.model_dump_json(indent=2))
    logger.info(f"Atlas with {len(data.entries)} orders saved to: {file_path}")


def load_atlas(file_path: Union[str, Path]) -> Optional[AtlasFile]:
    """
    Load an atlas from JSON.

    Returns:
        The atlas, or None if the file does not exist

    Raises:
        ValueError: If the file is not a valid atlas
    """
    file_path = Path(file_path)
    if not file_path.exists():
        return None
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return AtlasFile(**json.load(f))
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON format in {file_path}: {e}")


def save_catalog(document: CatalogDocument, file_path: Union[str, Path]) -> None:
    atomic_write_text(file_path, document.model_dump_json(indent=2))
    logger.info(f"Catalog with {len(document.rows)} rows saved to: {file_path}")
