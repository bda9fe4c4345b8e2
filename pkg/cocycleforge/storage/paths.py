import re
from pathlib import Path


def make_slug(kind: str, name: str) -> str:
    """
    Create a filesystem-safe slug from experiment kind and cocycle name.

    Returns:
        str: Sanitized slug limited to 50 characters.
    """
    combined = f"{kind}_{name}"
    slug = re.sub(r'[^\w\-_]', '_', combined)
    slug = re.sub(r'_+', '_', slug)
    return slug[:50]


def output_dir(root: str, date_str: str, slug: str, config_hash: str) -> str:
    """
    Output directory for one run: <root>/<date>/<slug>-<first 12 hex digits of the config hash>.

    The hash suffix keeps reruns of an identical config in the same place.
    """
    return str(Path(root) / date_str / f"{slug}-{config_hash[:12]}")
