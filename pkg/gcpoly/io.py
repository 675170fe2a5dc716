"""File formats for gcpoly.

SPDX-License-Identifier: MIT
Copyright (c) 2026 Sean P. Kane (GitHub: spkane)

Binary masks are read from PGM (P5 or P2, any value > 0 is foreground).
Geometries go in and out as GeoJSON in pixel coordinates with anti-clockwise
exteriors. Floats are written with 9 significant digits and keys sorted so
repeated runs produce identical bytes.
"""

import json
import math
import sys
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np
import shapely
from shapely.errors import GEOSException, ShapelyError
from shapely.geometry import mapping, shape

from gcpoly.contour import RasterMask
from gcpoly.errors import GcpolyError, InputFormatError
from gcpoly.geometry import Polygon, Polyline, orient_ring

SIGNIFICANT_DIGITS = 9


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First `count` header tokens and the offset just past the last one."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise InputFormatError("Truncated PGM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
                pos += 1
            tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes) -> RasterMask:
    """Decode PGM bytes into a mask.

    Raises:
        InputFormatError: On anything that is not a well-formed P5 or P2 image
    """
    tokens, pos = _pgm_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P2"):
        raise InputFormatError(f"Not a PGM image (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as e:
        raise InputFormatError(f"Bad PGM header: {e!s}") from e
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise InputFormatError(f"Bad PGM header: {width}x{height}, maxval {maxval}")

    count = width * height
    if magic == b"P5":
        dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
        body = data[pos + 1 : pos + 1 + count * dtype.itemsize]
        if len(body) < count * dtype.itemsize:
            raise InputFormatError("Truncated PGM pixel data")
        values = np.frombuffer(body, dtype=dtype)
    else:
        try:
            values = np.array([int(t) for t in data[pos:].split()[:count]], dtype=np.int64)
        except ValueError as e:
            raise InputFormatError(f"Bad PGM pixel value: {e!s}") from e
        if len(values) < count:
            raise InputFormatError("Truncated PGM pixel data")
    return RasterMask(values.reshape(height, width) > 0)


def read_pgm(path: Path) -> RasterMask:
    """Read a PGM mask file.

    Raises:
        InputFormatError: If the file is missing or malformed
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputFormatError(f"Cannot read {path}: {e!s}") from e
    try:
        return parse_pgm(data)
    except InputFormatError as e:
        raise InputFormatError(f"{path}: {e!s}") from e


def write_pgm(path: Path, mask: RasterMask) -> None:
    """Write a mask as binary PGM (foreground 255)."""
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + (mask.values * 255).astype(np.uint8).tobytes())


def round_floats(value: Any) -> Any:
    """Round every float in a JSON-like structure to SIGNIFICANT_DIGITS."""
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {k: round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v) for v in value]
    if isinstance(value, np.generic):
        return round_floats(value.item())
    return value


def dumps(data: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(round_floats(data), sort_keys=True, indent=2) + "\n"


def write_text(text: str, path: Path | None) -> None:
    """Write to a file, or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _shapely_polygon(polygon: Polygon) -> shapely.Polygon:
    return shapely.Polygon(polygon.exterior.points, [ring.points for ring in polygon.interiors])


def polygon_geometry(polygon: Polygon) -> dict[str, Any]:
    """GeoJSON geometry of a polygon."""
    return mapping(_shapely_polygon(polygon))


def polygons_geometry(polygons: list[Polygon]) -> dict[str, Any]:
    """A Polygon for one polygon, a MultiPolygon for several."""
    if len(polygons) == 1:
        return polygon_geometry(polygons[0])
    return mapping(shapely.MultiPolygon([_shapely_polygon(p) for p in polygons]))


def polyline_geometry(line: Polyline) -> dict[str, Any]:
    """GeoJSON geometry of a polyline; a closed one becomes a closed LineString."""
    return mapping(shapely.LineString(line.points))


def feature(geometry: dict[str, Any], properties: dict[str, Any]) -> dict[str, Any]:
    return {"type": "Feature", "geometry": geometry, "properties": properties}


def feature_collection(
    features: Iterable[dict[str, Any]], config: dict[str, Any], errors: list[dict[str, Any]] | None = None
) -> dict[str, Any]:
    """A FeatureCollection carrying the run config and any per-input errors."""
    return {"type": "FeatureCollection", "config": config, "errors": errors or [], "features": list(features)}


def _dedupe(coords: np.ndarray) -> np.ndarray:
    keep = np.ones(len(coords), dtype=bool)
    keep[1:] = np.any(np.diff(coords, axis=0) != 0.0, axis=1)
    return coords[keep]


def _ring(coords: Any, ccw: bool) -> Polyline:
    arr = _dedupe(np.asarray(coords, dtype=np.float64)[:, :2])
    return orient_ring(Polyline.from_coords(arr, closed=True), ccw=ccw)


def parse_geometry(geometry: dict[str, Any]) -> list[Polygon | Polyline]:
    """Turn a GeoJSON geometry into gcpoly objects.

    LineStrings give a Polyline (closed if it ends where it starts), Polygons
    give a Polygon with re-oriented rings and MultiPolygons one Polygon per
    part. An empty geometry is an error.

    Raises:
        InputFormatError: On unsupported or malformed geometries
    """
    try:
        geom = shape(geometry)
    except (AttributeError, KeyError, TypeError, ValueError, GEOSException, ShapelyError) as e:
        raise InputFormatError(f"Malformed geometry: {e!s}") from e
    try:
        if geom.is_empty:
            raise InputFormatError(f"Empty {geom.geom_type} geometry")
        if geom.geom_type == "LineString":
            return [Polyline.from_coords(_dedupe(np.asarray(geom.coords, dtype=np.float64)[:, :2]))]
        parts = list(geom.geoms) if geom.geom_type == "MultiPolygon" else [geom]
        if any(part.geom_type != "Polygon" for part in parts):
            raise InputFormatError(f"Unsupported geometry type: {geom.geom_type}")
        return [
            Polygon(_ring(part.exterior.coords, ccw=True), tuple(_ring(r.coords, ccw=False) for r in part.interiors))
            for part in parts
        ]
    except InputFormatError:
        raise
    except (GcpolyError, IndexError, ValueError) as e:
        raise InputFormatError(f"Invalid {geom.geom_type}: {e!s}") from e


def read_features(path: Path) -> list[dict[str, Any]]:
    """Features of a GeoJSON FeatureCollection (or a single Feature).

    Raises:
        InputFormatError: If the file is unreadable or not GeoJSON
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputFormatError(f"Cannot read GeoJSON {path}: {e!s}") from e
    if not isinstance(data, dict):
        raise InputFormatError(f"{path} is not a GeoJSON object")
    if data.get("type") == "Feature":
        features = [data]
    elif data.get("type") == "FeatureCollection" and isinstance(data.get("features"), list):
        features = data["features"]
    else:
        raise InputFormatError(f"{path} is neither a Feature nor a FeatureCollection")
    for i, item in enumerate(features):
        if not isinstance(item, dict) or item.get("type") != "Feature" or not isinstance(item.get("geometry"), dict):
            raise InputFormatError(f"{path}: feature {i} is malformed")
    return features


def polygons_by_image(path: Path, key: str = "image_id") -> dict[str, list[Polygon]]:
    """Group the polygons of a GeoJSON file by an image id property.

    Raises:
        InputFormatError: If a feature lacks the property or is not a polygon
    """
    grouped: dict[str, list[Polygon]] = {}
    for i, item in enumerate(read_features(path)):
        props = item.get("properties") or {}
        if key not in props:
            raise InputFormatError(f"{path}: feature {i} has no {key!r} property")
        shapes = parse_geometry(item["geometry"])
        if not all(isinstance(s, Polygon) for s in shapes):
            raise InputFormatError(f"{path}: feature {i} is not a polygon")
        grouped.setdefault(str(props[key]), []).extend(shapes)
    return grouped
