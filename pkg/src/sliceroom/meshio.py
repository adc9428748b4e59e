"""Triangle-mesh file I/O: binary/ASCII STL and a minimal OBJ subset.

Formats are detected from content when not stated.  Units are taken as
millimeters; no conversion is performed.  Loaders either return a valid
mesh or raise :class:`MeshFormatError` carrying the byte or line offset of
the problem — arbitrary input must never crash them.

The OBJ subset is ``v`` lines (3 floats) and ``f`` lines (3+ indices,
1-based, fan-triangulated, ``/``-suffixes ignored); everything else is
skipped.  STL loads deduplicate vertices by exact bit equality, in first-
occurrence order, so topology is deterministic across platforms.  Neither
format can encode face tags: inner-tagged triangles are written purely as
reversed-winding geometry and come back tagged outer.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import DEGENERATE_AREA_FACTOR, TriangleMesh
from . import kernels

STL_HEADER_BYTES = 80
STL_FACET_BYTES = 50
_STL_RECORD = np.dtype([("normal", "<f4", 3), ("verts", "<f4", (3, 3)), ("attr", "<u2")])


class MeshFormat(str, Enum):
    STL_BINARY = "stl_binary"
    STL_ASCII = "stl_ascii"
    OBJ = "obj"


class MeshFormatError(ValueError):
    """Structured load/save failure; `line` or `offset` locates it when known."""

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif offset is not None:
            where = f" (byte offset {offset})"
        super().__init__(message + where)
        self.line = line
        self.offset = offset


@dataclass(frozen=True)
class BoundingBox:
    min: tuple[float, float, float]
    max: tuple[float, float, float]

    @property
    def diagonal_sq(self) -> float:
        dx = self.max[0] - self.min[0]
        dy = self.max[1] - self.min[1]
        dz = self.max[2] - self.min[2]
        return dx * dx + dy * dy + dz * dz


def bounding_box(mesh: TriangleMesh) -> BoundingBox:
    if mesh.n_vertices == 0:
        raise MeshFormatError("bounding box undefined for an empty mesh")
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    return BoundingBox(tuple(float(v) for v in lo), tuple(float(v) for v in hi))


def triangle_normals(mesh: TriangleMesh) -> tuple[np.ndarray, np.ndarray]:
    """Per-triangle unit normals from winding order, right-hand rule.

    Returns (normals, degenerate): degenerate triangles (area below
    DEGENERATE_AREA_FACTOR of the squared bounding-box diagonal) get a zero
    vector and a True flag instead of an error.
    """
    if mesh.n_triangles == 0:
        return np.zeros((0, 3)), np.zeros(0, dtype=bool)
    cross = kernels.triangle_cross_products(mesh.vertices, mesh.triangles)
    # scale rows before squaring so extreme coordinates cannot overflow
    peak = np.max(np.abs(cross), axis=1, keepdims=True)
    safe = np.where(peak > 0.0, peak, 1.0)
    scaled = cross / safe
    cross_norm = np.sqrt(np.sum(scaled * scaled, axis=1)) * safe[:, 0]
    area = 0.5 * cross_norm
    threshold = DEGENERATE_AREA_FACTOR * bounding_box(mesh).diagonal_sq
    degenerate = area <= threshold
    normals = np.zeros_like(cross)
    ok = ~degenerate
    normals[ok] = cross[ok] / cross_norm[ok, None]
    return normals, degenerate


# ---------------------------------------------------------------------------
# detection

def detect_format(data: bytes) -> MeshFormat:
    if not data:
        raise MeshFormatError("empty input", offset=0)
    if data.startswith(b"solid "):
        try:
            _load_stl_ascii(data)
            return MeshFormat.STL_ASCII
        except MeshFormatError:
            pass  # binary files may start with "solid " too
    if len(data) >= STL_HEADER_BYTES + 4:
        (count,) = struct.unpack_from("<I", data, STL_HEADER_BYTES)
        if len(data) == STL_HEADER_BYTES + 4 + count * STL_FACET_BYTES:
            return MeshFormat.STL_BINARY
    if _looks_like_obj(data):
        return MeshFormat.OBJ
    raise MeshFormatError("unrecognized mesh format", offset=0)


def _looks_like_obj(data: bytes) -> bool:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return False
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("v ") or line.startswith("f "):
            return True
    return False


# ---------------------------------------------------------------------------
# loading

def load_mesh(data: bytes, fmt: MeshFormat | None = None) -> TriangleMesh:
    """Parse mesh bytes; all triangles come back tagged outer."""
    if not data:
        raise MeshFormatError("empty input", offset=0)
    if fmt is None:
        fmt = detect_format(data)
    fmt = MeshFormat(fmt)
    if fmt is MeshFormat.STL_BINARY:
        return _load_stl_binary(data)
    if fmt is MeshFormat.STL_ASCII:
        return _load_stl_ascii(data)
    return _load_obj(data)


def _check_finite(arr: np.ndarray, what: str, *, line: int | None = None,
                  offset: int | None = None) -> None:
    if arr.size and not np.isfinite(arr).all():
        raise MeshFormatError(f"non-finite {what}", line=line, offset=offset)


def _dedup_rows(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact bit-equality dedup; unique rows keep first-occurrence order.

    Returns (unique_rows, inverse) with raw[i] == unique_rows[inverse[i]].
    """
    if len(raw) == 0:
        return raw, np.zeros(0, dtype=np.int64)
    rows = np.ascontiguousarray(raw)
    as_void = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()
    _, first_idx, inverse = np.unique(as_void, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rows[first_idx[order]], rank[inverse]


def _load_stl_binary(data: bytes) -> TriangleMesh:
    if len(data) < STL_HEADER_BYTES + 4:
        raise MeshFormatError("binary STL shorter than header + facet count",
                              offset=len(data))
    (count,) = struct.unpack_from("<I", data, STL_HEADER_BYTES)
    expected = STL_HEADER_BYTES + 4 + count * STL_FACET_BYTES
    if len(data) != expected:
        raise MeshFormatError(
            f"binary STL length {len(data)} does not match facet count {count} "
            f"(expected {expected})", offset=STL_HEADER_BYTES)
    records = np.frombuffer(data, dtype=_STL_RECORD, count=count, offset=STL_HEADER_BYTES + 4)
    corners = records["verts"].reshape(-1, 3)  # float32, 3 per facet
    _check_finite(corners, "vertex coordinates", offset=STL_HEADER_BYTES + 4)
    unique, inverse = _dedup_rows(corners)
    return TriangleMesh(unique.astype(np.float64), inverse.reshape(-1, 3))


def _load_stl_ascii(data: bytes) -> TriangleMesh:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MeshFormatError(f"ASCII STL is not valid UTF-8: {exc.reason}",
                              offset=exc.start) from None
    corners: list[tuple[float, float, float]] = []
    facet_corners = 0
    in_solid = False
    closed = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        key = tokens[0].lower()
        if key == "solid":
            if in_solid:
                raise MeshFormatError("nested 'solid'", line=lineno)
            in_solid = True
        elif not in_solid:
            raise MeshFormatError(f"'{key}' before 'solid'", line=lineno)
        elif key == "facet":
            facet_corners = 0
        elif key == "vertex":
            if len(tokens) != 4:
                raise MeshFormatError("vertex needs three coordinates", line=lineno)
            try:
                xyz = (float(tokens[1]), float(tokens[2]), float(tokens[3]))
            except ValueError:
                raise MeshFormatError("bad vertex coordinate", line=lineno) from None
            corners.append(xyz)
            facet_corners += 1
            if facet_corners > 3:
                raise MeshFormatError("facet with more than three vertices", line=lineno)
        elif key == "endfacet":
            if facet_corners != 3:
                raise MeshFormatError(
                    f"facet closed with {facet_corners} vertices", line=lineno)
            facet_corners = 0
        elif key == "endsolid":
            closed = True
            break
        elif key in ("outer", "endloop"):
            pass
        else:
            raise MeshFormatError(f"unexpected token {tokens[0]!r}", line=lineno)
    if not in_solid:
        raise MeshFormatError("no 'solid' header", line=1)
    if not closed:
        raise MeshFormatError("missing 'endsolid'", line=len(text.splitlines()))
    if len(corners) % 3 != 0:
        raise MeshFormatError("dangling facet vertices at end of file",
                              line=len(text.splitlines()))
    raw_corners = np.array(corners, dtype=np.float64).reshape(-1, 3)
    _check_finite(raw_corners, "vertex coordinates")
    unique, inverse = _dedup_rows(raw_corners)
    return TriangleMesh(unique, inverse.reshape(-1, 3))


def _load_obj(data: bytes) -> TriangleMesh:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MeshFormatError(f"OBJ is not valid UTF-8: {exc.reason}",
                              offset=exc.start) from None
    vertices: list[tuple[float, float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "v":
            if len(tokens) != 4:
                raise MeshFormatError("'v' needs exactly three coordinates", line=lineno)
            try:
                xyz = (float(tokens[1]), float(tokens[2]), float(tokens[3]))
            except ValueError:
                raise MeshFormatError("bad vertex coordinate", line=lineno) from None
            if not all(np.isfinite(xyz)):
                raise MeshFormatError("non-finite vertex coordinate", line=lineno)
            vertices.append(xyz)
        elif tokens[0] == "f":
            if len(tokens) < 4:
                raise MeshFormatError("'f' needs at least three indices", line=lineno)
            idx = []
            for token in tokens[1:]:
                head = token.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError:
                    raise MeshFormatError(f"bad face index {token!r}", line=lineno) from None
                if i < 1 or i > len(vertices):
                    raise MeshFormatError(
                        f"face index {i} out of range (have {len(vertices)} vertices)",
                        line=lineno)
                idx.append(i - 1)
            for k in range(1, len(idx) - 1):  # fan triangulation
                triangles.append((idx[0], idx[k], idx[k + 1]))
        # other directives (vn, vt, o, g, usemtl, ...) are ignored
    if not vertices and not triangles:
        raise MeshFormatError("no geometry found", line=1)
    return TriangleMesh.from_lists(vertices, triangles)


# ---------------------------------------------------------------------------
# saving

def save_mesh(mesh: TriangleMesh, fmt: MeshFormat) -> bytes:
    if mesh.n_triangles == 0:
        raise MeshFormatError("refusing to save an empty mesh")
    fmt = MeshFormat(fmt)
    if fmt is MeshFormat.STL_BINARY:
        return _save_stl_binary(mesh)
    if fmt is MeshFormat.STL_ASCII:
        return _save_stl_ascii(mesh)
    return _save_obj(mesh)


def _save_stl_binary(mesh: TriangleMesh) -> bytes:
    normals, _ = triangle_normals(mesh)
    records = np.zeros(mesh.n_triangles, dtype=_STL_RECORD)
    records["normal"] = normals.astype(np.float32)
    records["verts"] = mesh.vertices[mesh.triangles].astype(np.float32)
    header = b"sliceroom binary STL".ljust(STL_HEADER_BYTES, b"\0")
    return header + struct.pack("<I", mesh.n_triangles) + records.tobytes()


def _triple(row) -> str:
    # repr of Python floats: shortest string that round-trips exactly
    return f"{float(row[0])!r} {float(row[1])!r} {float(row[2])!r}"


def _save_stl_ascii(mesh: TriangleMesh) -> bytes:
    normals, _ = triangle_normals(mesh)
    lines = ["solid sliceroom"]
    for t in range(mesh.n_triangles):
        lines.append(f"facet normal {_triple(normals[t])}")
        lines.append("outer loop")
        for corner in mesh.triangles[t]:
            lines.append(f"vertex {_triple(mesh.vertices[corner])}")
        lines.append("endloop")
        lines.append("endfacet")
    lines.append("endsolid sliceroom")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _save_obj(mesh: TriangleMesh) -> bytes:
    lines = [f"v {_triple(v)}" for v in mesh.vertices]
    for t in mesh.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    return ("\n".join(lines) + "\n").encode("utf-8")
