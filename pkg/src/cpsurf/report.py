"""Report emission: fixed-format CSV/JSON/OBJ plus rendered figures.

Every floating-point number is written as 17-significant-digit scientific
notation, which makes parse-evaluate-reemit a fixed point and the text
outputs byte-reproducible.  Figures are PNG renderings of the same data
written next to the delimited files; they carry no precision guarantees.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def fmt_float(x):
    """17-significant-digit scientific formatting (round-trip exact)."""
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    return format(float(x), ".16e")


def dumps_fixed(obj, indent=0):
    """JSON text with all floats in the fixed scientific format."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {_json_str(k)}: {dumps_fixed(v, indent + 2)}'
            for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        inner = ", ".join(dumps_fixed(v, indent) for v in obj)
        return "[" + inner + "]"
    if isinstance(obj, bool) or obj is None:
        return "true" if obj is True else ("false" if obj is False else "null")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if np.isnan(obj):
            return "null"
        return fmt_float(obj)
    if isinstance(obj, str):
        return _json_str(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _json_str(s):
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def write_json(path, obj):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(dumps_fixed(obj))
        fh.write("\n")


def write_csv(path, header, rows):
    """RFC-4180 CSV: comma-separated, CRLF line endings.

    Cells may be floats (fixed-formatted), strings, or None (empty cell).
    """
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, str):
            if any(c in v for c in ',"\r\n'):
                return '"' + v.replace('"', '""') + '"'
            return v
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return fmt_float(v)

    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(cell(h) for h in header) + "\r\n")
        for row in rows:
            fh.write(",".join(cell(v) for v in row) + "\r\n")


def write_obj(path, vertices, faces):
    """Wavefront OBJ with v/f lines only; face indices are 0-based here."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        for v in vertices:
            fh.write("v " + " ".join(fmt_float(c) for c in v) + "\n")
        for face in faces:
            fh.write("f " + " ".join(str(i + 1) for i in face) + "\n")


def complex_matrix_json(m):
    m = np.asarray(m)
    return {"re": [[float(v) for v in row] for row in m.real],
            "im": [[float(v) for v in row] for row in m.imag]}


def real_matrix_json(m):
    return [[float(v) for v in row] for row in np.asarray(m)]


def grid_faces(n_l, n_r):
    """Quad faces over an n_l x n_r vertex grid (row-major indexing)."""
    faces = []
    for i in range(n_l - 1):
        for j in range(n_r - 1):
            a = i * n_r + j
            faces.append((a, a + n_r, a + n_r + 1, a + 1))
    return faces


# -- figures -----------------------------------------------------------------

def _save(fig, path):
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def _heatmap(ax, xi_l, xi_r, values, title):
    masked = np.ma.masked_invalid(np.asarray(values, dtype=float))
    pc = ax.pcolormesh(xi_l, xi_r, masked.T, shading="nearest")
    ax.set_xlabel(r"$\xi_L$")
    ax.set_ylabel(r"$\xi_R$")
    ax.set_title(title)
    return pc


def geometry_figure(path, xi_l, xi_r, k, det_g, abs_h):
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.4))
    for ax, data, title in zip(
            axes, (k, det_g, abs_h),
            ("Gaussian curvature K", "det G", "|H|")):
        pc = _heatmap(ax, xi_l, xi_r, data, title)
        fig.colorbar(pc, ax=ax)
    fig.tight_layout()
    _save(fig, path)


def check_figure(path, xi_l, xi_r, el, cons, closed):
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.4))
    for ax, data, title in zip(
            axes, (el, cons, closed),
            ("EL residual", "conservation residual", "closedness residual")):
        with np.errstate(divide="ignore"):
            logdata = np.log10(np.maximum(np.asarray(data, float), 1e-300))
        pc = _heatmap(ax, xi_l, xi_r, logdata, title + " (log10)")
        fig.colorbar(pc, ax=ax)
    fig.tight_layout()
    _save(fig, path)


def mesh_figure(path, coords, title="immersed surface"):
    """3D rendering of an (n_l, n_r, 3) coordinate grid."""
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(111, projection="3d")
    x, y, z = coords[..., 0], coords[..., 1], coords[..., 2]
    ax.plot_surface(x, y, z, rstride=1, cstride=1, cmap="viridis",
                    linewidth=0.1, antialiased=True)
    ax.set_title(title)
    _save(fig, path)


def willmore_figure(path, refinements):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    panels = [r[0] for r in refinements]
    values = [r[2] for r in refinements]
    ax.plot(panels, values, "o-")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("panels per axis")
    ax.set_ylabel("Willmore value")
    ax.set_title("quadrature refinement")
    fig.tight_layout()
    _save(fig, path)
