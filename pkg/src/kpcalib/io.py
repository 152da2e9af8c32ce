"""File formats: numeric CSV, PGM image sequences, JSON model files.

Layout convention: on disk a CSV row is one sample (the everyday
convention); in memory a column is one sample. Loaders transpose
accordingly and writers transpose back.

Floats are always written through ``repr``, the shortest decimal string
that parses back to the identical 64-bit value, so save -> load round-trips
are bit-exact.
"""

import glob
import json
import os

import numpy as np

from .exceptions import (
    BadMagicNumberError,
    CorruptFieldError,
    DataFormatError,
    EmptyFileError,
    MixedDimensionsError,
    NonNumericCellError,
    RaggedRowsError,
    SchemaVersionMismatchError,
)
from .kernels import CenteringAggregates, Kernel
from .kpca import KernelPCA
from .pca import PCA

MODEL_FORMAT_VERSION = 1


def load_csv(path):
    """Read a numeric CSV into a column-per-sample matrix.

    Disk rows are samples. Blank lines and ``#`` comment lines are skipped;
    a single leading header row is detected by any of its cells not parsing
    as a number.
    """
    rows = []
    header_skipped = False
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = [cell.strip() for cell in line.split(",")]
            values = []
            for col, cell in enumerate(cells, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    if not rows and not header_skipped:
                        header_skipped = True
                        values = None
                        break
                    raise NonNumericCellError(
                        f"{path}: row {lineno}, column {col}: {cell!r} is not a number"
                    ) from None
            if values is None:
                continue
            if rows and len(values) != len(rows[0]):
                raise RaggedRowsError(
                    f"{path}: row {lineno} has {len(values)} cells, expected {len(rows[0])}"
                )
            rows.append(values)
    if not rows:
        raise EmptyFileError(f"{path}: no data rows")
    return np.array(rows, dtype=float).T


def save_csv(path, samples, comment=None):
    """Write a column-per-sample matrix as row-per-sample CSV."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    with open(path, "w", encoding="utf-8") as handle:
        if comment:
            handle.write(f"# {comment}\n")
        for column in arr.T:
            handle.write(",".join(repr(float(v)) for v in column) + "\n")


def _read_pgm(path):
    """Parse one P2/P5 PGM file into (values scaled to [0, 1], (width, height))."""
    with open(path, "rb") as handle:
        data = handle.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise BadMagicNumberError(f"{path}: not a PGM file (magic {magic!r})")

    # header tokens after the magic: width, height, maxval ('#' starts a comment)
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataFormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    try:
        width, height, maxval = (int(token) for token in tokens)
    except ValueError:
        raise DataFormatError(f"{path}: malformed PGM header {tokens!r}") from None
    if width < 1 or height < 1:
        raise DataFormatError(f"{path}: bad image size {width}x{height}")
    if not 0 < maxval <= 65535:
        raise DataFormatError(f"{path}: maxval {maxval} outside (0, 65535]")

    count = width * height
    if magic == b"P2":
        # comments inside an ASCII raster are legal but rare; drop them per line
        lines = [line.split(b"#")[0] for line in data[pos:].splitlines()]
        flat = b" ".join(lines).split()
        try:
            values = np.array([int(token) for token in flat], dtype=float)
        except ValueError:
            raise DataFormatError(f"{path}: non-integer value in ASCII raster") from None
    else:
        pos += 1  # exactly one whitespace byte separates maxval from the raster
        bytes_per = 2 if maxval > 255 else 1
        raster = data[pos : pos + count * bytes_per]
        if len(raster) < count * bytes_per:
            raise DataFormatError(f"{path}: raster shorter than {width}x{height}")
        dtype = ">u2" if bytes_per == 2 else "u1"
        values = np.frombuffer(raster, dtype=dtype).astype(float)
    if values.size != count:
        raise DataFormatError(
            f"{path}: raster holds {values.size} values, expected {count}"
        )
    if np.any(values > maxval):
        raise DataFormatError(f"{path}: pixel value exceeds maxval {maxval}")
    return values / maxval, (width, height)


def load_pgm_sequence(source):
    """Flatten same-size PGM images into columns, one image per column.

    ``source`` is a directory (all ``*.pgm`` inside) or a glob pattern;
    files load in lexicographic order. Each image is flattened row-major
    and scaled to [0, 1] by its maxval.
    """
    if os.path.isdir(source):
        paths = sorted(glob.glob(os.path.join(source, "*.pgm")))
    else:
        paths = sorted(glob.glob(source))
    if not paths:
        raise EmptyFileError(f"{source}: no PGM files found")
    columns = []
    shape = None
    for path in paths:
        values, dims = _read_pgm(path)
        if shape is None:
            shape = dims
        elif dims != shape:
            raise MixedDimensionsError(
                f"{path}: image is {dims[0]}x{dims[1]}, expected {shape[0]}x{shape[1]}"
            )
        columns.append(values)
    return np.stack(columns, axis=1)


def _matrix_rows(arr):
    return [[float(v) for v in row] for row in np.asarray(arr, dtype=float)]


def save_model(path, model):
    """Serialize a fitted PCA or KernelPCA estimator to a JSON model file.

    See the README for the schema. All floats are written in shortest
    round-trip form, so ``load_model(save_model(m))`` reproduces every
    numeric field bit for bit.
    """
    if isinstance(model, KernelPCA):
        document = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "kpca",
            "kernel": {
                "family": model.kernel_.family,
                "beta": model.kernel_.beta,
                "degree": int(model.kernel_.degree),
                "offset": float(model.kernel_.offset),
            },
            "centered": model.aggregates_ is not None,
            "normalization": model.normalization,
            "k": int(model.k_),
            "eigenvalues": [float(v) for v in model.eigenvalues_],
            "eigenvectors": _matrix_rows(model.eigenvectors_),
            "col_means": None
            if model.aggregates_ is None
            else [float(v) for v in model.aggregates_.col_means],
            "total_mean": None
            if model.aggregates_ is None
            else float(model.aggregates_.total_mean),
            "training": _matrix_rows(model.training_.T),
        }
    elif isinstance(model, PCA):
        document = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "pca",
            "centered": bool(model.center),
            "k": int(model.k_),
            "eigenvalues": [float(v) for v in model.eigenvalues_],
            "mean": [float(v) for v in model.mean_],
            "components": _matrix_rows(model.components_),
            "data_path": None,
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=1)
        handle.write("\n")


def _field(document, key, path):
    if key not in document:
        raise CorruptFieldError(f"{path}: missing field {key!r}")
    return document[key]


def _float_vector(document, key, path):
    value = _field(document, key, path)
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise CorruptFieldError(f"{path}: field {key!r} is not a numeric list") from None
    if arr.ndim != 1:
        raise CorruptFieldError(f"{path}: field {key!r} is not a flat list")
    return arr


def _float_matrix(document, key, path):
    value = _field(document, key, path)
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise CorruptFieldError(f"{path}: field {key!r} is not a numeric table") from None
    if arr.ndim != 2:
        raise CorruptFieldError(f"{path}: field {key!r} is not rectangular")
    return arr


def load_model(path):
    """Load a model file back into a fitted PCA or KernelPCA estimator.

    Raises ``SchemaVersionMismatchError`` for unknown format versions and
    ``CorruptFieldError`` for missing or malformed fields.
    """
    with open(path, "r", encoding="utf-8") as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(document, dict):
        raise DataFormatError(f"{path}: model file must hold a JSON object")
    version = _field(document, "format_version", path)
    if version != MODEL_FORMAT_VERSION:
        raise SchemaVersionMismatchError(
            f"{path}: format version {version!r}, this build reads {MODEL_FORMAT_VERSION}"
        )
    kind = _field(document, "kind", path)
    if kind == "kpca":
        return _load_kpca(document, path)
    if kind == "pca":
        return _load_pca(document, path)
    raise CorruptFieldError(f"{path}: unknown model kind {kind!r}")


def _load_kpca(document, path):
    kernel_doc = _field(document, "kernel", path)
    if not isinstance(kernel_doc, dict):
        raise CorruptFieldError(f"{path}: field 'kernel' is not an object")
    try:
        kernel = Kernel(
            family=_field(kernel_doc, "family", path),
            beta=kernel_doc.get("beta"),
            degree=_field(kernel_doc, "degree", path),
            offset=_field(kernel_doc, "offset", path),
        )
    except (TypeError, ValueError) as exc:
        raise CorruptFieldError(f"{path}: bad kernel spec ({exc})") from None
    centered = bool(_field(document, "centered", path))
    normalization = _field(document, "normalization", path)
    if normalization not in ("unit", "feature"):
        raise CorruptFieldError(f"{path}: unknown normalization {normalization!r}")
    k = _field(document, "k", path)
    if not isinstance(k, int) or k < 1:
        raise CorruptFieldError(f"{path}: field 'k' must be a positive integer")
    eigenvalues = _float_vector(document, "eigenvalues", path)
    eigenvectors = _float_matrix(document, "eigenvectors", path)
    training_rows = _float_matrix(document, "training", path)
    n = training_rows.shape[0]
    if eigenvalues.shape[0] != n or eigenvectors.shape != (n, k):
        raise CorruptFieldError(f"{path}: spectrum, basis and training sizes disagree")

    model = KernelPCA(
        kernel=kernel.family,
        beta=kernel.beta,
        degree=kernel.degree,
        offset=kernel.offset,
        k=k,
        center=centered,
        normalization=normalization,
    )
    # match the memory layout the fit path produces; a transposed view would
    # change BLAS summation order and break bitwise reproducibility
    model.training_ = np.ascontiguousarray(training_rows.T)
    model.kernel_ = kernel
    model.eigenvalues_ = eigenvalues
    model.eigenvectors_ = np.ascontiguousarray(eigenvectors)
    model.k_ = k
    if centered:
        col_means = _float_vector(document, "col_means", path)
        if col_means.shape[0] != n:
            raise CorruptFieldError(f"{path}: 'col_means' length disagrees with training")
        total_mean = _field(document, "total_mean", path)
        if not isinstance(total_mean, (int, float)):
            raise CorruptFieldError(f"{path}: 'total_mean' must be a number")
        model.aggregates_ = CenteringAggregates(
            col_means=col_means, total_mean=float(total_mean)
        )
    else:
        model.aggregates_ = None
    # the reduced training images are not persisted: they are a cheap
    # deterministic product of the stored pieces
    from .kernels import center_gram, gram_matrix

    gram = gram_matrix(kernel, model.training_, check_psd=False)
    gram_work = center_gram(gram)[0] if centered else gram
    model.Z_train_ = model.eigenvectors_.T @ gram_work
    model.n_features_in_ = model.training_.shape[0]
    model._linear_gram_cache = None
    return model


def _load_pca(document, path):
    centered = bool(_field(document, "centered", path))
    k = _field(document, "k", path)
    if not isinstance(k, int) or k < 1:
        raise CorruptFieldError(f"{path}: field 'k' must be a positive integer")
    eigenvalues = _float_vector(document, "eigenvalues", path)
    mean = _float_vector(document, "mean", path)
    components = _float_matrix(document, "components", path)
    if components.shape[0] != k or components.shape[1] != mean.shape[0]:
        raise CorruptFieldError(f"{path}: mean, components and k sizes disagree")
    model = PCA(k=k, center=centered)
    model.mean_ = mean
    model.components_ = components
    model.eigenvalues_ = eigenvalues
    model.k_ = k
    model.total_variance_ = float(np.sum(eigenvalues))
    model.sample_basis_ = None
    model.n_features_in_ = mean.shape[0]
    return model
