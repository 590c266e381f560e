"""Business-model taxonomy, venture models, and the one-hot feature codec.

The taxonomy is data, not code: a YAML document declares layers,
sub-layers, dimensions (with a single/multi cardinality flag) and
characteristics. A venture's model is a selection of characteristics per
dimension; valid models encode to fixed-width binary rows and decode back.

Taxonomy document format::

    version: 1
    name: <taxonomy name>
    feature_width: <declared total characteristic count>
    layers:
      - name: <layer>
        sublayers:
          - name: <sub-layer>
            dimensions:
              - name: <dimension>
                cardinality: single | multi
                characteristics: [<name>, ...]

Venture dataset format (CSV): one column per dimension plus ``venture_id``;
multi-choice cells are ``|``-delimited; optional ``series_a`` and
``survival`` label columns in {0,1}.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

LABEL_COLUMNS = ("series_a", "survival")


class TaxonomyError(ValueError):
    """Malformed taxonomy document; ``path`` names the offending node."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ModelValidationError(ValueError):
    """Raised when an operation requires a valid model; carries the report."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(f.message for f in report.findings))


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Dimension:
    name: str
    characteristics: tuple[str, ...]
    multi: bool
    sublayer: str
    layer: str


@dataclass(frozen=True)
class Taxonomy:
    name: str
    version: int
    dimensions: tuple[Dimension, ...]
    layer_names: tuple[str, ...]
    sublayer_names: tuple[str, ...]

    @property
    def feature_width(self) -> int:
        return sum(len(d.characteristics) for d in self.dimensions)

    def dimension(self, name: str) -> Dimension:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown dimension {name!r}") from None

    @property
    def _by_name(self) -> dict[str, Dimension]:
        return {d.name: d for d in self.dimensions}

    def feature_names(self) -> list[str]:
        """One name per bit: '<dimension>: <characteristic>' in document order."""
        return [
            f"{d.name}: {c}" for d in self.dimensions for c in d.characteristics
        ]

    def bit_index(self) -> dict[tuple[str, str], int]:
        idx = {}
        pos = 0
        for d in self.dimensions:
            for c in d.characteristics:
                idx[(d.name, c)] = pos
                pos += 1
        return idx

    def dimension_slices(self) -> dict[str, slice]:
        out = {}
        pos = 0
        for d in self.dimensions:
            out[d.name] = slice(pos, pos + len(d.characteristics))
            pos += len(d.characteristics)
        return out

    def component_blocks(self) -> dict[str, list[int]]:
        """Bit columns per sub-layer (the clustering components)."""
        out: dict[str, list[int]] = {s: [] for s in self.sublayer_names}
        pos = 0
        for d in self.dimensions:
            for _ in d.characteristics:
                out[d.sublayer].append(pos)
                pos += 1
        return out


@dataclass
class BusinessModel:
    """A venture's selection of characteristics, optionally labeled.

    Only ``choices`` is captured by the one-hot encoding; free text and
    labels ride along for rating rounds and training.
    """

    venture_id: str
    choices: dict[str, set[str]]
    free_text: dict[str, str] | None = None
    label: int | None = None
    survival: int | None = None


@dataclass(frozen=True)
class Finding:
    code: str
    dimension: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings


@dataclass(frozen=True)
class FeatureRow:
    venture_id: str
    bits: np.ndarray  # uint8, fixed width

    def __eq__(self, other):
        return (
            isinstance(other, FeatureRow)
            and self.venture_id == other.venture_id
            and np.array_equal(self.bits, other.bits)
        )


# -- taxonomy loading -------------------------------------------------------


def taxonomy_from_dict(doc: dict) -> Taxonomy:
    if not isinstance(doc, dict) or "layers" not in doc:
        raise TaxonomyError("document must be a mapping with a 'layers' list")
    dims: list[Dimension] = []
    layer_names: list[str] = []
    sublayer_names: list[str] = []
    seen_dims: set[str] = set()
    for layer in doc["layers"]:
        lname = str(layer.get("name", "")).strip()
        if not lname:
            raise TaxonomyError("layer missing name", "layers[]")
        layer_names.append(lname)
        for sub in layer.get("sublayers", []):
            sname = str(sub.get("name", "")).strip()
            path = f"{lname}/{sname}"
            if not sname:
                raise TaxonomyError("sub-layer missing name", lname)
            if sname in sublayer_names:
                raise TaxonomyError("duplicate sub-layer name", path)
            sublayer_names.append(sname)
            for dim in sub.get("dimensions", []):
                dname = str(dim.get("name", "")).strip()
                dpath = f"{path}/{dname}"
                if not dname:
                    raise TaxonomyError("dimension missing name", path)
                if dname in seen_dims:
                    raise TaxonomyError("duplicate dimension name", dpath)
                seen_dims.add(dname)
                card = dim.get("cardinality", "single")
                if card not in ("single", "multi"):
                    raise TaxonomyError(
                        f"cardinality must be 'single' or 'multi', got {card!r}",
                        dpath,
                    )
                chars = [str(c).strip() for c in dim.get("characteristics", [])]
                if len(chars) < 2:
                    raise TaxonomyError(
                        "dimension needs at least 2 characteristics", dpath
                    )
                if len(set(chars)) != len(chars):
                    dup = sorted(c for c in chars if chars.count(c) > 1)[0]
                    raise TaxonomyError(
                        f"characteristic {dup!r} repeated", dpath
                    )
                dims.append(
                    Dimension(
                        name=dname,
                        characteristics=tuple(chars),
                        multi=(card == "multi"),
                        sublayer=sname,
                        layer=lname,
                    )
                )
    if not dims:
        raise TaxonomyError("no dimensions declared")
    tax = Taxonomy(
        name=str(doc.get("name", "unnamed")),
        version=int(doc.get("version", 1)),
        dimensions=tuple(dims),
        layer_names=tuple(layer_names),
        sublayer_names=tuple(sublayer_names),
    )
    declared = doc.get("feature_width")
    if declared is not None and int(declared) != tax.feature_width:
        raise TaxonomyError(
            f"declared feature_width {declared} != actual {tax.feature_width}",
            "feature_width",
        )
    return tax


def parse_taxonomy(text: str) -> Taxonomy:
    return taxonomy_from_dict(yaml.safe_load(text))


def load_taxonomy(path: str | Path) -> Taxonomy:
    return parse_taxonomy(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def bundled_taxonomy() -> Taxonomy:
    """The shipped IoT business-model taxonomy (feature width 108)."""
    text = resources.files("ventureval.data").joinpath("iot_taxonomy.yaml").read_text(
        encoding="utf-8"
    )
    return parse_taxonomy(text)


# -- model validation and codec ---------------------------------------------


def validate_model(taxonomy: Taxonomy, model: BusinessModel) -> ValidationReport:
    findings: list[Finding] = []
    known = {d.name: d for d in taxonomy.dimensions}
    for dname in model.choices:
        if dname not in known:
            findings.append(
                Finding("unknown_dimension", dname, f"unknown dimension {dname!r}")
            )
    for d in taxonomy.dimensions:
        chosen = model.choices.get(d.name)
        if not chosen:
            findings.append(
                Finding("missing_dimension", d.name, f"missing dimension {d.name!r}")
            )
            continue
        for c in chosen:
            if c not in d.characteristics:
                findings.append(
                    Finding(
                        "unknown_characteristic",
                        d.name,
                        f"unknown characteristic {c!r} for dimension {d.name!r}",
                    )
                )
        if not d.multi and len(chosen) != 1:
            findings.append(
                Finding(
                    "cardinality",
                    d.name,
                    f"dimension {d.name!r} is single-choice but has "
                    f"{len(chosen)} selections",
                )
            )
    return ValidationReport(tuple(findings))


def encode_one_hot(taxonomy: Taxonomy, model: BusinessModel) -> FeatureRow:
    report = validate_model(taxonomy, model)
    if not report.ok:
        raise ModelValidationError(report)
    bits = np.zeros(taxonomy.feature_width, dtype=np.uint8)
    idx = taxonomy.bit_index()
    for dname, chosen in model.choices.items():
        for c in chosen:
            bits[idx[(dname, c)]] = 1
    return FeatureRow(venture_id=model.venture_id, bits=bits)


def decode(taxonomy: Taxonomy, row: FeatureRow) -> BusinessModel:
    bits = np.asarray(row.bits)
    if bits.shape != (taxonomy.feature_width,):
        raise DecodeError(
            f"row width {bits.shape} does not match taxonomy width "
            f"{taxonomy.feature_width}"
        )
    choices: dict[str, set[str]] = {}
    pos = 0
    for d in taxonomy.dimensions:
        w = len(d.characteristics)
        chosen = {
            d.characteristics[i] for i in range(w) if bits[pos + i]
        }
        pos += w
        if not d.multi and len(chosen) != 1:
            raise DecodeError(
                f"dimension {d.name!r} is single-choice but row has "
                f"{len(chosen)} bits set"
            )
        if d.multi and not chosen:
            raise DecodeError(f"multi-choice dimension {d.name!r} has no bit set")
        choices[d.name] = chosen
    return BusinessModel(venture_id=row.venture_id, choices=choices)


def encode_dataset(
    taxonomy: Taxonomy, models: list[BusinessModel]
) -> tuple[np.ndarray, list[str]]:
    """Stack one-hot rows; returns (matrix n x width, venture ids)."""
    rows = [encode_one_hot(taxonomy, m) for m in models]
    mat = np.stack([r.bits for r in rows]) if rows else np.zeros((0, taxonomy.feature_width), dtype=np.uint8)
    return mat, [r.venture_id for r in rows]


# -- tabular I/O -------------------------------------------------------------


def _parse_cell(cell: str) -> set[str]:
    return {p.strip() for p in cell.split("|") if p.strip()}


def load_ventures_csv(taxonomy: Taxonomy, path: str | Path) -> list[BusinessModel]:
    return parse_ventures_csv(taxonomy, Path(path).read_text(encoding="utf-8"))


def parse_ventures_csv(taxonomy: Taxonomy, text: str) -> list[BusinessModel]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ValueError("empty ventures CSV")
    known = {d.name for d in taxonomy.dimensions}
    extra = [
        c
        for c in reader.fieldnames
        if c not in known and c != "venture_id" and c not in LABEL_COLUMNS
    ]
    if extra:
        raise ValueError(f"unknown columns in ventures CSV: {extra}")
    if "venture_id" not in reader.fieldnames:
        raise ValueError("ventures CSV needs a venture_id column")
    models = []
    for i, rec in enumerate(reader):
        choices = {
            name: _parse_cell(rec[name])
            for name in known
            if rec.get(name, "").strip()
        }
        label = rec.get("series_a", "").strip()
        survival = rec.get("survival", "").strip()
        models.append(
            BusinessModel(
                venture_id=rec["venture_id"].strip() or f"row{i}",
                choices=choices,
                label=int(label) if label else None,
                survival=int(survival) if survival else None,
            )
        )
    return models


def ventures_to_csv(taxonomy: Taxonomy, models: list[BusinessModel]) -> str:
    names = [d.name for d in taxonomy.dimensions]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    has_label = any(m.label is not None for m in models)
    has_survival = any(m.survival is not None for m in models)
    header = ["venture_id", *names]
    if has_label:
        header.append("series_a")
    if has_survival:
        header.append("survival")
    writer.writerow(header)
    for m in models:
        rec = [m.venture_id]
        for name in names:
            rec.append("|".join(sorted(m.choices.get(name, set()))))
        if has_label:
            rec.append("" if m.label is None else str(m.label))
        if has_survival:
            rec.append("" if m.survival is None else str(m.survival))
        writer.writerow(rec)
    return buf.getvalue()
