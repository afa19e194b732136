"""Curve image records and the conductor bound checks run on them."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .conductor import ConductorReport, conductor
from .goursat import character_fibered_product, chi4, det_legendre, eps, mod8_kernel
from .residue import DomainError, factorize, gl2_order, parse_matrix, rad, rad_prime
from .subgroups import FiniteSubgroup, full_group, image_mod, preimage_to, subgroups_up_to_conjugacy
from .taxonomy import borel


@dataclass
class CurveRecord:
    label: str
    disc_K: int
    norm_min_disc: int
    image_level: int
    image_generators: tuple
    claimed_index: int | None = None
    strict: bool = False
    meta: dict = field(default_factory=dict)

    def subgroup(self) -> FiniteSubgroup:
        return FiniteSubgroup(self.image_level, self.image_generators, name=self.label)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "disc_K": self.disc_K,
            "norm_min_disc": self.norm_min_disc,
            "image_level": self.image_level,
            "image_generators": [[[a, b], [c, d]] for a, b, c, d in self.image_generators],
        }
        if self.claimed_index is not None:
            out["claimed_index"] = self.claimed_index
        if self.strict:
            out["strict"] = True
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj) -> "CurveRecord":
        if not isinstance(obj, dict):
            raise DomainError("record must be a JSON object")
        missing = [k for k in ("label", "disc_K", "norm_min_disc", "image_level", "image_generators") if k not in obj]
        if missing:
            raise DomainError(f"missing fields: {', '.join(missing)}")
        level = obj["image_level"]
        if not _is_int(level) or level < 1:
            raise DomainError(f"image_level must be a positive integer, got {level!r}")
        if not _is_int(obj["disc_K"]) or obj["disc_K"] == 0:
            raise DomainError(f"disc_K must be a nonzero integer, got {obj['disc_K']!r}")
        if not _is_int(obj["norm_min_disc"]) or obj["norm_min_disc"] < 1:
            raise DomainError(f"norm_min_disc must be a positive integer, got {obj['norm_min_disc']!r}")
        claimed = obj.get("claimed_index")
        if claimed is not None and (not _is_int(claimed) or claimed < 1):
            raise DomainError(f"claimed_index must be a positive integer, got {claimed!r}")
        gens = obj["image_generators"]
        if not isinstance(gens, list):
            raise DomainError("image_generators must be a list of matrices")
        mats = []
        for g in gens:
            try:
                mats.append(parse_matrix(g, level).t)
            except DomainError as exc:
                raise DomainError(f"generator {g!r}: {exc}") from None
        return cls(
            label=str(obj["label"]),
            disc_K=obj["disc_K"],
            norm_min_disc=obj["norm_min_disc"],
            image_level=level,
            image_generators=tuple(mats),
            claimed_index=claimed,
            strict=bool(obj.get("strict", False)),
            meta=dict(obj.get("meta", {})),
        )


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


class RecordBatch(list):
    """Parsed records; ``diagnostics`` holds (line number, message) for rejected lines."""

    def __init__(self, records=(), diagnostics=()):
        super().__init__(records)
        self.diagnostics = list(diagnostics)


def parse_records(stream) -> RecordBatch:
    batch = RecordBatch()
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            batch.append(CurveRecord.from_json(json.loads(line)))
        except json.JSONDecodeError as exc:
            batch.diagnostics.append((lineno, f"invalid JSON: {exc.msg}"))
        except DomainError as exc:
            batch.diagnostics.append((lineno, str(exc)))
    return batch


def adelic_index(H: FiniteSubgroup) -> int:
    return gl2_order(H.level) // H.order


@dataclass
class BoundReport:
    label: str
    conductor: int
    index: int
    rad_term: int
    bound: int
    passed: bool
    equality: bool
    condition_1_8: bool = False
    prop16: bool | None = None
    diagnostics: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "conductor": self.conductor,
            "index": self.index,
            "rad_term": self.rad_term,
            "bound": self.bound,
            "pass": self.passed,
            "equality": self.equality,
            "condition_1_8": self.condition_1_8,
            "prop16": self.prop16,
            "diagnostics": self.diagnostics,
        }


def theorem_bound_check(record: CurveRecord, report: ConductorReport | None = None) -> BoundReport:
    """m <= 2 * index * rad(|disc_K * N(disc_E)|)."""
    H = record.subgroup()
    report = report or conductor(H, strict=record.strict)
    idx = adelic_index(H)
    diags = []
    if record.claimed_index is not None and record.claimed_index != idx:
        diags.append(f"claimed index {record.claimed_index} differs from computed index {idx}")
    rad_term = rad(abs(record.disc_K * record.norm_min_disc))
    bound = 2 * idx * rad_term
    m = report.conductor
    out = BoundReport(record.label, m, idx, rad_term, bound, m <= bound, m == bound, report.condition_1_8, None, diags)
    out.prop16 = prop16_check(record, report)
    return out


def prop16_check(record: CurveRecord, report: ConductorReport) -> bool:
    """rad'(m) (divided by 3 under the mod-9 condition) <= 2 [GL2 : G(rad'(m))] rad(...)."""
    H = record.subgroup()
    rp = rad_prime(report.conductor)
    idx = gl2_order(rp) // image_mod(H, rp).order
    lhs = rp // 3 if report.condition_1_8 else rp
    return lhs <= 2 * idx * rad(abs(record.disc_K * record.norm_min_disc))


def serre_constant(H: FiniteSubgroup) -> int:
    """Product over ell of the first ell^n where the image stops being full."""
    A = 1
    for ell, e in factorize(H.level):
        for n in range(1, e + 1):
            q = ell**n
            if image_mod(H, q) != full_group(q):
                A *= q
                break
    return A


# --------------------------------------------------------------------------
# bundled synthetic corpus


def _record(label, H, disc_K, norm, claimed=None, **meta):
    gens = H.chain.strong_generators() if len(H.generators) > 12 else H.generators
    return CurveRecord(label, disc_K, norm, H.level, tuple(gens), claimed, meta=meta)


def serre_curve_group() -> FiniteSubgroup:
    """Index-2 entanglement of level 148: eps * chi4 on the 2-part against (det / 37)."""
    return character_fibered_product(4, lambda g: eps(g) * chi4(g), 37, det_legendre(37))


def synthetic_records() -> list[CurveRecord]:
    out = [
        _record("full-37", full_group(37), 1, 37, 1),
        _record("serre-148", serre_curve_group(), 1, 37, 2, equality_expected=True, disc_squarefree=True),
        _record("serre-10", character_fibered_product(2, eps, 5, det_legendre(5)), 1, 5, 2),
        _record("ker-chi8", mod8_kernel("ker(chi8)"), 1, 2 * 3, 2),
        _record("borel-5", preimage_to(borel(5), 5), 1, 5 * 11, 6),
        _record("borel-5-at-20", preimage_to(borel(5), 20), -4, 5 * 11, 6),
    ]
    G9 = max(subgroups_up_to_conjugacy(full_group(9), {"surjects_mod": 3, "not_contains": "SL2"}), key=lambda H: H.order)
    out.append(_record("mod9-index27", G9, 1, 3 * 7, 27))
    return out


def bundled_corpus_text() -> str:
    return resources.files("gl2cond.data").joinpath("synthetic_curves.jsonl").read_text()


def bundled_records() -> RecordBatch:
    return parse_records(bundled_corpus_text().splitlines())
