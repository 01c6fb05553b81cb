"""Plain-text certificate reports.

A report is a header of ``key = value`` lines followed by named blocks::

    grigid report
    tool_version = 0.1.0
    argv = certify-affine --ifs converse.ifs ...
    input.ifs.sha256 = 3a7b...

    [affine]
    lam = 1
    bound = 0.28156...
    VERDICT affine PASS

Floats are written with 17 significant digits so that ``float(text)``
returns the stored value exactly.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field

from .affine import AffineCertificate
from .cover import CoverCertificate
from .fitting import RATIO_BOX, FitResult, RigidityReport
from .similitude import IFS

VERDICTS = ("PASS", "FAIL", "INFO")
_VERDICT_RE = re.compile(r"^VERDICT (\S+) (PASS|FAIL|INFO)$")
_BLOCK_RE = re.compile(r"^\[(\S+)\]$")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    if isinstance(value, (int, str)):
        return str(value)
    if value is None:
        return "none"
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(fmt(v) for v in value) + "]"
    if hasattr(value, "item"):  # numpy scalar
        return fmt(value.item())
    return str(value)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class Block:
    name: str
    fields: list[tuple[str, str]] = field(default_factory=list)
    verdict: str | None = None

    def add(self, key: str, value) -> "Block":
        self.fields.append((key, fmt(value)))
        return self


@dataclass
class Report:
    version: str
    header: list[tuple[str, str]] = field(default_factory=list)
    blocks: list[Block] = field(default_factory=list)

    def add_header(self, key: str, value) -> None:
        self.header.append((key, fmt(value)))

    def block(self, name: str) -> Block:
        b = Block(name)
        self.blocks.append(b)
        return b

    def verdicts(self) -> list[tuple[str, str]]:
        return [(b.name, b.verdict) for b in self.blocks if b.verdict is not None]

    def exit_code(self) -> int:
        return 1 if any(v == "FAIL" for _, v in self.verdicts()) else 0

    def render(self) -> str:
        lines = ["grigid report", f"tool_version = {self.version}"]
        lines += [f"{k} = {v}" for k, v in self.header]
        for b in self.blocks:
            lines += ["", f"[{b.name}]"]
            lines += [f"{k} = {v}" for k, v in b.fields]
            if b.verdict is not None:
                lines.append(f"VERDICT {b.name} {b.verdict}")
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Inverse of :meth:`Report.render` (values stay strings)."""
    out = {"header": {}, "blocks": {}, "verdicts": []}
    current = out["header"]
    lines = text.splitlines()
    if not lines or lines[0] != "grigid report":
        raise ValueError("not a grigid report")
    for line in lines[1:]:
        if not line.strip():
            continue
        m = _BLOCK_RE.match(line)
        if m:
            current = out["blocks"].setdefault(m.group(1), {})
            continue
        m = _VERDICT_RE.match(line)
        if m:
            out["verdicts"].append((m.group(1), m.group(2)))
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ValueError(f"unreadable report line {line!r}")
        current[key] = value
    return out


def add_ifs(block: Block, ifs: IFS, prefix: str = "map") -> None:
    block.add(f"{prefix}.k", ifs.k)
    for i, m in enumerate(ifs.maps, start=1):
        block.add(f"{prefix}.{i}.ratio", m.ratio)
        block.add(f"{prefix}.{i}.angle", m.angle)
        block.add(f"{prefix}.{i}.translation", list(m.translation))
    block.add("r_min", ifs.r_min)
    block.add("r_max", ifs.r_max)
    block.add("c", ifs.c)


def cover_block(report: Report, cert: CoverCertificate) -> Block:
    b = report.block("cover")
    b.add("grid_n", cert.grid_n)
    b.add("omega_f", cert.omega_f)
    b.add("lipschitz_constant", cert.lipschitz_constant)
    b.add("slack", cert.slack)
    b.add("worst_ratio", cert.worst_ratio)
    b.add("checked_pairs", cert.checked_pairs)
    for i, lv in enumerate(cert.levels, start=1):
        p = f"level.{i}"
        b.add(f"{p}.delta", lv.delta)
        b.add(f"{p}.n0", lv.n0)
        b.add(f"{p}.n_words", lv.n_words)
        b.add(f"{p}.subcover_size", len(lv.lambda_set))
        b.add(f"{p}.total_length", lv.total_length)
        b.add(f"{p}.bound_4delta", lv.bound_4delta)
        b.add(f"{p}.checked_pairs", lv.checked_pairs)
        b.add(f"{p}.worst_ratio", lv.worst_ratio)
        b.add(f"{p}.worst_pair", list(lv.worst_pair))
        b.add(f"{p}.max_chain_excess", lv.max_chain_excess)
        b.add(f"{p}.worst_scaling_defect", lv.worst_scaling_defect)
        b.add(f"{p}.passed", lv.passed)
        if lv.failure:
            b.add(f"{p}.failure", lv.failure)
    if cert.witness:
        b.add("witness.delta", cert.witness["delta"])
        b.add("witness.reason", cert.witness["reason"])
        b.add("witness.pair", list(cert.witness["pair"]))
    b.verdict = cert.verdict
    return b


def affine_block(report: Report, cert: AffineCertificate) -> Block:
    b = report.block("affine")
    b.add("interval", list(cert.interval))
    b.add("lam", cert.lam)
    b.add("L", cert.L)
    b.add("c", cert.c)
    b.add("stages", cert.stages)
    b.add("measured_deviation", cert.measured_deviation)
    b.add("bound", cert.bound)
    b.add("slack", cert.slack)
    b.add("status", cert.verdict)
    b.add("failing_stage", cert.failing_stage)
    for rec in cert.records:
        p = f"stage.{rec.stage}"
        b.add(f"{p}.total_length", rec.total_length)
        b.add(f"{p}.length_bound", rec.length_bound)
        b.add(f"{p}.deviation_bound", rec.deviation_bound)
        b.add(f"{p}.partition_defect", rec.partition_defect)
        b.add(f"{p}.telescoping_defect", rec.telescoping_defect)
        b.add(f"{p}.worst_gap_slope_defect", rec.worst_gap_slope_defect)
        b.add(f"{p}.ok", rec.ok)
    b.verdict = "PASS" if cert.passed else "FAIL"
    return b


def fit_fields(b: Block, fit: FitResult) -> None:
    b.add("fit.k", fit.k)
    b.add("fit.restriction", fit.restriction)
    b.add("fit.restarts", fit.restarts)
    b.add("fit.seed", fit.seed)
    b.add("fit.evaluations", fit.evaluations)
    b.add("fit.budget_exhausted", fit.budget_exhausted)
    b.add("fit.search_points", fit.search_points)
    b.add("fit.ratio_box", list(fit.ratio_box))
    b.add("fit.translation_box", list(fit.translation_box))
    b.add("fit.restart_residuals", fit.restart_residuals)
    b.add("fit.residual", fit.residual)
    add_ifs(b, fit.ifs, prefix="fit.map")


def rigidity_block(report: Report, rep: RigidityReport) -> Block:
    b = report.block("rigidity")
    b.add("graph", rep.graph_id)
    b.add("line", list(rep.line))
    b.add("line_fit_residual", rep.line_fit_residual)
    b.add("tol_affine", rep.tol_affine)
    b.add("classification", rep.verdict)
    if rep.converse_residual is not None:
        b.add("converse_residual", rep.converse_residual)
    if rep.best_fit is not None:
        fit_fields(b, rep.best_fit)
    b.add("ratio_box", list(RATIO_BOX))
    b.add("note", rep.note)
    b.verdict = "INFO"
    return b
