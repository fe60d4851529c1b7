"""Sweep orchestration over donor/recipient grids and the findings report.

Output layout under a sweep directory::

    manifest.json
    cells/<cell-id>/result.json
    cells/<cell-id>/donor_trace.csv
    cells/<cell-id>/recipient_<k>.csv
    findings.txt, findings.json        (written by ``report``)

Each cell is written into a scratch directory and renamed into place, so a
cell directory containing ``result.json`` is always complete.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import shutil
import uuid
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import yaml

from . import __version__
from .falqon import FalqonConfig
from .graph import RNG_NAME, Family
from .transfer import (
    GraphSpec,
    TransferSpec,
    intervals_overlap,
    run_transfer,
    save_transfer,
)

log = logging.getLogger(__name__)

RECIPIENT_N = 14
DENSE_TARGETS = {0.8: 0.95, 0.9: 0.96, 1.0: 0.98}
SPARSE_PS = (0.2, 0.3, 0.4)


def _p_grid(lo: int, hi: int) -> tuple[float, ...]:
    return tuple(round(0.1 * k, 1) for k in range(lo, hi + 1))


@dataclass(frozen=True)
class SweepGrid:
    donor_families: tuple[Family, ...] = (Family.THREE_REGULAR, Family.ERDOS_RENYI)
    donor_sizes: tuple[int, ...] = (8, 10, 12)
    donor_ps: tuple[float, ...] = _p_grid(2, 5)
    recipient_families: tuple[Family, ...] = (Family.ERDOS_RENYI, Family.THREE_REGULAR)
    recipient_ps: tuple[float, ...] = _p_grid(2, 10)
    recipients_count: int = 10
    donor_seeds: tuple[int, ...] = (0,)
    recipient_seed: int = 14
    cfg: FalqonConfig = field(default_factory=FalqonConfig)

    def __post_init__(self):
        conv = {
            "donor_families": lambda v: tuple(Family.parse(x) for x in v),
            "recipient_families": lambda v: tuple(Family.parse(x) for x in v),
            "donor_sizes": lambda v: tuple(int(x) for x in v),
            "donor_ps": lambda v: tuple(float(x) for x in v),
            "recipient_ps": lambda v: tuple(float(x) for x in v),
            "donor_seeds": lambda v: tuple(int(x) for x in v),
        }
        for name, fn in conv.items():
            object.__setattr__(self, name, fn(getattr(self, name)))
        for name in conv:
            vals = getattr(self, name)
            if len(set(vals)) != len(vals):
                raise ValueError(f"{name} contains duplicates")
        for p in self.donor_ps + self.recipient_ps:
            if not 0.0 < p <= 1.0:
                raise ValueError(f"edge probabilities must lie in (0, 1], got {p}")
        for n in self.donor_sizes:
            if not 2 <= n < RECIPIENT_N:
                raise ValueError(f"donor sizes must lie in [2, {RECIPIENT_N}), got {n}")
        if self.recipients_count < 1:
            raise ValueError("recipients_count must be >= 1")
        bad = {Family.CUSTOM} & set(self.donor_families + self.recipient_families)
        if bad:
            raise ValueError("grid families must be 3reg or er")
        if isinstance(self.cfg, Mapping):
            object.__setattr__(self, "cfg", FalqonConfig.from_dict(dict(self.cfg)))

    def to_dict(self) -> dict:
        return {
            "donor_families": [f.value for f in self.donor_families],
            "donor_sizes": list(self.donor_sizes),
            "donor_ps": list(self.donor_ps),
            "recipient_families": [f.value for f in self.recipient_families],
            "recipient_ps": list(self.recipient_ps),
            "recipients_count": self.recipients_count,
            "donor_seeds": list(self.donor_seeds),
            "recipient_seed": self.recipient_seed,
            "cfg": self.cfg.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SweepGrid":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**dict(data))

    def donor_specs(self) -> list[GraphSpec]:
        out = []
        for fam in self.donor_families:
            for n in self.donor_sizes:
                if fam is Family.THREE_REGULAR:
                    if n % 2 == 0 and n >= 4:
                        out.append(GraphSpec(fam, n))
                else:
                    out.extend(GraphSpec(fam, n, p) for p in self.donor_ps)
        return out

    def recipient_specs(self) -> list[GraphSpec]:
        out = []
        for fam in self.recipient_families:
            if fam is Family.THREE_REGULAR:
                out.append(GraphSpec(fam, RECIPIENT_N))
            else:
                out.extend(GraphSpec(fam, RECIPIENT_N, p) for p in self.recipient_ps)
        return out

    def cells(self) -> list["Cell"]:
        return [
            Cell(d, s, r, recipient_seed_base(self.recipient_seed, r))
            for d, s, r in itertools.product(self.donor_specs(), self.donor_seeds, self.recipient_specs())
        ]


def paper_grid(**overrides) -> SweepGrid:
    """The full donor/recipient matrix studied for 14-node recipients."""
    return SweepGrid(**overrides)


def load_grid(path: "str | Path") -> SweepGrid:
    data = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(data, Mapping):
        raise ValueError(f"{path}: sweep config must be a mapping")
    return SweepGrid.from_dict(data)


def recipient_seed_base(grid_seed: int, recipient: GraphSpec) -> int:
    """63-bit base seed for a recipient ensemble, shared by every donor cell.

    Sharing recipients across donors makes donor comparisons paired.
    """
    digest = hashlib.blake2b(f"{grid_seed}|{recipient.label()}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


@dataclass(frozen=True)
class Cell:
    donor: GraphSpec
    donor_seed: int
    recipient: GraphSpec
    recipient_seed_base: int

    @property
    def cell_id(self) -> str:
        return f"d-{self.donor.label()}-s{self.donor_seed}__r-{self.recipient.label()}"

    def transfer_spec(self, grid: SweepGrid) -> TransferSpec:
        return TransferSpec(
            donor=self.donor,
            donor_seed=self.donor_seed,
            recipient=self.recipient,
            recipient_seed_base=self.recipient_seed_base,
            recipients_count=grid.recipients_count,
            cfg=grid.cfg,
        )


@dataclass
class RunManifest:
    grid: dict
    cells: list[dict]
    rng: str = RNG_NAME
    code_version: str = __version__
    started_at: str = ""
    finished_at: str = ""
    executed: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)
    root: Path | None = None

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "rng": self.rng,
            "code_version": self.code_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "executed": self.executed,
            "failed": self.failed,
            "cells": self.cells,
        }

    @classmethod
    def load(cls, path: "str | Path") -> "RunManifest":
        path = Path(path)
        if path.is_dir():
            path = path / "manifest.json"
        d = json.loads(path.read_text())
        return cls(
            grid=d["grid"],
            cells=d["cells"],
            rng=d["rng"],
            code_version=d["code_version"],
            started_at=d["started_at"],
            finished_at=d["finished_at"],
            executed=d.get("executed", []),
            failed=d.get("failed", []),
            root=path.parent,
        )

    def result_path(self, cell: Mapping) -> Path:
        return (self.root or Path(".")) / cell["path"] / "result.json"


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _cell_complete(cell_dir: Path, spec: TransferSpec) -> bool:
    try:
        data = json.loads((cell_dir / "result.json").read_text())
    except (OSError, ValueError):
        return False
    if data.get("spec") != json.loads(json.dumps(spec.to_dict())):
        return False
    names = ["donor_trace.csv"] + [f"recipient_{k}.csv" for k in range(spec.recipients_count)]
    return all((cell_dir / nm).is_file() for nm in names)


def _execute_cell(cell_id: str, spec_dict: dict, cells_dir: str) -> tuple[str, str | None]:
    """Run one cell into a scratch directory, then rename it into place."""
    final = Path(cells_dir) / cell_id
    scratch = Path(cells_dir) / f".{cell_id}.{uuid.uuid4().hex}.tmp"
    try:
        result = run_transfer(TransferSpec.from_dict(spec_dict))
        save_transfer(result, scratch, extra={"cell_id": cell_id})
        if final.exists():
            shutil.rmtree(final)
        os.replace(scratch, final)
        return cell_id, None
    except Exception as exc:  # reported per cell, the sweep carries on
        shutil.rmtree(scratch, ignore_errors=True)
        return cell_id, f"{type(exc).__name__}: {exc}"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_sweep(
    grid: SweepGrid, output_dir: "str | Path", workers: int = 1, force: bool = False
) -> RunManifest:
    """Run every grid cell that lacks a complete result and write ``manifest.json``."""
    out = Path(output_dir)
    cells_dir = out / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    started = _now()

    cells = grid.cells()
    ids = [c.cell_id for c in cells]
    if len(set(ids)) != len(ids):
        raise ValueError("grid produces duplicate cell ids")
    specs = {c.cell_id: c.transfer_spec(grid) for c in cells}
    todo = [cid for cid in ids if force or not _cell_complete(cells_dir / cid, specs[cid])]
    log.info("sweep: %d cells, %d to run", len(ids), len(todo))

    errors: dict[str, str] = {}
    jobs = [(cid, specs[cid].to_dict(), str(cells_dir)) for cid in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_execute_cell, *zip(*jobs)))
    else:
        outcomes = [_execute_cell(*job) for job in jobs]
    for cid, err in outcomes:
        if err is not None:
            errors[cid] = err
            log.warning("cell %s failed: %s", cid, err)

    entries = []
    for c in cells:
        cid = c.cell_id
        entry = {
            "id": cid,
            "donor": c.donor.to_dict(),
            "donor_seed": c.donor_seed,
            "recipient": c.recipient.to_dict(),
            "recipient_seed_base": c.recipient_seed_base,
            "path": f"cells/{cid}",
            "status": "failed" if cid in errors else "ok",
        }
        if cid in errors:
            entry["error"] = errors[cid]
        entries.append(entry)

    manifest = RunManifest(
        grid=grid.to_dict(),
        cells=entries,
        started_at=started,
        finished_at=_now(),
        executed=[cid for cid in todo if cid not in errors],
        failed=sorted(errors),
        root=out,
    )
    _atomic_write(out / "manifest.json", json.dumps(manifest.to_json(), indent=1) + "\n")
    return manifest


# -- findings ----------------------------------------------------------------


class MissingCellsError(RuntimeError):
    def __init__(self, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__("incomplete cells: " + ", ".join(self.missing))


@dataclass
class Findings:
    dense: list[dict]
    sparse: list[dict]
    sparse_narrowing: list[dict]
    resilience: list[dict]

    def to_json(self) -> dict:
        return {
            "dense": self.dense,
            "sparse": self.sparse,
            "sparse_narrowing": self.sparse_narrowing,
            "resilience": self.resilience,
        }

    def to_text(self) -> str:
        return format_findings(self)


def _donor_key(d: Mapping) -> tuple:
    return (d["family"], d["n"], d["p"])


def _label(d: Mapping) -> str:
    return GraphSpec.from_dict(d).label()


def _pooled(results: list[dict]) -> tuple[float, float, int]:
    finals = np.array([r for res in results for r in res["recipient_final_ratios"]])
    std = float(finals.std(ddof=1)) if finals.size > 1 else 0.0
    return float(finals.mean()), std, int(finals.size)


def load_results(manifest: RunManifest) -> list[dict]:
    missing, results = [], []
    for cell in manifest.cells:
        try:
            data = json.loads(manifest.result_path(cell).read_text())
        except (OSError, ValueError):
            missing.append(cell["id"])
            continue
        data["_cell"] = cell
        results.append(data)
    if missing:
        raise MissingCellsError(missing)
    return results


def summarize_findings(manifest: "RunManifest | str | Path") -> Findings:
    """Dense-recipient, sparse cross-family and donor-size tables from per-cell JSON.

    Donor seeds are pooled: per-recipient final ratios of every seed enter one
    mean/std, and donor references are averaged over seeds.
    """
    if not isinstance(manifest, RunManifest):
        manifest = RunManifest.load(manifest)
    results = load_results(manifest)

    groups: dict[tuple, list[dict]] = {}
    for res in results:
        key = (_donor_key(res["spec"]["donor"]), _donor_key(res["spec"]["recipient"]))
        groups.setdefault(key, []).append(res)

    def row(group):
        mean, std, count = _pooled(group)
        donor_ref = float(np.mean([g["donor_final_ratio"] for g in group]))
        return {
            "donor": group[0]["spec"]["donor"],
            "recipient": group[0]["spec"]["recipient"],
            "donor_seeds": sorted(g["spec"]["donor_seed"] for g in group),
            "final_mean": mean,
            "final_std": std,
            "samples": count,
            "donor_ref": donor_ref,
        }

    er = Family.ERDOS_RENYI.value
    reg = Family.THREE_REGULAR.value

    dense = []
    for (dkey, rkey), group in sorted(groups.items(), key=lambda kv: repr(kv[0])):
        if rkey[0] == er and rkey[2] in DENSE_TARGETS:
            r = row(group)
            r["target"] = DENSE_TARGETS[rkey[2]]
            dense.append(r)

    sparse, narrowing = [], []
    donors_3reg = sorted({dk for dk, _ in groups if dk[0] == reg})
    for dkey in donors_3reg:
        gaps = {}
        for p in SPARSE_PS:
            group = groups.get((dkey, (er, RECIPIENT_N, p)))
            if not group:
                continue
            r = row(group)
            r["gap"] = r["donor_ref"] - r["final_mean"]
            r["below_donor"] = r["final_mean"] < r["donor_ref"]
            gaps[p] = r["gap"]
            sparse.append(r)
        if len(gaps) == len(SPARSE_PS):
            g = [gaps[p] for p in SPARSE_PS]
            narrowing.append(
                {
                    "donor": {"family": dkey[0], "n": dkey[1], "p": dkey[2]},
                    "gaps": dict(zip([str(p) for p in SPARSE_PS], g)),
                    "narrowing": bool(g[0] > g[1] > g[2]),
                }
            )

    resilience = []
    families: dict[tuple, dict[int, list[dict]]] = {}
    for (dkey, rkey), group in groups.items():
        families.setdefault((dkey[0], dkey[2], rkey), {})[dkey[1]] = group
    for (fam, p, rkey), by_size in sorted(families.items(), key=lambda kv: repr(kv[0])):
        if len(by_size) < 2:
            continue
        sizes = []
        for n in sorted(by_size):
            mean, std, count = _pooled(by_size[n])
            sizes.append({"n": n, "final_mean": mean, "final_std": std, "samples": count})
        resilience.append(
            {
                "donor": {"family": fam, "p": p},
                "recipient": by_size[min(by_size)][0]["spec"]["recipient"],
                "sizes": sizes,
                "overlap": intervals_overlap(
                    [s["final_mean"] for s in sizes], [s["final_std"] for s in sizes]
                ),
            }
        )
    return Findings(dense, sparse, narrowing, resilience)


def _f(x: float) -> str:
    return format(x, ".12g")


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[c]) for r in rows)) if rows else len(h) for c, h in enumerate(headers)]

    def fmt(cells):
        # two label columns left-aligned, numbers right-aligned
        return "  ".join(x.ljust(w) if c < 2 else x.rjust(w) for c, (x, w) in enumerate(zip(cells, widths)))

    return [fmt(headers)] + [fmt(r) for r in rows]


def format_findings(f: Findings) -> str:
    lines = ["Dense Erdos-Renyi recipients (final ratio, mean +- std over recipients)"]
    lines += _table(
        ["donor", "recipient", "mean", "std", "target", "donor ref"],
        [
            [_label(r["donor"]), _label(r["recipient"]), _f(r["final_mean"]), _f(r["final_std"]),
             f"{r['target']:g}", _f(r["donor_ref"])]
            for r in f.dense
        ],
    )
    lines += ["", "Sparse cross-family transfer (3-regular donors)"]
    lines += _table(
        ["donor", "recipient", "donor ref", "transferred", "gap", "below donor"],
        [
            [_label(r["donor"]), _label(r["recipient"]), _f(r["donor_ref"]), _f(r["final_mean"]),
             _f(r["gap"]), str(r["below_donor"])]
            for r in f.sparse
        ],
    )
    for r in f.sparse_narrowing:
        lines.append(f"  {_label(r['donor'])}: gap(0.2) > gap(0.3) > gap(0.4): {r['narrowing']}")
    lines += ["", "Donor-size resilience (final ratio mean +- std by donor size)"]
    for r in f.resilience:
        fam = r["donor"]["family"] + ("" if r["donor"]["p"] is None else f" p={r['donor']['p']:g}")
        cols = "  ".join(f"n={s['n']}: {_f(s['final_mean'])} +- {_f(s['final_std'])}" for s in r["sizes"])
        lines.append(f"{fam} -> {_label(r['recipient'])}  {cols}  overlap={r['overlap']}")
    return "\n".join(lines) + "\n"


def write_findings(manifest: "RunManifest | str | Path", out_dir: "str | Path | None" = None) -> Findings:
    if not isinstance(manifest, RunManifest):
        manifest = RunManifest.load(manifest)
    findings = summarize_findings(manifest)
    out = Path(out_dir) if out_dir is not None else manifest.root
    _atomic_write(out / "findings.txt", findings.to_text())
    _atomic_write(out / "findings.json", json.dumps(findings.to_json(), indent=1) + "\n")
    return findings
