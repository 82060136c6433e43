"""
Report service - builds the documents the CLI prints.
Library callers get the same bytes through these functions as through the
command line.
"""
import csv
import io
import json
from typing import Any, Dict, Iterable, List, Optional

from pwrot.bounds import bound, rational_bound
from pwrot.core_map import PiecewiseRotation, classify, triple_norm
from pwrot.diophantine import Convergents, cf_expand
from pwrot.dynamics import OrbitTrace, PeriodicOrbit, island_search, orbit
from pwrot.models.angle import RationalSpec
from pwrot.models.reports import SCHEMA, BoundReport, CertificateReport, IslandRecord
from pwrot.rational_structure import attract_certificate, escape_certificate, zone_map
from pwrot.utils.logger import get_logger

logger = get_logger(__name__)


def dumps(document: Dict[str, Any]) -> str:
    """Fixed JSON layout for every report: two-space indent, insertion order, trailing newline."""
    return json.dumps(document, indent=2) + "\n"


def _csv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    writer.writerows(rows)
    return buffer.getvalue()


def classification_document(T: PiecewiseRotation, tolerance: Optional[float] = None) -> Dict[str, Any]:
    cls = classify(T, tolerance)
    return {
        "schema": SCHEMA,
        "classification": cls.kind,
        "delta": cls.delta,
        "norm": triple_norm(T),
        "tolerance_used": cls.tolerance_used,
        "strip_width": cls.strip_width,
    }


def convergents_csv(conv: Convergents) -> str:
    """Two-column table p,q; one row per convergent."""
    return _csv(("p", "q"), zip(conv.p, conv.q))


def bound_report(T: PiecewiseRotation, depth: int, shift: bool = True) -> BoundReport:
    conv = None
    if not isinstance(T.spec, RationalSpec):
        conv = cf_expand(T.spec, depth)
    return bound(T, conv, shift=shift)


def orbit_csv(trace: OrbitTrace) -> str:
    """Rows k,re,im,code with full float precision."""
    rows = ((k, repr(z.real), repr(z.imag), code)
            for k, (z, code) in enumerate(zip(trace.points, trace.coding)))
    return _csv(("k", "re", "im", "code"), rows)


def orbit_report(T: PiecewiseRotation, z: complex, steps: int) -> str:
    return orbit_csv(orbit(T, z, steps))


def island_records(orbits: List[PeriodicOrbit]) -> List[IslandRecord]:
    return [
        IslandRecord(word=o.word, period=o.period, z=(o.z_u.real, o.z_u.imag), weight=o.weight)
        for o in orbits
    ]


def islands_document(
    T: PiecewiseRotation,
    max_period: int,
    region,
    grid_step: float,
    exhaustive: bool = False,
    threads: Optional[int] = None,
) -> Dict[str, Any]:
    orbits = island_search(T, max_period, region, grid_step, exhaustive=exhaustive, threads=threads)
    return {"schema": SCHEMA, "islands": [record.to_dict() for record in island_records(orbits)]}


def certificate_report(
    T: PiecewiseRotation,
    mode: str,
    samples: Optional[int] = None,
    horizon: Optional[int] = None,
    threads: Optional[int] = None,
) -> CertificateReport:
    """
    Run a certificate at the rational bound of T.

    Raises CertificateFailedError carrying the report when any sample fails.
    """
    if mode not in ("escape", "attract"):
        raise ValueError(f"certificate mode must be 'escape' or 'attract', got {mode!r}")
    M = rational_bound(T).M
    zm = zone_map(T)
    logger.info("Certificate %s: q=%s M=%.6g", mode, zm.q, M)
    if mode == "escape":
        return escape_certificate(zm, M, n_samples=samples, horizon=horizon, threads=threads)
    return attract_certificate(zm, M, n_samples=samples, horizon=horizon, threads=threads)
