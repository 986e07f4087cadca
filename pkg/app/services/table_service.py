"""
Worked-example tables

Loads data/golden_tables.json: rank tables at a fixed width (numeric
entries) or valid from some k_min on (entries in k), plus solution counts.
"""

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import json
import logging

import pandas as pd

from app.config import settings
from app.core.catalog import evaluate_int, load_errata, parse
from app.core.exceptions import NotFoundError, UnsupportedError

logger = logging.getLogger(__name__)


def _rows(family: str, shape: Dict[str, int]) -> int:
    if family == "triple":
        return 3 * shape["s"] + 2 * shape["m"] + shape["l"]
    if family == "double":
        return shape["rows1"] + shape["rows2"]
    return shape["n"] + 2 * shape["m"] + shape["l"] + 2


@dataclass(frozen=True)
class GoldenTable:
    id: str
    title: str
    family: str
    shape: Dict[str, int]
    entries: Tuple[str, ...]
    k_min: Optional[int] = None
    errata: Tuple[str, ...] = ()
    aliases: Tuple[str, ...] = ()

    @property
    def symbolic(self) -> bool:
        return "k" not in self.shape

    @property
    def rows(self) -> int:
        return _rows(self.family, self.shape)

    def width(self, k: Optional[int] = None) -> int:
        if not self.symbolic:
            if k is not None and k != self.shape["k"]:
                raise UnsupportedError(f"table {self.id} is fixed at k={self.shape['k']}")
            return self.shape["k"]
        if k is None:
            raise UnsupportedError(f"table {self.id} is symbolic in k; give a width")
        if k < self.k_min:
            raise UnsupportedError(f"table {self.id} holds for k >= {self.k_min}, got k={k}")
        return k

    def values(self, k: Optional[int] = None) -> List[int]:
        """Gamma_0 .. Gamma_min(k, rows) at the given width."""
        width = self.width(k)
        top = min(width, self.rows)
        return [evaluate_int(parse(text), {"k": width}) for text in self.entries[: top + 1]]


@dataclass(frozen=True)
class GoldenCount:
    id: str
    title: str
    family: str
    params: Dict[str, int]
    table: str
    value: str
    q_samples: Tuple[int, ...] = ()
    errata: Tuple[str, ...] = ()

    def expected(self, q: Optional[int] = None) -> int:
        env = dict(self.params)
        if q is not None:
            env["q"] = q
        return evaluate_int(parse(self.value), env)


class TableService:
    """Lookup and rendering of the shipped example tables"""

    def __init__(self, path: Optional[Path] = None):
        self.path = path or settings.golden_path
        with open(self.path, encoding="utf-8") as handle:
            raw = json.load(handle)
        self.tables: Dict[str, GoldenTable] = {}
        for item in raw["tables"]:
            self.tables[item["id"]] = GoldenTable(
                id=item["id"],
                title=item["title"],
                family=item["family"],
                shape=item["shape"],
                entries=tuple(item["entries"]),
                k_min=item.get("k_min"),
                errata=tuple(item.get("errata", ())),
                aliases=tuple(item.get("aliases", ())),
            )
        # alternate ids resolve to the primary table id
        self.aliases: Dict[str, str] = {
            alias: table.id for table in self.tables.values() for alias in table.aliases
        }
        self.counts: Dict[str, GoldenCount] = {
            item["id"]: GoldenCount(
                id=item["id"],
                title=item["title"],
                family=item["family"],
                params=item["params"],
                table=item["table"],
                value=item["value"],
                q_samples=tuple(item.get("q_samples", ())),
                errata=tuple(item.get("errata", ())),
            )
            for item in raw.get("counts", [])
        }
        self.errata = {record["id"]: record for record in load_errata()}
        logger.info(f"Loaded {len(self.tables)} tables and {len(self.counts)} counts from {self.path}")

    def ids(self) -> List[str]:
        return list(self.tables) + list(self.counts)

    def get_table(self, table_id: str) -> GoldenTable:
        try:
            return self.tables[self.aliases.get(table_id, table_id)]
        except KeyError:
            raise NotFoundError("table", table_id, self.ids())

    def get_count(self, count_id: str) -> GoldenCount:
        try:
            return self.counts[count_id]
        except KeyError:
            raise NotFoundError("count", count_id, self.ids())

    def list_tables(self) -> List[Dict]:
        listing = [
            {
                "id": table.id,
                "title": table.title,
                "family": table.family,
                "kind": "symbolic" if table.symbolic else "numeric",
                "shape": table.shape,
                "k_min": table.k_min,
                "aliases": list(table.aliases),
            }
            for table in self.tables.values()
        ]
        listing += [
            {"id": count.id, "title": count.title, "family": count.family, "kind": "count", "shape": count.params}
            for count in self.counts.values()
        ]
        return listing

    def errata_for(self, table: Union[GoldenTable, GoldenCount]) -> List[Dict]:
        return [
            {key: self.errata[name][key] for key in ("id", "status", "citation")}
            for name in table.errata
            if name in self.errata
        ]

    def record(self, table_id: str, k: Optional[int] = None) -> Dict:
        """
        The named table with its expressions and, where a width is known, the
        evaluated counts as decimal strings. Count ids render the count.
        """
        if table_id in self.counts:
            return self._count_record(self.counts[table_id])
        table = self.get_table(table_id)
        values: List[Optional[int]]
        if table.symbolic and k is None:
            entries = list(table.entries)
            values = [None] * len(entries)
            width = None
        else:
            width = table.width(k)
            values = table.values(width)
            entries = list(table.entries[: len(values)])
        return {
            "id": table.id,
            "title": table.title,
            "family": table.family,
            "shape": dict(table.shape, **({"k": width} if width is not None else {})),
            "k_min": table.k_min,
            "entries": [
                {"i": i, "expression": text, "value": None if value is None else str(value)}
                for i, (text, value) in enumerate(zip(entries, values))
            ],
            "errata": self.errata_for(table),
        }

    def _count_record(self, count: GoldenCount) -> Dict:
        samples = count.q_samples or (None,)
        return {
            "id": count.id,
            "title": count.title,
            "family": count.family,
            "params": count.params,
            "table": count.table,
            "expression": count.value,
            "entries": [
                {"q": q if q is not None else count.params.get("q"), "value": str(count.expected(q))}
                for q in samples
            ],
            "errata": self.errata_for(count),
        }

    @staticmethod
    def to_frame(record: Dict) -> pd.DataFrame:
        frame = pd.DataFrame(record["entries"])
        frame.insert(0, "table", record["id"])
        return frame


@lru_cache()
def get_table_service() -> TableService:
    """Get singleton instance of the table service"""
    return TableService()
