"""Line-delimited trace records.

Each line is ``{"t", "seq", "pid", "kind", "detail"}`` in that order, so two
runs can be compared with a plain diff.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Iterable, Iterator, NamedTuple, Optional

from .sim import Time, as_time, fmt_time


class Record(NamedTuple):
    t: Time
    seq: int
    pid: Optional[int]
    kind: str
    detail: dict


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return fmt_time(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


class Trace:
    def __init__(self, records: Optional[list[Record]] = None):
        self.records: list[Record] = records if records is not None else []
        self._listeners = []

    def record(self, t: Time, pid: Optional[int], kind: str, **detail) -> Record:
        rec = Record(t, len(self.records), pid, kind, detail)
        self.records.append(rec)
        for fn in self._listeners:
            fn(rec)
        return rec

    def subscribe(self, fn) -> None:
        self._listeners.append(fn)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def of_kind(self, *kinds: str) -> list[Record]:
        return [r for r in self.records if r.kind in kinds]

    def header(self) -> dict:
        for r in self.records:
            if r.kind == "config":
                return r.detail
        raise ValueError("trace has no config header")

    # -- serialization ---------------------------------------------------
    @staticmethod
    def line(rec: Record) -> str:
        return json.dumps({"t": fmt_time(rec.t), "seq": rec.seq, "pid": rec.pid,
                           "kind": rec.kind, "detail": _jsonable(rec.detail)},
                          separators=(",", ":"))

    def dumps(self) -> str:
        return "".join(self.line(r) + "\n" for r in self.records)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(self.line(r) + "\n")

    @classmethod
    def loads(cls, text: str) -> "Trace":
        return cls.from_lines(text.splitlines())

    @classmethod
    def load(cls, path) -> "Trace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Trace":
        records = []
        prev = None
        for i, line in enumerate(lines, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                rec = Record(as_time(d["t"]), int(d["seq"]), d["pid"], str(d["kind"]), dict(d["detail"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"malformed trace line {i}: {exc}") from exc
            if prev is not None and (rec.t, rec.seq) <= (prev.t, prev.seq):
                raise ValueError(f"trace line {i} is out of (t, seq) order")
            records.append(rec)
            prev = rec
        return cls(records)
