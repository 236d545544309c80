"""Append-only binary journal for scored submissions.

Layout: an 8-byte magic header, then records of

    [u32 length (big-endian)] [u32 crc32 of payload] [payload bytes]

where the payload is a UTF-8 JSON object. Records are flushed and fsynced
before the caller responds, so every acknowledged submission survives a
crash. Recovery distinguishes two failure shapes:

* a torn tail (incomplete header or payload, the normal result of dying
  mid-write) is truncated away silently;
* a complete record whose checksum or JSON does not verify means the file
  was damaged after the fact, and recovery refuses with the byte offset.
"""

from __future__ import annotations

import json
import os
import struct
import threading
import zlib
from typing import Any, Iterator

from .errors import JournalCorrupt

MAGIC = b"RSABJL01"
_HEADER = struct.Struct(">II")

#: refuse absurd lengths so a corrupt header cannot trigger a huge read
MAX_RECORD_BYTES = 64 * 1024 * 1024


def _encode(record: dict[str, Any]) -> bytes:
    payload = json.dumps(record, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _HEADER.pack(len(payload), zlib.crc32(payload)) + payload


def read_journal(path: str) -> tuple[list[dict[str, Any]], int]:
    """Read all intact records; returns (records, byte offset of clean end).

    A torn trailing record is ignored and the returned offset points at the
    start of the tear, so appending from that offset repairs the file.
    Raises JournalCorrupt for damage that cannot be explained by a torn
    write (bad magic, checksum mismatch, undecodable payload).
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC):
        # even the magic was torn; treat as empty
        return [], 0
    if data[: len(MAGIC)] != MAGIC:
        raise JournalCorrupt(0, "bad magic header")

    records: list[dict[str, Any]] = []
    offset = len(MAGIC)
    while offset < len(data):
        if offset + _HEADER.size > len(data):
            break  # torn header
        length, crc = _HEADER.unpack_from(data, offset)
        if length > MAX_RECORD_BYTES:
            raise JournalCorrupt(offset, f"record length {length} exceeds limit")
        start = offset + _HEADER.size
        end = start + length
        if end > len(data):
            break  # torn payload
        payload = data[start:end]
        if zlib.crc32(payload) != crc:
            raise JournalCorrupt(offset, "checksum mismatch")
        try:
            record = json.loads(payload.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise JournalCorrupt(offset, f"undecodable payload: {exc}") from exc
        if not isinstance(record, dict):
            raise JournalCorrupt(offset, "payload is not a JSON object")
        records.append(record)
        offset = end
    return records, offset


class Journal:
    """Writer handle. ``append`` is atomic and durable per record."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        if os.path.exists(path):
            _, clean_end = read_journal(path)
            size = os.path.getsize(path)
            self._fh = open(path, "r+b")
            if size < len(MAGIC):
                # torn initial write: start the file over
                self._fh.truncate(0)
                self._fh.write(MAGIC)
                self._fh.flush()
                os.fsync(self._fh.fileno())
            elif size > clean_end:
                # drop a torn tail before appending over it
                self._fh.truncate(clean_end)
            self._fh.seek(0, os.SEEK_END)
        else:
            self._fh = open(path, "w+b")
            self._fh.write(MAGIC)
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def append(self, record: dict[str, Any]) -> None:
        blob = _encode(record)
        with self._lock:
            self._fh.write(blob)
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        with self._lock:
            if not self._fh.closed:
                self._fh.close()

    def __enter__(self) -> "Journal":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def replay(path: str) -> Iterator[dict[str, Any]]:
    """Yield intact records from an existing journal; absent file yields none."""
    if not os.path.exists(path):
        return
    records, _ = read_journal(path)
    yield from records
