"""Journal durability: round trips, torn tails, and real corruption."""

import struct
import zlib

import pytest

from rsabench.errors import JournalCorrupt
from rsabench.journal import MAGIC, Journal, read_journal, replay


def _records(k):
    return [{"seq": i, "payload": "x" * (i % 7)} for i in range(k)]


def test_append_then_read_round_trip(tmp_path):
    path = str(tmp_path / "j.bin")
    with Journal(path) as journal:
        for r in _records(20):
            journal.append(r)
    records, _ = read_journal(path)
    assert records == _records(20)


def test_replay_missing_file_yields_nothing(tmp_path):
    assert list(replay(str(tmp_path / "absent.bin"))) == []


def test_reopen_and_continue(tmp_path):
    path = str(tmp_path / "j.bin")
    with Journal(path) as journal:
        journal.append({"seq": 0})
    with Journal(path) as journal:
        journal.append({"seq": 1})
    assert [r["seq"] for r in replay(path)] == [0, 1]


class TestTornTail:
    """A crash mid-write must cost at most the unacknowledged record."""

    def test_torn_header_is_dropped(self, tmp_path):
        path = str(tmp_path / "j.bin")
        with Journal(path) as journal:
            for r in _records(3):
                journal.append(r)
        with open(path, "ab") as fh:
            fh.write(b"\x00\x00")  # 2 of 8 header bytes
        records, _ = read_journal(path)
        assert len(records) == 3

    def test_torn_payload_is_dropped(self, tmp_path):
        path = str(tmp_path / "j.bin")
        with Journal(path) as journal:
            for r in _records(3):
                journal.append(r)
        payload = b'{"seq": 99}'
        blob = struct.pack(">II", len(payload), zlib.crc32(payload)) + payload[:4]
        with open(path, "ab") as fh:
            fh.write(blob)
        records, _ = read_journal(path)
        assert [r["seq"] for r in records] == [0, 1, 2]

    def test_reopen_truncates_torn_tail_then_appends(self, tmp_path):
        path = str(tmp_path / "j.bin")
        with Journal(path) as journal:
            journal.append({"seq": 0})
        with open(path, "ab") as fh:
            fh.write(b"\xff\xff\xff")
        with Journal(path) as journal:
            journal.append({"seq": 1})
        assert [r["seq"] for r in replay(path)] == [0, 1]

    def test_torn_magic_treated_as_empty(self, tmp_path):
        path = tmp_path / "j.bin"
        path.write_bytes(MAGIC[:3])
        records, offset = read_journal(str(path))
        assert records == [] and offset == 0
        with Journal(str(path)) as journal:
            journal.append({"seq": 0})
        assert [r["seq"] for r in replay(str(path))] == [0]


class TestCorruption:
    """Complete records that fail verification are damage, not crash residue."""

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "j.bin"
        path.write_bytes(b"WRONGMAG" + b"\x00" * 16)
        with pytest.raises(JournalCorrupt) as err:
            read_journal(str(path))
        assert err.value.byte_offset == 0

    def test_checksum_mismatch_reports_offset(self, tmp_path):
        path = str(tmp_path / "j.bin")
        with Journal(path) as journal:
            journal.append({"seq": 0})
            journal.append({"seq": 1})
        with open(path, "r+b") as fh:
            data = fh.read()
            # flip one payload byte of the second record
            first_len = struct.unpack_from(">I", data, len(MAGIC))[0]
            second_start = len(MAGIC) + 8 + first_len
            fh.seek(second_start + 8 + 2)
            fh.write(b"Z")
        with pytest.raises(JournalCorrupt) as err:
            read_journal(path)
        assert err.value.byte_offset == second_start

    def test_undecodable_payload(self, tmp_path):
        path = tmp_path / "j.bin"
        payload = b"\xff\xfe not json"
        blob = MAGIC + struct.pack(">II", len(payload), zlib.crc32(payload)) + payload
        path.write_bytes(blob)
        with pytest.raises(JournalCorrupt):
            read_journal(str(path))

    def test_absurd_length_rejected(self, tmp_path):
        path = tmp_path / "j.bin"
        blob = MAGIC + struct.pack(">II", 2**31, 0) + b"tiny"
        path.write_bytes(blob)
        with pytest.raises(JournalCorrupt) as err:
            read_journal(str(path))
        assert err.value.byte_offset == len(MAGIC)

    def test_non_object_payload(self, tmp_path):
        path = tmp_path / "j.bin"
        payload = b"[1, 2, 3]"
        blob = MAGIC + struct.pack(">II", len(payload), zlib.crc32(payload)) + payload
        path.write_bytes(blob)
        with pytest.raises(JournalCorrupt):
            read_journal(str(path))
