import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evaug.errors import ConfigurationError, FormatError, ParseError
from evaug.events import EventStream
from evaug.io import (
    BBoxLabel,
    file_digest,
    filter_boxes,
    read_events,
    read_labels,
    read_manifest,
    read_volume,
    write_events,
    write_labels,
    write_manifest,
    write_volume,
)

from oracles import keep_box


class TestEventFiles:
    def test_binary_roundtrip(self, make_stream, tmp_path):
        s = make_stream(5000, width=304, height=240)
        path = tmp_path / "a.evs"
        write_events(s, path)
        assert read_events(path) == s

    def test_empty_roundtrip(self, tmp_path):
        s = EventStream.empty(16, 16)
        path = tmp_path / "empty.evs"
        write_events(s, path)
        got = read_events(path)
        assert len(got) == 0
        assert (got.width, got.height) == (16, 16)

    def test_csv_single_record(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("t,x,y,p\n100,3,4,1\n")
        s = read_events(path, width=8, height=8)
        assert len(s) == 1
        assert (s.x[0], s.y[0], s.t[0], s.p[0]) == (3, 4, 100, 1)

    def test_csv_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,t,p\n1,2,3,0\n")
        with pytest.raises(ParseError) as err:
            read_events(path)
        assert err.value.offset == 0

    def test_csv_malformed_record_offset(self, tmp_path):
        path = tmp_path / "bad2.csv"
        path.write_text("t,x,y,p\n10,1,1,0\nbogus line\n")
        with pytest.raises(ParseError) as err:
            read_events(path)
        assert err.value.offset == len("t,x,y,p\n10,1,1,0\n")

    def test_unsorted_input_stably_sorted(self, tmp_path):
        path = tmp_path / "unsorted.csv"
        path.write_text("t,x,y,p\n200,5,0,1\n100,1,0,0\n100,2,0,1\n")
        s = read_events(path, width=8, height=8)
        assert list(s.t) == [100, 100, 200]
        assert list(s.x) == [1, 2, 5]  # equal timestamps keep file order

    def test_out_of_bounds_dropped_and_counted(self, tmp_path, caplog):
        path = tmp_path / "oob.csv"
        path.write_text("t,x,y,p\n1,1,1,0\n2,99,1,0\n3,1,99,1\n")
        with caplog.at_level("WARNING"):
            s = read_events(path, width=8, height=8)
        assert len(s) == 1
        assert "dropped 2" in caplog.text

    def test_truncated_binary_names_offset(self, make_stream, tmp_path):
        s = make_stream(100, width=32, height=32)
        path = tmp_path / "t.evs"
        write_events(s, path)
        data = path.read_bytes()
        header = 16  # magic + dims + count
        for cut in (len(data) - 5, len(data) - 13, header + 1):
            clipped = tmp_path / "cut.evs"
            clipped.write_bytes(data[:cut])
            with pytest.raises(ParseError) as err:
                read_events(clipped)
            full_records = (cut - header) // 13
            assert err.value.offset == header + full_records * 13

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.evs"
        path.write_bytes(b"NOPE" + bytes(12))
        with pytest.raises(FormatError):
            read_events(path)


class TestVolumeFiles:
    def test_roundtrip_bit_exact(self, make_volume, tmp_path):
        vol = make_volume((7, 2, 33, 41))
        path = tmp_path / "v.evth"
        write_volume(vol, path)
        got = read_volume(path)
        np.testing.assert_array_equal(got, vol)
        assert got.dtype == np.float32

    def test_fractional_values_roundtrip(self, rng, tmp_path):
        vol = rng.random((3, 2, 5, 9)).astype(np.float32)
        path = tmp_path / "f.evth"
        write_volume(vol, path)
        np.testing.assert_array_equal(read_volume(path), vol)

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "x.evth"
        path.write_bytes(b"XXXX" + bytes(30))
        with pytest.raises(FormatError):
            read_volume(path)

    def test_wrong_version_rejected(self, make_volume, tmp_path):
        path = tmp_path / "v.evth"
        write_volume(make_volume((2, 2, 4, 4)), path)
        data = bytearray(path.read_bytes())
        data[4] = 99
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            read_volume(path)

    def test_truncated_payload_rejected(self, make_volume, tmp_path):
        path = tmp_path / "v.evth"
        write_volume(make_volume((2, 2, 4, 4)), path)
        data = path.read_bytes()
        path.write_bytes(data[:-4])
        with pytest.raises(FormatError):
            read_volume(path)

    def test_header_is_little_endian(self, make_volume, tmp_path):
        vol = make_volume((3, 2, 4, 5))
        path = tmp_path / "v.evth"
        write_volume(vol, path)
        data = path.read_bytes()
        assert data[:4] == b"EVTH"
        assert int.from_bytes(data[4:6], "little") == 1
        assert int.from_bytes(data[6:10], "little") == 3
        assert int.from_bytes(data[10:14], "little") == 2
        assert int.from_bytes(data[14:18], "little") == 4
        assert int.from_bytes(data[18:22], "little") == 5


class TestLabels:
    def test_roundtrip(self, tmp_path):
        labels = [
            BBoxLabel(ts=1000, x=4.5, y=6.0, w=30, h=40, class_id=1, track_id=7),
            BBoxLabel(ts=2000, x=0, y=0, w=12, h=50, class_id=0, track_id=8),
        ]
        path = tmp_path / "l.csv"
        write_labels(labels, path)
        assert read_labels(path) == labels

    def test_documented_filter_cases(self):
        removed_diag = BBoxLabel(ts=0, x=0, y=0, w=20, h=20, class_id=0)
        removed_side = BBoxLabel(ts=0, x=0, y=0, w=9, h=100, class_id=0)
        kept = BBoxLabel(ts=0, x=0, y=0, w=30, h=30, class_id=0)
        assert filter_boxes([removed_diag, removed_side, kept]) == [kept]

    def test_exact_thresholds_kept(self):
        # diagonal exactly 30 (18-24-30 triangle) and sides exactly 10
        box = BBoxLabel(ts=0, x=0, y=0, w=18, h=24, class_id=0)
        assert filter_boxes([box]) == [box]
        box = BBoxLabel(ts=0, x=0, y=0, w=10, h=50, class_id=0)
        assert filter_boxes([box]) == [box]

    def test_idempotent_and_order_preserving(self, rng):
        boxes = [
            BBoxLabel(ts=i, x=0, y=0, w=float(rng.integers(1, 60)),
                      h=float(rng.integers(1, 60)), class_id=0)
            for i in range(200)
        ]
        once = filter_boxes(boxes)
        assert filter_boxes(once) == once
        assert once == [b for b in boxes if b in once]

    def test_invalid_extent_rejected(self):
        with pytest.raises(ConfigurationError):
            BBoxLabel(ts=0, x=0, y=0, w=0, h=5, class_id=0)

    def test_malformed_label_file(self, tmp_path):
        path = tmp_path / "l.csv"
        path.write_text("ts,x,y,w,h,class_id,track_id\n1,2,3\n")
        with pytest.raises(ParseError):
            read_labels(path)

    @settings(max_examples=100, deadline=None)
    @given(w=st.floats(0.1, 200), h=st.floats(0.1, 200))
    def test_matches_one_line_oracle(self, w, h):
        box = BBoxLabel(ts=0, x=0, y=0, w=w, h=h, class_id=0)
        assert (filter_boxes([box]) == [box]) == keep_box(w, h)


class TestManifest:
    def test_digest_changes_iff_bytes_change(self, tmp_path):
        a = tmp_path / "a.bin"
        a.write_bytes(b"hello world")
        d1 = file_digest(a)
        assert len(d1) == 16  # 64-bit hex
        a.write_bytes(b"hello world")
        assert file_digest(a) == d1
        a.write_bytes(b"hello worlds")
        assert file_digest(a) != d1

    def test_manifest_roundtrip_and_stable_bytes(self, tmp_path):
        manifest = {"b": 1, "a": [1, 2], "c": {"y": 0, "x": 1}}
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        write_manifest(manifest, p1)
        write_manifest(manifest, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_manifest(p1) == manifest
