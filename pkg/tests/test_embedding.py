"""Embedding lookup and the CEMB contextual-embedding file format."""

import numpy as np
import pytest

from cisea_mrfe.embedding import (
    FormatError,
    embed,
    load_contextual,
    save_contextual,
)
from cisea_mrfe.tensor import Tensor, tsum


class TestEmbed:
    def test_pad_rows(self):
        table = Tensor(np.arange(12, dtype=np.float32).reshape(4, 3))
        out = embed([0, 0], table)
        assert np.array_equal(out.values.data, np.stack([table.data[0]] * 2))
        assert out.n == 2 and out.d == 3

    def test_one_hot_table(self):
        table = Tensor(np.eye(3, dtype=np.float32))
        out = embed([2], table)
        assert np.array_equal(out.values.data, [[0, 0, 1]])

    def test_gradient_counts_occurrences(self):
        table = Tensor(np.ones((4, 2), dtype=np.float32), requires_grad=True)
        tsum(embed([1, 1, 3], table).values).backward()
        counts = table.grad[:, 0]
        assert np.array_equal(counts, [0, 2, 0, 1])

    def test_out_of_range_rejected(self):
        table = Tensor(np.ones((2, 2), dtype=np.float32))
        with pytest.raises(IndexError, match="vocab"):
            embed([5], table)


class TestContextualFile:
    def _records(self, rng, widths=(6, 6), d=5):
        return [(rng.standard_normal((n, d)).astype(np.float32), i % 3)
                for i, n in enumerate(widths)]

    def test_round_trip_bit_exact(self, tmp_path, rng):
        records = self._records(rng, widths=(4, 9, 1))
        path = tmp_path / "emb.cemb"
        save_contextual(path, records)
        loaded = load_contextual(path)
        assert len(loaded) == 3
        for (arr, label), (mat, got_label) in zip(records, loaded):
            assert mat.values.data.tobytes() == arr.tobytes()
            assert got_label == label
            assert mat.source == "contextual_file"

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.cemb"
        path.write_bytes(b"XXXX" + b"\x00" * 8)
        with pytest.raises(FormatError, match="magic"):
            load_contextual(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "bad.cemb"
        path.write_bytes(b"CEMB" + (2).to_bytes(4, "little") + (0).to_bytes(4, "little"))
        with pytest.raises(FormatError, match="version"):
            load_contextual(path)

    def test_truncated_body_names_offset(self, tmp_path, rng):
        path = tmp_path / "trunc.cemb"
        save_contextual(path, self._records(rng))
        blob = path.read_bytes()
        path.write_bytes(blob[:-10])
        with pytest.raises(FormatError, match="offset") as exc:
            load_contextual(path)
        assert exc.value.offset is not None

    def test_mixed_widths_rejected(self, tmp_path, rng):
        path = tmp_path / "mixed.cemb"
        save_contextual(path, [(rng.standard_normal((2, 4)).astype(np.float32), 0),
                               (rng.standard_normal((2, 5)).astype(np.float32), 1)])
        with pytest.raises(FormatError, match="mixed"):
            load_contextual(path)

    def test_negative_label_round_trip(self, tmp_path, rng):
        path = tmp_path / "neg.cemb"
        save_contextual(path, [(rng.standard_normal((1, 2)).astype(np.float32), -1)])
        assert load_contextual(path)[0][1] == -1

    def test_wide_record(self, tmp_path, rng):
        # exporter-scale width loads fine
        path = tmp_path / "wide.cemb"
        arr = rng.standard_normal((3, 768)).astype(np.float32)
        save_contextual(path, [(arr, 1)])
        mat, _ = load_contextual(path)[0]
        assert mat.d == 768 and mat.n == 3
