"""
Test suite for binary snapshots
"""

from os import path as fp
import shutil
import struct
import tempfile
import unittest

import numpy as np

from cpe.domain import Grid
from cpe.errors import EXIT_IO, SnapshotError
from cpe.snapshot import (HEADER_SIZE, Snapshot, decode, encode,
                          read_series, read_snapshot, snapshot_name,
                          snapshot_paths, write_snapshot)


def _snapshot(grid=Grid(8, 6, 3), t=0.25):
    "a snapshot with distinct values everywhere"
    rng = np.random.RandomState(1)
    return Snapshot(t=t, gamma=2.0, epsilon=0.01, p0=25.0,
                    eta=1 + rng.random_sample(grid.shape2d),
                    v=rng.standard_normal((2,) + grid.shape3d))


# pylint: disable=too-many-public-methods, invalid-name
class SnapshotTest(unittest.TestCase):
    "tests for cpe.snapshot"

    def setUp(self):
        self.tmp = tempfile.mkdtemp(prefix='cpe-test-')

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def assertRejected(self, blob, offset, fragment):
        "decoding fails at the given byte offset"
        with self.assertRaises(SnapshotError) as ctx:
            decode(blob)
        self.assertEqual(offset, ctx.exception.offset)
        self.assertIn(fragment, str(ctx.exception))
        self.assertEqual(EXIT_IO, ctx.exception.exit_code)

    def test_layout(self):
        "68 byte header, then η, v₁, v₂ as little-endian doubles"
        snap = _snapshot()
        blob = encode(snap)
        self.assertEqual(68, HEADER_SIZE)
        self.assertEqual(b'CPE1', blob[:4])
        self.assertEqual((1, 8, 6, 3), struct.unpack('<qqqq', blob[4:36]))
        self.assertEqual((0.25, 2.0, 0.01, 25.0),
                         struct.unpack('<dddd', blob[36:68]))
        self.assertEqual(68 + 8 * (48 + 2 * 144), len(blob))
        first = struct.unpack('<d', blob[68:76])[0]
        self.assertEqual(snap.eta[0, 0], first)

    def test_exact(self):
        "values and metadata come back bit for bit"
        snap = _snapshot()
        back = decode(encode(snap))
        self.assertEqual(Grid(8, 6, 3), back.grid)
        np.testing.assert_array_equal(snap.eta, back.eta)
        np.testing.assert_array_equal(snap.v, back.v)
        self.assertEqual(snap[:4], back[:4])

    def test_rejects(self):
        "each kind of damage is reported where it happens"
        blob = encode(_snapshot())
        self.assertRejected(blob[:20], 20, "truncated header")
        self.assertRejected(b'XXXX' + blob[4:], 0, "bad magic")
        self.assertRejected(blob[:4] + struct.pack('<q', 2) + blob[12:], 4,
                            "version")
        self.assertRejected(blob[:12] + struct.pack('<q', 0) + blob[20:],
                            12, "dimensions")
        self.assertRejected(blob[:-8], HEADER_SIZE, "found {}".format(
            len(blob) - 8 - HEADER_SIZE))
        self.assertRejected(blob + b'\0', HEADER_SIZE, "payload")

    def test_rejects_single_layer(self):
        "nz = 1 has no vertical spacing, even with a consistent payload"
        blob = encode(_snapshot())
        flat = (blob[:28] + struct.pack('<q', 1) + blob[36:HEADER_SIZE] +
                b'\0' * (8 * 3 * 48))
        self.assertRejected(flat, 12, "8x6x1")

    def test_shape_mismatch(self):
        "η must match v"
        snap = _snapshot()._replace(eta=np.ones((5, 5)))
        self.assertRaises(ValueError, encode, snap)

    def test_files(self):
        "names sort in time order, errors name the file"
        for i in [2, 0, 1]:
            write_snapshot(fp.join(self.tmp, snapshot_name(i)),
                           _snapshot(t=0.1 * i))
        paths = snapshot_paths(self.tmp)
        self.assertEqual([snapshot_name(i) for i in range(3)],
                         [fp.basename(p) for p in paths])
        self.assertEqual([0.0, 0.1, 0.2], [s.t for s in read_series(self.tmp)])
        broken = fp.join(self.tmp, 'snap-000009.cpe')
        with open(broken, 'wb') as ofile:
            ofile.write(b'CPE1')
        with self.assertRaises(SnapshotError) as ctx:
            read_snapshot(broken)
        self.assertIn(broken, str(ctx.exception))
        self.assertEqual(4, ctx.exception.offset)
