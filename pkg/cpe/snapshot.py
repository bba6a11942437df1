"""
Binary snapshots of the prognostic state (η, v)

Layout, all little-endian ::

    offset  0  magic    4 bytes   b"CPE1"
    offset  4  version  int64
    offset 12  nx ny nz int64 × 3
    offset 36  t gamma epsilon p0   float64 × 4
    offset 68  payload  η (ny·nx), v₁ (nz·ny·nx), v₂ (nz·ny·nx) float64
"""

# license: Public domain

from collections import namedtuple
from os import path as fp
import glob
import struct

import numpy as np

from .domain import Grid
from .errors import SnapshotError

MAGIC = b'CPE1'
VERSION = 1
_HEADER = struct.Struct('<4sqqqqdddd')
HEADER_SIZE = _HEADER.size
_FLOAT = np.dtype('<f8')

SNAPSHOT_GLOB = 'snap-*.cpe'


class Snapshot(namedtuple('Snapshot', 't gamma epsilon p0 eta v')):
    """
    :param t: time
    :param gamma: adiabatic exponent of the run
    :param epsilon: ε of the run
    :param p0: drag exponent of the run
    :param eta: η, shape (ny, nx)
    :param v: v, shape (2, nz, ny, nx)
    """

    @property
    def grid(self):
        ":: Grid"
        _, nz, ny, nx = self.v.shape
        return Grid(nx, ny, nz)


def snapshot_name(index):
    "file name of the index-th snapshot of a run"
    return 'snap-{:06d}.cpe'.format(index)


def encode(snap):
    """
    Bytes of a snapshot ::

        Snapshot -> bytes
    """
    grid = snap.grid
    if snap.eta.shape != grid.shape2d:
        raise ValueError("eta shape {} does not match v shape {}"
                         .format(snap.eta.shape, snap.v.shape))
    header = _HEADER.pack(MAGIC, VERSION, grid.nx, grid.ny, grid.nz,
                          float(snap.t), float(snap.gamma),
                          float(snap.epsilon), float(snap.p0))
    payload = (np.ascontiguousarray(snap.eta, dtype=_FLOAT).tobytes() +
               np.ascontiguousarray(snap.v, dtype=_FLOAT).tobytes())
    return header + payload


def decode(blob):
    """
    Snapshot from bytes, with byte offsets in any complaint ::

        bytes -> Snapshot
    """
    if len(blob) < HEADER_SIZE:
        raise SnapshotError("truncated header: expected {} bytes, found {}"
                            .format(HEADER_SIZE, len(blob)),
                            offset=len(blob))
    magic, version, nx, ny, nz, t, gamma, eps, p0 = \
        _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise SnapshotError("bad magic {!r}, expected {!r}"
                            .format(magic, MAGIC), offset=0)
    if version != VERSION:
        raise SnapshotError("unsupported version {}".format(version),
                            offset=4)
    # two walls and an interior node
    if min(nx, ny) < 1 or nz < 3:
        raise SnapshotError("bad dimensions {}x{}x{}".format(nx, ny, nz),
                            offset=12)
    count = ny * nx + 2 * nz * ny * nx
    expected = count * _FLOAT.itemsize
    actual = len(blob) - HEADER_SIZE
    if actual != expected:
        raise SnapshotError("payload length mismatch: expected {} bytes "
                            "after the header, found {}"
                            .format(expected, actual), offset=HEADER_SIZE)
    data = np.frombuffer(blob, dtype=_FLOAT, count=count,
                         offset=HEADER_SIZE).astype(float)
    eta = data[:ny * nx].reshape(ny, nx)
    v = data[ny * nx:].reshape(2, nz, ny, nx)
    return Snapshot(t=t, gamma=gamma, epsilon=eps, p0=p0, eta=eta, v=v)


def write_snapshot(path, snap):
    "write a snapshot file"
    with open(path, 'wb') as ofile:
        ofile.write(encode(snap))


def read_snapshot(path):
    """
    read a snapshot file; malformed files raise `SnapshotError`
    naming the file
    """
    with open(path, 'rb') as ifile:
        blob = ifile.read()
    try:
        return decode(blob)
    except SnapshotError as err:
        named = SnapshotError("{}: {}".format(path, err))
        named.offset = err.offset
        raise named


def snapshot_paths(rundir):
    """
    Snapshot files of a run directory, in time order
    """
    return sorted(glob.glob(fp.join(rundir, SNAPSHOT_GLOB)))


def read_series(rundir):
    """
    All snapshots of a run directory
    """
    return [read_snapshot(p) for p in snapshot_paths(rundir)]
