"""Pack the synthetic-accessibility fragment contributions shipped with RDKit
(Contrib/SA_Score/fpscores.pkl.gz) into core/data/sa_fragments.bin.

Layout, little endian:
  8 bytes   magic "QEVOSAF1"
  u32       number of distinct scores S
  u32       number of fragment ids N
  S x i32   scores times 1e4, ascending
  N x       varint(id - previous id) then u16 score index, ids ascending
"""
import argparse
import gzip
import os
import pickle
import struct

from rdkit.Chem import RDConfig


def varint(v):
    out = bytearray()
    while v >= 0x80:
        out.append((v & 0x7F) | 0x80)
        v >>= 7
    out.append(v)
    return bytes(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="core/data/sa_fragments.bin")
    args = ap.parse_args()
    src = os.path.join(RDConfig.RDContribDir, "SA_Score", "fpscores.pkl.gz")
    data = pickle.load(gzip.open(src))
    by_id = {}
    for group in data:
        score = round(group[0] * 1e4)
        assert score / 1e4 == group[0]
        for fid in group[1:]:
            assert fid not in by_id
            by_id[fid] = score
    scores = sorted(set(by_id.values()))
    index = {s: i for i, s in enumerate(scores)}
    blob = bytearray(b"QEVOSAF1")
    blob += struct.pack("<II", len(scores), len(by_id))
    blob += struct.pack(f"<{len(scores)}i", *scores)
    prev = 0
    for fid in sorted(by_id):
        blob += varint(fid - prev) + struct.pack("<H", index[by_id[fid]])
        prev = fid
    with open(args.out, "wb") as fh:
        fh.write(blob)
    print(f"{len(by_id)} fragments, {len(scores)} scores, {len(blob)} bytes")


if __name__ == "__main__":
    main()
