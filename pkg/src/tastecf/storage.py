"""Checksummed little-endian binary container helpers.

Shared by the dataset and index file formats: magic + version header,
length-prefixed UTF-8 vocabularies, trailing CRC32 over everything before
it.
"""

import struct
import zlib

from .core import ChecksumError, FormatVersionError, Vocabulary


def write_file(path, chunks) -> None:
    crc = 0
    with open(path, "wb") as fh:
        for chunk in chunks:
            fh.write(chunk)
            crc = zlib.crc32(chunk, crc)
        fh.write(struct.pack("<I", crc))


def read_verified(path) -> bytes:
    """Whole-file read with the CRC trailer checked and stripped."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4:
        raise ChecksumError(f"{path}: file truncated")
    body, trailer = data[:-4], data[-4:]
    if zlib.crc32(body) != struct.unpack("<I", trailer)[0]:
        raise ChecksumError(f"{path}: checksum mismatch")
    return body


def check_header(body: bytes, magic: bytes, version: int, path) -> int:
    """Validate magic and version; return the offset past the header."""
    if len(body) < len(magic) + 4 or body[: len(magic)] != magic:
        raise FormatVersionError(f"{path}: unrecognized file magic")
    (got,) = struct.unpack_from("<I", body, len(magic))
    if got != version:
        raise FormatVersionError(f"{path}: format version {got}, expected {version}")
    return len(magic) + 4


def encode_vocab(vocab: Vocabulary) -> bytes:
    out = bytearray()
    for ext_id in vocab.ids:
        enc = ext_id.encode("utf-8")
        out += struct.pack("<I", len(enc))
        out += enc
    return bytes(out)


def decode_vocab(body: bytes, offset: int, count: int):
    ids = []
    for _ in range(count):
        (n,) = struct.unpack_from("<I", body, offset)
        offset += 4
        ids.append(body[offset : offset + n].decode("utf-8"))
        offset += n
    return Vocabulary(ids), offset
