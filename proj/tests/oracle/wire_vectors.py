#!/usr/bin/env python3
"""Independent oracle for the wire/key golden vectors.

Builds every record byte by byte with struct packing and the `cryptography`
package, without touching the C++ library. Run from the repo root:

    python3 tests/oracle/wire_vectors.py > tests/data/wire_vectors.txt
"""

import hashlib
import struct

from cryptography.hazmat.primitives import cmac, serialization
from cryptography.hazmat.primitives.asymmetric import ed25519, x25519
from cryptography.hazmat.primitives.ciphers import algorithms
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

P = 2**255 - 19
RAW = serialization.Encoding.Raw


def raw_pub(key):
    return key.public_key().public_bytes(RAW, serialization.PublicFormat.Raw)


def ed_pub(seed):
    return raw_pub(ed25519.Ed25519PrivateKey.from_private_bytes(seed))


def ed_sign(seed, msg):
    return ed25519.Ed25519PrivateKey.from_private_bytes(seed).sign(msg)


def montgomery(ed_public):
    y = int.from_bytes(ed_public, "little") & ((1 << 255) - 1)
    u = (1 + y) * pow(1 - y, P - 2, P) % P
    return u.to_bytes(32, "little")


def x25519_scalar_from_seed(seed):
    h = bytearray(hashlib.sha512(seed).digest()[:32])
    h[0] &= 248
    h[31] &= 127
    h[31] |= 64
    return bytes(h)


def x25519_pub(priv):
    return raw_pub(x25519.X25519PrivateKey.from_private_bytes(priv))


def x25519_shared(priv, pub):
    return x25519.X25519PrivateKey.from_private_bytes(priv).exchange(x25519.X25519PublicKey.from_public_bytes(pub))


def hkdf(ikm, salt, info, n):
    return HKDF(SHA256(), n, salt if salt else None, info).derive(ikm)


def aes_cmac(key, data):
    c = cmac.CMAC(algorithms.AES(key))
    c.update(data)
    return c.finalize()


def tlv(t, value):
    return bytes([t]) + struct.pack(">H", len(value)) + value


def control_nonce(direction, counter):
    return bytes([direction, 0, 0, 0]) + struct.pack(">Q", counter)


def seq(start, n):
    return bytes((start + i) & 0xFF for i in range(n))


def main():
    out = []

    def emit(name, data, comment=None):
        if comment:
            out.append("# " + comment)
        out.append(f"{name} {data.hex()}")

    # Header: src_aid=10, src_ephid=00..0f, dst_aid=20, dst_ephid=10..1f, mac=a0..a7, nonce=0102030405060708.
    src_ephid, dst_ephid = seq(0x00, 16), seq(0x10, 16)
    header = struct.pack(">I", 10) + src_ephid + struct.pack(">I", 20) + dst_ephid + seq(0xA0, 8) + seq(0x01, 8)
    emit("header_example", header, "header fields as in wire_test HeaderGolden")

    payload = b"hello"
    emit("gre_example", struct.pack(">IIH", 0x0A000001, 0x0A000002, 0x88B5) + header + payload,
         "GRE 10.0.0.1 -> 10.0.0.2 around header_example + 'hello'")

    k_pkt = bytes([0x55] * 16)
    zeroed = header[:40] + bytes(8) + header[48:]
    emit("packet_mac_example", aes_cmac(k_pkt, zeroed + payload)[:8], "k_pkt = 55*16 over header_example + 'hello'")

    # Keys.
    as_sign_seed = bytes([0x11] * 32)
    emit("as_sign_public", ed_pub(as_sign_seed), "AS Ed25519 seed 11*32")

    eph_seed_a, eph_seed_b = bytes([0x66] * 32), bytes([0x77] * 32)
    pub_a = x25519_pub(x25519_scalar_from_seed(eph_seed_a))
    pub_b = x25519_pub(x25519_scalar_from_seed(eph_seed_b))
    assert pub_a == montgomery(ed_pub(eph_seed_a))
    emit("ephemeral_public_66", pub_a, "EphemeralKeyPair from seed 66*32: X25519 public of the clamped SHA-512 half")
    emit("ephemeral_public_77", pub_b)
    shared = x25519_shared(x25519_scalar_from_seed(eph_seed_a), pub_b)
    low, high = sorted([src_ephid, dst_ephid])
    emit("session_key_66_77", hkdf(shared, low + high, b"session", 32),
         "session key between seeds 66 and 77 for EphIDs 00..0f and 10..1f")

    host_priv, as_priv = bytes([0x21] * 32), bytes([0x31] * 32)
    ha_shared = x25519_shared(host_priv, x25519_pub(as_priv))
    emit("host_as_ctrl", hkdf(ha_shared, b"", b"host-ctrl", 16), "host X25519 private 21*32, AS X25519 private 31*32")
    emit("host_as_pkt", hkdf(ha_shared, b"", b"host-pkt", 16))

    # Certificate: ephid=00..0f, exp=1700000900, pubkey=ephemeral_public_66, aid=7, aa_ephid=f0..ff.
    body = src_ephid + struct.pack(">I", 1700000900) + pub_a + struct.pack(">I", 7) + seq(0xF0, 16)
    cert = body + ed_sign(as_sign_seed, body)
    emit("certificate_example", cert, "signed by as_sign_public seed")

    # Control messages.
    infra_key = bytes([0x33] * 16)
    n = control_nonce(3, 1)
    m1_pt = struct.pack(">I", 0xDEADBEEF) + bytes([0x44] * 16) + k_pkt
    emit("msg_bootstrap_infra", tlv(0x01, n + AESGCM(infra_key).encrypt(n, m1_pt, b"\x01")),
         "infra key 33*16, nonce (3, 1), hid deadbeef, k_ctrl 44*16, k_pkt 55*16")

    id_info = seq(0x40, 16) + struct.pack(">I", 1700003600)
    emit("msg_bootstrap_host", tlv(0x02, id_info + ed_sign(as_sign_seed, id_info) + cert + cert),
         "ctrl_ephid 40..4f, exp 1700003600, dns and ems certs = certificate_example")

    k_ctrl = bytes([0x44] * 16)
    n = control_nonce(1, 7)
    emit("msg_ephid_request", tlv(0x03, n + AESGCM(k_ctrl).encrypt(n, b"\x01" + pub_a, b"\x03")),
         "k_ctrl 44*16, nonce (1, 7), kind data, pubkey ephemeral_public_66")
    n = control_nonce(2, 7)
    emit("msg_ephid_reply", tlv(0x04, n + AESGCM(k_ctrl).encrypt(n, cert, b"\x04")), "nonce (2, 7), certificate_example")

    evidence = header + payload
    emit("msg_shutoff",
         tlv(0x05, struct.pack(">H", len(evidence)) + evidence + ed_sign(eph_seed_a, evidence) + cert),
         "evidence header_example + 'hello', signed by ephemeral seed 66*32")

    name = b"www.example"
    emit("msg_dns_register", tlv(0x06, bytes([len(name)]) + name + cert))
    emit("msg_dns_query", tlv(0x07, bytes([len(name)]) + name))
    emit("msg_dns_answer", tlv(0x08, bytes([len(name)]) + name + b"\x01" + cert))
    emit("msg_dns_answer_missing", tlv(0x08, bytes([len(name)]) + name + b"\x00"))
    emit("msg_data", tlv(0x10, seq(0x90, 20)), "ciphertext 90..a3")
    emit("msg_icmp", tlv(0x11, b"\x03\x01" + header), "type 3 code 1 quoting header_example")
    emit("msg_hello", tlv(0x12, cert))
    emit("msg_hello_ack", tlv(0x13, cert))

    print("# Generated by tests/oracle/wire_vectors.py. One record per line: <name> <hex>.")
    print("\n".join(out))


if __name__ == "__main__":
    main()
