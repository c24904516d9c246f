#!/usr/bin/env python3
"""Reference signer for the system-information authentication tests.

Uses the `cryptography` package (independent of the OpenSSL EVP calls in
the implementation) to produce the fixed test keypair, a golden
signature over a fixed broadcast, and the shipped verification corpus.

Digest input: mib || len32be(sib_i) || sib_i ... , hashed with SHA-256,
signed RSA-2048 PKCS#1 v1.5.
"""

import hashlib
import os
import struct

from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import padding, rsa, utils

HERE = os.path.dirname(os.path.abspath(__file__))
KEY_DIR = os.path.normpath(os.path.join(HERE, "..", "..", "scenarios", "keys"))
DATA_DIR = os.path.normpath(os.path.join(HERE, "..", "data"))
CORPUS = os.path.normpath(os.path.join(HERE, "..", "..", "scenarios", "sib_auth_corpus.txt"))


def si_digest(mib: bytes, sibs) -> bytes:
    h = hashlib.sha256()
    h.update(mib)
    for sib in sibs:
        h.update(struct.pack(">I", len(sib)))
        h.update(sib)
    return h.digest()


def sign(priv, mib, sibs):
    return priv.sign(si_digest(mib, sibs), padding.PKCS1v15(),
                     utils.Prehashed(hashes.SHA256()))


def load_or_create_keys():
    priv_path = os.path.join(KEY_DIR, "test_operator_private.pem")
    pub_path = os.path.join(KEY_DIR, "test_operator_public.pem")
    os.makedirs(KEY_DIR, exist_ok=True)
    if os.path.exists(priv_path):
        with open(priv_path, "rb") as f:
            priv = serialization.load_pem_private_key(f.read(), password=None)
        print("using existing keypair")
    else:
        priv = rsa.generate_private_key(public_exponent=65537, key_size=2048)
        with open(priv_path, "wb") as f:
            f.write(priv.private_bytes(serialization.Encoding.PEM,
                                       serialization.PrivateFormat.TraditionalOpenSSL,
                                       serialization.NoEncryption()))
        with open(pub_path, "wb") as f:
            f.write(priv.public_key().public_bytes(
                serialization.Encoding.PEM, serialization.PublicFormat.SubjectPublicKeyInfo))
        print("generated new keypair")
    return priv


def main():
    priv = load_or_create_keys()
    os.makedirs(DATA_DIR, exist_ok=True)

    # Golden broadcast: fixed bytes, byte-exact signature frozen to disk.
    mib = bytes([0x4C, 0x54, 0x45, 0x00])
    sib1 = bytes([0x00, 0x01, 0x00, 0x01])
    sib2 = bytes(range(32))
    sig = sign(priv, mib, [sib1, sib2])
    with open(os.path.join(DATA_DIR, "sib_golden_sig.hex"), "w") as f:
        f.write(sig.hex() + "\n")
    print("golden digest:", si_digest(mib, [sib1, sib2]).hex())
    print("golden signature written (", len(sig), "bytes )")

    # Verification corpus: untampered, tampered, unsigned, wrong-key.
    wrong = rsa.generate_private_key(public_exponent=65537, key_size=2048)
    records = []

    def rec(m, sibs, signature, verdict):
        sibs_hex = ",".join(s.hex() if s else "-" for s in sibs)
        records.append(f"{m.hex()} {sibs_hex} {signature.hex() if signature else '-'} {verdict}")

    rec(mib, [sib1, sib2], sig, "verified")
    flipped = bytearray(sib2)
    flipped[7] ^= 0x10
    rec(mib, [sib1, bytes(flipped)], sig, "malicious")
    mib_flip = bytearray(mib)
    mib_flip[0] ^= 0x01
    rec(bytes(mib_flip), [sib1, sib2], sig, "malicious")
    rec(mib, [sib1, sib2], None, "malicious")
    rec(mib, [sib1, sib2], sign(wrong, mib, [sib1, sib2]), "malicious")
    # reordered SIBs: ordering is part of the signed content
    rec(mib, [sib2, sib1], sig, "malicious")

    with open(CORPUS, "w") as f:
        f.write("# mib_hex sib_hex[,sib_hex...] signature_hex expected\n")
        f.write("\n".join(records) + "\n")
    print("corpus written:", CORPUS, f"({len(records)} records)")


if __name__ == "__main__":
    main()
