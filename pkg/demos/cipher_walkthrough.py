"""Encrypt one point triple with line keys, then a short byte string.

Run with: python3 demos/cipher_walkthrough.py
"""
from moebius_crypto import MoebiusCipher, extension_for
from moebius_crypto.stream import Container, decrypt_stream, encrypt_stream, random_points

cipher = MoebiusCipher.of_order(4)
P = cipher.plane

msg = cipher.message(*P.points_of(P.unit_circle())[:3])
print("message", msg.points, "on", msg.circle)

# with five points on the circle at q=4, at most two positions can move
dk = cipher.derive_line_keys(msg, random_points(P.ext, seed=2))
print("key points", dk.key_points, "skips", dk.skips)
for K in dk.key.circles:
    print("  key line", K, P.points_of(K))

ct = cipher.encrypt_triple(msg, dk.key)
print("ciphertext", ct.points)
print("decrypts to", cipher.decrypt_triple(ct, dk.key).points)

# the byte layer: fresh keys per triple from a seeded keystream
ext = extension_for(256)
box = encrypt_stream(b"attack at dawn", ext, "stream", keystream=random_points(ext, seed=7))
blob = box.to_bytes()
print(f"\ncontainer: {len(blob)} bytes, accounting {box.key_accounting()}")
print("round trip:", decrypt_stream(Container.from_bytes(blob), keystream=random_points(ext, seed=7)))
