#!/usr/bin/env python3
"""Regenerates src/nfc_reject_ranges.inc from the Python unicodedata tables.

The canonical text profile only accepts strings whose NFC status is decidable
without normalization tables: every codepoint must have canonical combining
class 0, be NFC quick-check Yes, and not be a canonical composition partner.
This script emits the codepoint ranges that fail that test.
"""
import unicodedata

reject = set()
maybe = set()
for cp in range(0x110000):
    if 0xD800 <= cp <= 0xDFFF:
        continue
    d = unicodedata.decomposition(chr(cp))
    if d and not d.startswith('<'):
        parts = d.split()
        if len(parts) == 2:
            maybe.add(int(parts[1], 16))

for cp in range(0x110000):
    if 0xD800 <= cp <= 0xDFFF:
        continue
    ch = chr(cp)
    if unicodedata.combining(ch) != 0 or not unicodedata.is_normalized('NFC', ch) or cp in maybe:
        reject.add(cp)

rs = sorted(reject)
ranges = []
start = prev = rs[0]
for cp in rs[1:]:
    if cp == prev + 1:
        prev = cp
    else:
        ranges.append((start, prev))
        start = prev = cp
ranges.append((start, prev))

with open('src/nfc_reject_ranges.inc', 'w') as f:
    f.write("// Codepoint ranges rejected by the conservative NFC check: nonzero canonical\n")
    f.write("// combining class, NFC quick-check No, or canonical composition partners\n")
    f.write("// (quick-check Maybe superset). Generated by tools/gen_nfc_ranges.py from\n")
    f.write("// the Unicode %s character database.\n" % unicodedata.unidata_version)
    for a, b in ranges:
        f.write("{0x%X, 0x%X},\n" % (a, b))
print("wrote %d ranges" % len(ranges))
