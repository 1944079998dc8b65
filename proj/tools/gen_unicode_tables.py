#!/usr/bin/env python3
"""Regenerates include/offeval/detail/unicode_tables.hpp from Python's unicodedata."""
import sys
import unicodedata

MAX_CP = 0x10FFFF


def ranges(pred):
    out = []
    start = None
    for cp in range(MAX_CP + 2):
        hit = cp <= MAX_CP and pred(cp)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    return out


def cat(cp):
    return unicodedata.category(chr(cp))


def emit_ranges(name, rs):
    lines = [f"inline constexpr CodepointRange {name}[] = {{"]
    row = []
    for lo, hi in rs:
        row.append(f"{{0x{lo:X}, 0x{hi:X}}}")
        if len(row) == 6:
            lines.append("    " + ", ".join(row) + ",")
            row = []
    if row:
        lines.append("    " + ", ".join(row) + ",")
    lines.append("};")
    return "\n".join(lines)


def main():
    punct = ranges(lambda c: cat(c).startswith("P"))
    symbol = ranges(lambda c: cat(c).startswith("S"))
    digit = ranges(lambda c: cat(c) == "Nd")
    space = ranges(lambda c: chr(c).isspace())
    lower = []
    for cp in range(MAX_CP + 1):
        ch = chr(cp)
        lo = ch.lower()
        if len(lo) == 1 and lo != ch:
            lower.append((cp, ord(lo)))

    out = [
        "// Generated by tools/gen_unicode_tables.py (Unicode "
        + unicodedata.unidata_version + "). Do not edit.",
        "#pragma once",
        "",
        "#include <cstdint>",
        "#include <utility>",
        "",
        "namespace offeval::detail {",
        "",
        "struct CodepointRange {",
        "  char32_t lo;",
        "  char32_t hi;",
        "};",
        "",
        "// General category P*",
        emit_ranges("kPunctuation", punct),
        "",
        "// General category S*",
        emit_ranges("kSymbol", symbol),
        "",
        "// General category Nd",
        emit_ranges("kDecimalDigit", digit),
        "",
        "// White_Space",
        emit_ranges("kWhitespace", space),
        "",
        "// Simple one-to-one lowercase mappings, sorted by source code point.",
        "inline constexpr std::pair<char32_t, char32_t> kLowercase[] = {",
    ]
    row = []
    for src, dst in lower:
        row.append(f"{{0x{src:X}, 0x{dst:X}}}")
        if len(row) == 6:
            out.append("    " + ", ".join(row) + ",")
            row = []
    if row:
        out.append("    " + ", ".join(row) + ",")
    out += ["};", "", "}  // namespace offeval::detail", ""]
    sys.stdout.write("\n".join(out))


if __name__ == "__main__":
    main()
