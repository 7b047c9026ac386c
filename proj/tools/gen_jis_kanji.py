#!/usr/bin/env python3
# Copyright (c) 2026, The gel authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates include/gel/glyphset/jis_kanji.hpp from the EUC-JP codec.

JIS X 0208 rows 16-47 hold the level-1 kanji, rows 48-84 the level-2 kanji.
"""
import sys

HEADER = open(__file__).read().split('"""')[0].replace("# ", "// ").replace("#\n", "//\n")
HEADER = "\n".join(l for l in HEADER.splitlines() if not l.startswith("#!"))


def row_codepoints(row):
    out = []
    for col in range(1, 95):
        try:
            ch = bytes([0xA0 + row, 0xA0 + col]).decode("euc_jp")
        except UnicodeDecodeError:
            continue
        out.append(ord(ch))
    return out


def main(path):
    level1 = [cp for r in range(16, 48) for cp in row_codepoints(r)]
    level2 = [cp for r in range(48, 85) for cp in row_codepoints(r)]
    cps = sorted(set(level1 + level2))
    with open(path, "w", encoding="utf-8") as f:
        f.write(HEADER.strip() + "\n\n")
        f.write("// Generated by tools/gen_jis_kanji.py. Do not edit.\n\n")
        f.write("#pragma once\n\n#include <array>\n\nnamespace gel::glyphset::detail {\n\n")
        f.write(f"/// JIS X 0208 level-1 ({len(level1)}) and level-2 ({len(level2)}) kanji, sorted.\n")
        f.write(f"inline constexpr std::array<char32_t, {len(cps)}> jis_kanji = {{\n")
        for i in range(0, len(cps), 10):
            f.write("    " + ", ".join(f"0x{c:04X}" for c in cps[i:i + 10]) + ",\n")
        f.write("};\n\n} // namespace gel::glyphset::detail\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/gel/glyphset/jis_kanji.hpp")
