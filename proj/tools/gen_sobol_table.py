#!/usr/bin/env python3
"""Regenerates include/kot/sobol_table.hpp from the Joe-Kuo direction numbers
shipped with scipy (new-joe-kuo-6.21201)."""
import os
import sys

import numpy as np
import scipy.stats

MAX_DIM = 64


def main(out_path):
    data = np.load(os.path.join(os.path.dirname(scipy.stats.__file__),
                                "_sobol_direction_numbers.npz"))
    poly, vinit = data["poly"], data["vinit"]
    lines = [
        "// Generated by tools/gen_sobol_table.py. Do not edit.",
        "#pragma once",
        "",
        "#include <array>",
        "#include <cstdint>",
        "",
        "namespace kot::detail {",
        "",
        "struct SobolDirectionEntry {",
        "  std::uint32_t degree;",
        "  std::uint32_t coeffs;  // interior polynomial coefficients a_1..a_{s-1}",
        "  std::array<std::uint32_t, 18> m;",
        "};",
        "",
        f"inline constexpr int kSobolMaxDim = {MAX_DIM};",
        "",
        "// Entry 0 is the van der Corput dimension (all m_k = 1).",
        f"inline constexpr std::array<SobolDirectionEntry, {MAX_DIM}> kSobolTable{{{{",
    ]
    for d in range(MAX_DIM):
        p = int(poly[d])
        s = p.bit_length() - 1
        a = (p >> 1) & ((1 << max(s - 1, 0)) - 1) if s > 0 else 0
        m = [int(v) for v in vinit[d]]
        if d == 0:
            s, a, m = 0, 0, [1] * 18
        lines.append(f"    {{{s}, {a}, {{{', '.join(str(v) for v in m)}}}}},")
    lines += ["}};", "", "}  // namespace kot::detail", ""]
    with open(out_path, "w") as f:
        f.write("\n".join(lines))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/kot/sobol_table.hpp")
