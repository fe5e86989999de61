#pragma once

#include <filesystem>
#include <string>

#include "loopspace/loops.hpp"

namespace loopspace {

/// Loop file payload:
///   {"kind":"grid","dim":n,"interp":"linear"|"cubic","samples":[[...],...]}
///   {"kind":"fourier","dim":n,"degree":m,"coeffs":{"re":[[...]],"im":[[...]]}}
/// where re/im hold one row per coordinate with entries k = 0..m.  Numbers
/// are serialised losslessly (shortest round-trip form).
std::string loop_to_json_string(const Loop& loop, int indent = -1);
Loop loop_from_json_string(const std::string& text);

Loop read_loop(const std::filesystem::path& path);
void write_loop(const std::filesystem::path& path, const Loop& loop);

std::string read_text(const std::filesystem::path& path);
/// Write-temp-then-rename, so concurrent readers never see a torn file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

} // namespace loopspace
