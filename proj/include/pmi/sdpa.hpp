#pragma once
// SDPA sparse (.dat-s) export and import.
//
// SDPA solves  min c^T x  s.t.  sum_i F_i x_i - F_0 PSD, so an instance
// C - sum_i y_i A_i PSD is written with F_0 = -C, F_i = -A_i and c = -b for
// maximization (c = b for minimization). Equality rows E y = e are written as
// a diagonal block of opposing inequality pairs so any SDPA reader accepts the
// file; a leading "*!" comment records sense, offset and which block carries
// the pairs so that import_sdpa restores the instance exactly.

#include <string>

#include "pmi/sdp.hpp"

namespace pmi {

std::string export_sdpa(const SdpInstance& p);
// Throws Error on malformed input.
SdpInstance import_sdpa(const std::string& text);

}  // namespace pmi
