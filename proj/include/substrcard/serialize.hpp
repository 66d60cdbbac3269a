#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "substrcard/estimator.hpp"

namespace substrcard {

// On-disk index format, all integers little-endian:
//
//   "SSC1"  u32 version
//   u64 string_count  u64 rows
//   u64 h  u64 l  u64 c_m  u64 epsilon
//   u64 alphabet_size  { u32 ch  u64 occ  u64 count }*
//   u64 node_count  node*                       (pre-order)
//   u64 fnv1a64 of every preceding byte
//
//   node     = u32 edge_char  u64 start  u64 end  u64 cnt
//              u64 child_count  u64 function_count  function*
//   function = u32 ch  u8 kind
//              kind 1 (spline): u64 knot_count  { u64 row  u64 rank }*
//              kind 0 (linear): f64 slope  f64 intercept
//                               u64 first_row  u64 first_rank
//                               u64 last_row   u64 last_rank
//
// Children follow their parent in pre-order, in ascending edge order.

inline constexpr std::uint32_t kFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::string_view bytes);

std::string serialize_index(const CardinalityIndex& idx);
/// Throws FormatError on bad magic, version, checksum or structure.
CardinalityIndex deserialize_index(std::string_view bytes);

void save_index(const CardinalityIndex& idx, const std::filesystem::path& path);
CardinalityIndex load_index(const std::filesystem::path& path);

}  // namespace substrcard
