#pragma once

#include "contour/bit_io.hpp"
#include "contour/context_tree.hpp"
#include "contour/training.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace contour {

/// Model file layout, big-endian:
///   "CTM1", u16 D, u32 K, i32 a*1000, u32 beta*1000, u64 L, u32 node count,
///   then one record per node in preorder (children l, s, r):
///   u8 depth, u8 label (3 for the root), 3 x f64 counts.
std::vector<std::uint8_t> serialize_model(const TrainedModel& model);
TrainedModel parse_model(std::span<const std::uint8_t> bytes);

/// Same record stream under magic "CTS1" with no parameter block; used for
/// dumping count tries, which need not be full.
std::vector<std::uint8_t> serialize_tree(const ContextTree& tree);
ContextTree parse_tree(std::span<const std::uint8_t> bytes);

/// One line per node: indentation by depth, context, counts, end-node flag.
std::string dump_tree_text(const ContextTree& tree);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// Hash of the canonical model file bytes.
std::uint64_t model_hash(const TrainedModel& model);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
/// Writes via a temporary file and rename.
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);
void write_file_text(const std::string& path, const std::string& text);

} // namespace contour
