#pragma once

#include <cstdint>
#include <filesystem>

#include "qkt/floquet.hpp"

namespace qkt {

/// Binary evolution checkpoint, little-endian, layout (version 1):
///
///   magic "QKTCKPT\0" | u32 version | u64 config_hash | u32 n_qubits |
///   f64 kappa | f64 alpha | i64 t | (f64 re, f64 im) * (N+1) for c |
///   same for dc | u64 FNV-1a checksum of everything before it
///
/// Doubles are stored bit-exactly so a resumed run continues identically.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  double kappa = 0.0;
  double alpha = 0.0;
  Snapshot snapshot;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes to a temporary sibling and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws DomainError on a missing file, bad magic, unknown version or
/// checksum mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace qkt
