#pragma once

#include <filesystem>
#include <stdexcept>

#include "seglm/slm.hpp"

namespace seglm {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary model file. Layout:
///   magic "SGB1"
///   u32 little-endian: vocab_size, embed_dim, hidden_dim, flags
///     flags bit 0: shared output projection
///     flags bit 1: language-model cell state starts at zero
///   f64 little-endian arrays, in order:
///     embedding                   V x E, row-major (one row per symbol)
///     ctx_fwd, ctx_bwd, lm_fwd, lm_bwd, each:
///       input weights             E x 4H, row-major
///       recurrent weights         H x 4H, row-major
///       bias                      4H
///     output weights forward     H x V, row-major
///     output weights backward    H x V (absent when shared)
///     output bias forward        V
///     output bias backward       V (absent when shared)
/// The vocabulary file lives alongside and supplies the EOS index.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& p);

/// eos_id comes from the companion vocabulary file.
ModelParams load_checkpoint(const std::filesystem::path& path,
                            std::int32_t eos_id);

}  // namespace seglm
