#include "seglm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace seglm {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'B', '1'};
constexpr std::uint32_t kFlagSharedOutput = 1u << 0;
constexpr std::uint32_t kFlagLmZeroCell = 1u << 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& in, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in)
    throw CheckpointError("checkpoint truncated in header: " + path.string());
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_u32(out, static_cast<std::uint32_t>(p.vocab_size));
  write_u32(out, static_cast<std::uint32_t>(p.embed_dim));
  write_u32(out, static_cast<std::uint32_t>(p.hidden_dim));
  std::uint32_t flags = 0;
  if (p.shared_output) flags |= kFlagSharedOutput;
  if (p.lm_zero_cell) flags |= kFlagLmZeroCell;
  write_u32(out, flags);
  // Eigen stores column-major, which makes each buffer exactly the
  // documented row-major transpose (input dimension outermost).
  for (const ParamView& v : param_views(const_cast<ModelParams&>(p)))
    out.write(reinterpret_cast<const char*>(v.data),
              static_cast<std::streamsize>(v.size * sizeof(double)));
  if (!out) throw CheckpointError("short write: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path,
                            std::int32_t eos_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError("bad checkpoint magic in " + path.string());
  const auto vocab_size = static_cast<int>(read_u32(in, path));
  const auto embed_dim = static_cast<int>(read_u32(in, path));
  const auto hidden_dim = static_cast<int>(read_u32(in, path));
  const std::uint32_t flags = read_u32(in, path);
  if (vocab_size < 1 || embed_dim < 1 || hidden_dim < 1)
    throw CheckpointError("implausible dimensions in " + path.string());

  ModelParams p = ModelParams::init(vocab_size, embed_dim, hidden_dim, eos_id,
                                    /*seed=*/0, flags & kFlagSharedOutput,
                                    flags & kFlagLmZeroCell);
  for (const ParamView& v : param_views(p)) {
    in.read(reinterpret_cast<char*>(v.data),
            static_cast<std::streamsize>(v.size * sizeof(double)));
    if (!in)
      throw CheckpointError("checkpoint truncated (while reading " +
                            std::string(v.name) + "): " + path.string());
  }
  in.peek();
  if (!in.eof())
    throw CheckpointError("trailing bytes after parameters: " + path.string());
  return p;
}

}  // namespace seglm
