#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "seglm/checkpoint.hpp"

using namespace seglm;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("checkpoints round trip bitwise") {
  for (const bool shared : {false, true}) {
    ModelParams p = ModelParams::init(9, 5, 6, 8, 12345, shared,
                                      /*lm_zero_cell=*/shared);
    const auto path = temp_file("seglm_ckpt.bin");
    save_checkpoint(path, p);
    const ModelParams q = load_checkpoint(path, 8);
    CHECK(q.vocab_size == 9);
    CHECK(q.embed_dim == 5);
    CHECK(q.hidden_dim == 6);
    CHECK(q.shared_output == shared);
    CHECK(q.lm_zero_cell == shared);
    auto va = param_views(const_cast<ModelParams&>(p));
    auto vb = param_views(const_cast<ModelParams&>(q));
    REQUIRE(va.size() == vb.size());
    for (std::size_t v = 0; v < va.size(); ++v) {
      REQUIRE(va[v].size == vb[v].size);
      for (std::ptrdiff_t i = 0; i < va[v].size; ++i)
        CHECK(va[v].data[i] == vb[v].data[i]);
    }
    std::filesystem::remove(path);
  }
}

TEST_CASE("corrupted magic is rejected") {
  const auto path = temp_file("seglm_ckpt_bad.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE" << std::string(64, '\0');
  }
  CHECK_THROWS_AS((void)load_checkpoint(path, 0), CheckpointError);
  std::filesystem::remove(path);
}

TEST_CASE("truncated files are rejected") {
  ModelParams p = ModelParams::init(5, 3, 3, 4, 1);
  const auto path = temp_file("seglm_ckpt_trunc.bin");
  save_checkpoint(path, p);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full - 16);
  CHECK_THROWS_AS((void)load_checkpoint(path, 4), CheckpointError);
  std::filesystem::remove(path);
}

TEST_CASE("trailing bytes are rejected") {
  ModelParams p = ModelParams::init(5, 3, 3, 4, 1);
  const auto path = temp_file("seglm_ckpt_trail.bin");
  save_checkpoint(path, p);
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << "x";
  }
  CHECK_THROWS_AS((void)load_checkpoint(path, 4), CheckpointError);
  std::filesystem::remove(path);
}

TEST_CASE("the serialized layout is the documented flat order") {
  ModelParams p = ModelParams::init(3, 2, 2, 2, 77);
  const auto path = temp_file("seglm_ckpt_layout.bin");
  save_checkpoint(path, p);
  std::ifstream in(path, std::ios::binary);
  std::string header(4, '\0');
  in.read(header.data(), 4);
  CHECK(header == "SGB1");
  std::uint32_t dims[4];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  CHECK(dims[0] == 3);
  CHECK(dims[1] == 2);
  CHECK(dims[2] == 2);
  CHECK(dims[3] == 0);
  // First f64 block is the embedding, row-major V x E: entry (0,0) then
  // (0,1) is symbol 0's embedding vector.
  double first[2];
  in.read(reinterpret_cast<char*>(first), sizeof first);
  CHECK(first[0] == p.embedding(0, 0));
  CHECK(first[1] == p.embedding(1, 0));
  std::filesystem::remove(path);
}
