#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qkt/checkpoint.hpp"
#include "qkt/errors.hpp"
#include "qkt/hash.hpp"

using namespace qkt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qkt_unit_ckpt";
  fs::create_directories(dir);
  return dir / name;
}

Checkpoint sample() {
  const SpinBasis b(16);
  const auto prop = build_propagator(b, 3.0);
  Snapshot snap{0, coherent_state(b, 2.56, 2.31)};
  for (int i = 0; i < 9; ++i) snap = step(prop, snap);
  return {0x0123456789abcdefULL, 3.0, prop.alpha(), snap};
}

std::vector<char> bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<char>& b) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
}

} // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a(std::string_view("")) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a(std::string_view("a")) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a(std::string_view("foobar")) == 0x85944171f73967e8ULL);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto ckpt = sample();
  const auto path = scratch("roundtrip.ckpt");
  save_checkpoint(path, ckpt);
  CHECK_FALSE(fs::exists(fs::path(path.string() + ".tmp")));
  const auto back = load_checkpoint(path);
  CHECK(back.config_hash == ckpt.config_hash);
  CHECK(back.kappa == 3.0);
  CHECK(back.alpha == ckpt.alpha);
  CHECK(back.snapshot.t == 9);
  CHECK(back.snapshot.state.basis == ckpt.snapshot.state.basis);
  CHECK(back.snapshot.state.c == ckpt.snapshot.state.c);
  CHECK(back.snapshot.state.dc == ckpt.snapshot.state.dc);
  // 8 magic + 4 version + 8 hash + 4 N + 8 + 8 + 8 + 2 * 17 * 16 + 8 checksum
  CHECK(fs::file_size(path) == 8 + 4 + 8 + 4 + 8 + 8 + 8 + 2 * 17 * 16 + 8);
}

TEST_CASE("damaged checkpoints are rejected") {
  const auto path = scratch("damaged.ckpt");
  save_checkpoint(path, sample());
  const auto good = bytes_of(path);

  auto flipped = good;
  flipped[100] ^= 0x01;
  write_bytes(path, flipped);
  CHECK_THROWS_AS(load_checkpoint(path), DomainError);

  auto truncated = good;
  truncated.resize(good.size() - 20);
  write_bytes(path, truncated);
  CHECK_THROWS_AS(load_checkpoint(path), DomainError);

  auto versioned = good;
  versioned[8] = 2;
  // re-seal so that only the version is wrong
  versioned.resize(good.size() - 8);
  const std::uint64_t sum = fnv1a(std::span(reinterpret_cast<const unsigned char*>(versioned.data()), versioned.size()));
  const auto* sb = reinterpret_cast<const char*>(&sum);
  versioned.insert(versioned.end(), sb, sb + 8);
  write_bytes(path, versioned);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("version"), DomainError);

  CHECK_THROWS_AS(load_checkpoint(scratch("missing.ckpt")), DomainError);
}
