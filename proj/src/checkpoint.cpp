#include "qkt/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "qkt/errors.hpp"
#include "qkt/hash.hpp"

namespace qkt {

namespace {

constexpr std::array<char, 8> kMagic = {'Q', 'K', 'T', 'C', 'K', 'P', 'T', '\0'};

class Writer {
public:
  template <typename T> void put(const T& value) {
    const auto* p = reinterpret_cast<const unsigned char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_vector(const Eigen::VectorXcd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      put(v(i).real());
      put(v(i).imag());
    }
  }
  std::vector<unsigned char>& bytes() { return bytes_; }

private:
  std::vector<unsigned char> bytes_;
};

class Reader {
public:
  Reader(const std::vector<unsigned char>& bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}
  template <typename T> T get() {
    if (pos_ + sizeof(T) > limit_) throw DomainError("checkpoint: truncated file");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  Eigen::VectorXcd get_vector(Eigen::Index size) {
    Eigen::VectorXcd v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const double re = get<double>();
      const double im = get<double>();
      v(i) = {re, im};
    }
    return v;
  }
  std::size_t position() const { return pos_; }

private:
  const std::vector<unsigned char>& bytes_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

} // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto& state = ckpt.snapshot.state;
  Writer w;
  for (char ch : kMagic) w.put(ch);
  w.put(kCheckpointVersion);
  w.put(ckpt.config_hash);
  w.put(static_cast<std::uint32_t>(state.basis.n_qubits()));
  w.put(ckpt.kappa);
  w.put(ckpt.alpha);
  w.put(static_cast<std::int64_t>(ckpt.snapshot.t));
  w.put_vector(state.c);
  w.put_vector(state.dc);
  const std::uint64_t sum = fnv1a(w.bytes());
  w.put(sum);

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    out.flush();
    if (!out) throw std::runtime_error("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("checkpoint: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kMagic.size() + sizeof(std::uint64_t)) throw DomainError("checkpoint: truncated file");

  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (stored != fnv1a(std::span(bytes.data(), body))) throw DomainError("checkpoint: checksum mismatch");

  Reader r(bytes, body);
  for (char ch : kMagic) {
    if (r.get<char>() != ch) throw DomainError("checkpoint: bad magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DomainError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto config_hash = r.get<std::uint64_t>();
  const auto n = static_cast<int>(r.get<std::uint32_t>());
  const auto kappa = r.get<double>();
  const auto alpha = r.get<double>();
  const auto t = r.get<std::int64_t>();
  const SpinBasis basis(n);
  auto c = r.get_vector(basis.dim());
  auto dc = r.get_vector(basis.dim());
  if (r.position() != body) throw DomainError("checkpoint: trailing bytes");
  return Checkpoint{config_hash, kappa, alpha, Snapshot{t, DickeState{basis, std::move(c), std::move(dc)}}};
}

} // namespace qkt
