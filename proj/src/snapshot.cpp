#include "ealab/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ealab {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b)
    out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

class Reader {
public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    need(4, "header");
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b)
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(bytes_[pos_ + b]))
           << (8 * b);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8, "payload");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(bytes_[pos_ + b]))
              << (8 * b);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::string raw(std::size_t count, const char* what) {
    need(count, what);
    std::string out = bytes_.substr(pos_, count);
    pos_ += count;
    return out;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

private:
  void need(std::size_t count, const char* what) {
    if (bytes_.size() - pos_ < count)
      throw std::runtime_error(std::string("snapshot: truncated ") + what);
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const SpectralField& field, const std::string& path,
                   double timestamp) {
  const Grid& g = field.grid();
  std::string out;
  out.reserve(4 + 4 * (3 + static_cast<std::size_t>(g.dim())) + 8 +
              8 * field.phys().size());
  out += "EAFS";
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  put_u32(out, static_cast<std::uint32_t>(field.rank()));
  for (int a = 0; a < g.dim(); ++a)
    put_u32(out, static_cast<std::uint32_t>(g.n()));
  put_f64(out, timestamp);
  for (double v : field.phys()) put_f64(out, v);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("snapshot: cannot open for write: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  file.flush();
  if (!file) throw std::runtime_error("snapshot: write failed: " + path);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("snapshot: cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(file)),
                    std::istreambuf_iterator<char>());
  Reader in(std::move(bytes));

  if (in.raw(4, "magic") != "EAFS")
    throw std::runtime_error("snapshot: magic mismatch (not an EAFS file)");
  const std::uint32_t version = in.u32();
  if (version != kSnapshotVersion)
    throw std::runtime_error("snapshot: unsupported version " +
                             std::to_string(version));
  const std::uint32_t dim = in.u32();
  if (dim != 2 && dim != 3)
    throw std::runtime_error("snapshot: dim must be 2 or 3, got " +
                             std::to_string(dim));
  const std::uint32_t rank = in.u32();
  if (rank > 2)
    throw std::runtime_error("snapshot: rank must be 0, 1, or 2, got " +
                             std::to_string(rank));
  const std::uint32_t res0 = in.u32();
  for (std::uint32_t a = 1; a < dim; ++a) {
    const std::uint32_t res = in.u32();
    if (res != res0)
      throw std::runtime_error("snapshot: anisotropic resolutions unsupported");
  }
  const double timestamp = in.f64();

  Grid grid(static_cast<int>(dim), static_cast<int>(res0));
  std::size_t count = 1;
  for (std::uint32_t a = 0; a < rank; ++a) count *= dim;
  count *= grid.points();

  std::vector<double> payload(count);
  for (std::size_t i = 0; i < count; ++i) payload[i] = in.f64();
  if (!in.exhausted())
    throw std::runtime_error("snapshot: trailing bytes after payload");

  return Snapshot{SpectralField::from_physical(grid, static_cast<int>(rank),
                                               std::move(payload)),
                  timestamp};
}

}  // namespace ealab
