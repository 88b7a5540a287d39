#include "ged/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace ged {
namespace {

constexpr char kMagic[8] = {'G', 'E', 'D', 'M', 'O', 'D', 'L', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(bits >> (8 * i) & 0xff));
}

struct Reader {
  std::string buffer;
  std::size_t pos = 0;
  std::string path;

  void need(std::size_t bytes, const char* what) {
    if (pos + bytes > buffer.size()) {
      throw std::runtime_error(path + ": truncated checkpoint while reading " +
                               what);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buffer[pos + static_cast<std::size_t>(i)]))
           << (8 * i);
    }
    pos += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buffer[pos + static_cast<std::size_t>(i)]))
           << (8 * i);
    }
    pos += 8;
    return std::bit_cast<double>(v);
  }
  std::string bytes(std::size_t count, const char* what) {
    need(count, what);
    std::string s = buffer.substr(pos, count);
    pos += count;
    return s;
  }
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.meta.size()));
  out.append(ckpt.meta);
  put_u32(out, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const NamedTensor& arr : ckpt.arrays) {
    put_u32(out, static_cast<std::uint32_t>(arr.name.size()));
    out.append(arr.name);
    put_u32(out, static_cast<std::uint32_t>(arr.value.rows));
    put_u32(out, static_cast<std::uint32_t>(arr.value.cols));
    for (double v : arr.value.data) put_f64(out, v);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path);
  Reader r;
  r.path = path;
  r.buffer.assign(std::istreambuf_iterator<char>(file),
                  std::istreambuf_iterator<char>());

  const std::string magic = r.bytes(sizeof(kMagic), "magic");
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path + ": not a model checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  }

  Checkpoint ckpt;
  ckpt.meta = r.bytes(r.u32("meta length"), "meta");
  const std::uint32_t count = r.u32("array count");
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor arr;
    arr.name = r.bytes(r.u32("array name length"), "array name");
    const std::uint32_t rows = r.u32("rows");
    const std::uint32_t cols = r.u32("cols");
    if (rows > 1u << 24 || cols > 1u << 24) {
      throw std::runtime_error(path + ": implausible array shape in " + arr.name);
    }
    arr.value = Tensor(static_cast<int>(rows), static_cast<int>(cols));
    for (double& v : arr.value.data) v = r.f64(arr.name.c_str());
    ckpt.arrays.push_back(std::move(arr));
  }
  if (r.pos != r.buffer.size()) {
    throw std::runtime_error(path + ": trailing bytes after checkpoint payload");
  }
  return ckpt;
}

}  // namespace ged
