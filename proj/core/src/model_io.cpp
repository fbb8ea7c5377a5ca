#include "patchprior/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "atomic_write.hpp"

namespace patchprior {

static_assert(std::endian::native == std::endian::little,
              "GMMP serialization assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'G', 'M', 'M', 'P'};
constexpr std::size_t kHeaderBytes = 4 + 2 + 4 + 4;

template <typename T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& offset) {
  if (offset + sizeof(T) > in.size()) throw TruncatedFile("model file is truncated");
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

std::uint32_t crc32_of(const char* data, std::size_t size) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(size)));
}

}  // namespace

std::string serialize_model(const Gmm& gmm) {
  const std::size_t k = gmm.num_components();
  const std::size_t d = gmm.dim();
  std::string out;
  out.reserve(kHeaderBytes + 8 * (k + k * d + k * d * d) + 4);
  out.append(kMagic, 4);
  put<std::uint16_t>(out, kModelFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (std::size_t j = 0; j < k; ++j) put<double>(out, gmm.weights[static_cast<Eigen::Index>(j)]);
  for (const auto& m : gmm.means) {
    for (Eigen::Index i = 0; i < m.size(); ++i) put<double>(out, m[i]);
  }
  for (const auto& c : gmm.covariances) {
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      for (Eigen::Index col = 0; col < c.cols(); ++col) put<double>(out, c(r, col));
    }
  }
  put<std::uint32_t>(out, crc32_of(out.data(), out.size()));
  return out;
}

Gmm deserialize_model(const std::string& bytes, double psd_floor) {
  if (bytes.size() < 4) throw TruncatedFile("model file is truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw BadMagic("not a GMMP model file");
  std::size_t offset = 4;
  const auto version = get<std::uint16_t>(bytes, offset);
  if (version != kModelFormatVersion) {
    throw VersionMismatch("unsupported GMMP version " + std::to_string(version));
  }
  const std::size_t k = get<std::uint32_t>(bytes, offset);
  const std::size_t d = get<std::uint32_t>(bytes, offset);
  const std::size_t expected = kHeaderBytes + 8 * (k + k * d + k * d * d) + 4;
  if (bytes.size() < expected) throw TruncatedFile("model file is truncated");
  if (bytes.size() > expected) throw ModelFormatError("trailing bytes after model payload");

  std::size_t crc_offset = expected - 4;
  const auto stored_crc = get<std::uint32_t>(bytes, crc_offset);
  if (stored_crc != crc32_of(bytes.data(), expected - 4)) {
    throw ChecksumMismatch("model file CRC check failed");
  }

  Gmm gmm;
  const auto kk = static_cast<Eigen::Index>(k);
  const auto dd = static_cast<Eigen::Index>(d);
  gmm.weights.resize(kk);
  for (Eigen::Index j = 0; j < kk; ++j) gmm.weights[j] = get<double>(bytes, offset);
  gmm.means.assign(k, Eigen::VectorXd(dd));
  for (auto& m : gmm.means) {
    for (Eigen::Index i = 0; i < dd; ++i) m[i] = get<double>(bytes, offset);
  }
  gmm.covariances.assign(k, Eigen::MatrixXd(dd, dd));
  for (auto& c : gmm.covariances) {
    for (Eigen::Index r = 0; r < dd; ++r) {
      for (Eigen::Index col = 0; col < dd; ++col) c(r, col) = get<double>(bytes, offset);
    }
  }
  validate(gmm, psd_floor);
  return gmm;
}

void save_model(const Gmm& gmm, const std::filesystem::path& path) {
  detail::write_file_atomically(path, serialize_model(gmm));
}

Gmm load_model(const std::filesystem::path& path, double psd_floor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes, psd_floor);
}

}  // namespace patchprior
