#include "mmmi/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <utility>

#include "mmmi/errors.hpp"
#include "mmmi/sha256.hpp"

namespace mmmi {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'M', 'I'};
constexpr std::uint16_t kFormatVersion = 1;
constexpr std::size_t kMaxRank = 8;

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint64_t checked_element_count(const std::vector<std::uint64_t>& shape) {
  std::uint64_t count = 1;
  for (const std::uint64_t s : shape) {
    if (s != 0 && count > std::numeric_limits<std::uint64_t>::max() / (s == 0 ? 1 : s)) {
      throw IoError("tensor shape overflows the element counter");
    }
    count *= s;
  }
  return count;
}

}  // namespace

const char* tensor_dtype_name(TensorDtype dtype) {
  switch (dtype) {
    case TensorDtype::kF32: return "f32";
    case TensorDtype::kF64: return "f64";
  }
  return "unknown";
}

TensorDtype tensor_dtype_from_name(const std::string& name) {
  if (name == "f32") return TensorDtype::kF32;
  if (name == "f64") return TensorDtype::kF64;
  throw SpecError("unknown tensor dtype '" + name + "' (expected f32 or f64)");
}

std::size_t tensor_dtype_size(TensorDtype dtype) {
  return dtype == TensorDtype::kF32 ? 4 : 8;
}

std::uint64_t TensorData::element_count() const {
  return checked_element_count(shape);
}

Eigen::MatrixXd TensorData::as_matrix() const {
  if (shape.size() == 1) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(shape[0]), 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = values[static_cast<std::size_t>(i)];
    return m;
  }
  if (shape.size() == 2) {
    const auto rows = static_cast<Eigen::Index>(shape[0]);
    const auto cols = static_cast<Eigen::Index>(shape[1]);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
      }
    }
    return m;
  }
  throw IoError("tensor rank " + std::to_string(shape.size()) +
                " has no matrix view");
}

struct TensorWriter::Impl {
  std::filesystem::path final_path;
  std::filesystem::path tmp_path;
  TensorDtype dtype = TensorDtype::kF64;
  std::uint64_t expected = 0;
  std::uint64_t written = 0;
  std::ofstream out;
  Sha256 hasher;
  bool open = false;

  void write_bytes(const unsigned char* data, std::size_t size) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write failed on " + tmp_path.string());
    hasher.update(data, size);
  }
};

TensorWriter::TensorWriter(std::filesystem::path path, TensorDtype dtype,
                           std::vector<std::uint64_t> shape)
    : impl_(std::make_unique<Impl>()) {
  if (shape.empty() || shape.size() > kMaxRank) {
    throw IoError("tensor rank must be between 1 and " + std::to_string(kMaxRank));
  }
  impl_->final_path = std::move(path);
  impl_->tmp_path = impl_->final_path;
  impl_->tmp_path += ".tmp";
  impl_->dtype = dtype;
  impl_->expected = checked_element_count(shape);
  impl_->out.open(impl_->tmp_path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) {
    throw IoError("cannot open " + impl_->tmp_path.string() + " for writing");
  }
  impl_->open = true;

  std::vector<unsigned char> header;
  header.insert(header.end(), kMagic, kMagic + 4);
  put_u16(header, kFormatVersion);
  put_u16(header, static_cast<std::uint16_t>(dtype));
  put_u64(header, shape.size());
  for (const std::uint64_t s : shape) put_u64(header, s);
  impl_->write_bytes(header.data(), header.size());
}

TensorWriter::~TensorWriter() {
  if (impl_ && impl_->open) discard();
}

TensorWriter::TensorWriter(TensorWriter&&) noexcept = default;
TensorWriter& TensorWriter::operator=(TensorWriter&&) noexcept = default;

const std::filesystem::path& TensorWriter::path() const { return impl_->final_path; }

void TensorWriter::append(const double* values, std::size_t count) {
  if (!impl_->open) throw IoError("tensor writer already finished");
  if (count == 0) return;
  if (impl_->written + count > impl_->expected) {
    throw IoError("tensor payload exceeds the declared shape");
  }
  static_assert(std::endian::native == std::endian::little ||
                    std::endian::native == std::endian::big,
                "mixed-endian platforms are unsupported");
  std::vector<unsigned char> buffer;
  if (impl_->dtype == TensorDtype::kF64) {
    if constexpr (std::endian::native == std::endian::little) {
      impl_->write_bytes(reinterpret_cast<const unsigned char*>(values), 8 * count);
    } else {
      buffer.reserve(8 * count);
      for (std::size_t i = 0; i < count; ++i) {
        put_u64(buffer, std::bit_cast<std::uint64_t>(values[i]));
      }
      impl_->write_bytes(buffer.data(), buffer.size());
    }
  } else {
    buffer.resize(4 * count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto f = static_cast<float>(values[i]);
      std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      if constexpr (std::endian::native == std::endian::big) {
        bits = ((bits & 0xff) << 24) | ((bits & 0xff00) << 8) |
               ((bits >> 8) & 0xff00) | (bits >> 24);
      }
      std::memcpy(buffer.data() + 4 * i, &bits, 4);
    }
    impl_->write_bytes(buffer.data(), buffer.size());
  }
  impl_->written += count;
}

void TensorWriter::append_rows(const Eigen::MatrixXd& rows) {
  // Row-major on disk; Eigen is column-major, so stage each row.
  std::vector<double> staged(static_cast<std::size_t>(rows.cols()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      staged[static_cast<std::size_t>(c)] = rows(r, c);
    }
    append(staged.data(), staged.size());
  }
}

void TensorWriter::append_column(const Eigen::VectorXd& column) {
  append(column.data(), static_cast<std::size_t>(column.size()));
}

std::string TensorWriter::finish() {
  if (!impl_->open) throw IoError("tensor writer already finished");
  if (impl_->written != impl_->expected) {
    throw IoError("tensor payload incomplete: wrote " +
                  std::to_string(impl_->written) + " of " +
                  std::to_string(impl_->expected) + " values");
  }
  impl_->out.flush();
  if (!impl_->out) throw IoError("flush failed on " + impl_->tmp_path.string());
  impl_->out.close();
  impl_->open = false;
  std::error_code ec;
  std::filesystem::rename(impl_->tmp_path, impl_->final_path, ec);
  if (ec) {
    throw IoError("cannot move " + impl_->tmp_path.string() + " into place: " +
                  ec.message());
  }
  return impl_->hasher.hex_digest();
}

void TensorWriter::discard() noexcept {
  if (!impl_) return;
  if (impl_->out.is_open()) impl_->out.close();
  impl_->open = false;
  std::error_code ec;
  std::filesystem::remove(impl_->tmp_path, ec);
}

TensorData read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  const auto read_exact = [&](void* dst, std::size_t size) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in.gcount()) != size) {
      throw IoError(path.string() + " is truncated");
    }
  };
  const auto read_u16 = [&]() {
    unsigned char b[2];
    read_exact(b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  };
  const auto read_u64 = [&]() {
    unsigned char b[8];
    read_exact(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  };

  char magic[4];
  read_exact(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError(path.string() + " is not a tensor file (bad magic)");
  }
  const std::uint16_t version = read_u16();
  if (version != kFormatVersion) {
    throw IoError(path.string() + " has unsupported format version " +
                  std::to_string(version));
  }
  const std::uint16_t dtype_code = read_u16();
  if (dtype_code != 1 && dtype_code != 2) {
    throw IoError(path.string() + " has unknown dtype code " +
                  std::to_string(dtype_code));
  }
  TensorData tensor;
  tensor.dtype = static_cast<TensorDtype>(dtype_code);
  const std::uint64_t rank = read_u64();
  if (rank == 0 || rank > kMaxRank) {
    throw IoError(path.string() + " has invalid rank " + std::to_string(rank));
  }
  tensor.shape.resize(static_cast<std::size_t>(rank));
  for (auto& s : tensor.shape) s = read_u64();

  const std::uint64_t count = checked_element_count(tensor.shape);
  const std::size_t value_size = tensor_dtype_size(tensor.dtype);
  tensor.values.resize(static_cast<std::size_t>(count));
  std::vector<unsigned char> payload(static_cast<std::size_t>(count) * value_size);
  read_exact(payload.data(), payload.size());
  if (in.get() != std::ifstream::traits_type::eof()) {
    throw IoError(path.string() + " has trailing bytes beyond the payload");
  }
  for (std::size_t i = 0; i < tensor.values.size(); ++i) {
    if (tensor.dtype == TensorDtype::kF64) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) bits = (bits << 8) | payload[8 * i + static_cast<std::size_t>(b)];
      tensor.values[i] = std::bit_cast<double>(bits);
    } else {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) bits = (bits << 8) | payload[4 * i + static_cast<std::size_t>(b)];
      tensor.values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return tensor;
}

std::string write_tensor(const std::filesystem::path& path, TensorDtype dtype,
                         const Eigen::MatrixXd& rows) {
  TensorWriter writer(path, dtype,
                      {static_cast<std::uint64_t>(rows.rows()),
                       static_cast<std::uint64_t>(rows.cols())});
  writer.append_rows(rows);
  return writer.finish();
}

std::string write_tensor_column(const std::filesystem::path& path, TensorDtype dtype,
                                const Eigen::VectorXd& column) {
  TensorWriter writer(path, dtype, {static_cast<std::uint64_t>(column.size())});
  writer.append_column(column);
  return writer.finish();
}

}  // namespace mmmi
