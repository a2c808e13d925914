#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace mmmi {

enum class TensorDtype : std::uint16_t { kF32 = 1, kF64 = 2 };

const char* tensor_dtype_name(TensorDtype dtype);
TensorDtype tensor_dtype_from_name(const std::string& name);
std::size_t tensor_dtype_size(TensorDtype dtype);

// In-memory tensor; values are held as doubles regardless of the
// on-disk dtype (f32 payloads widen losslessly).
struct TensorData {
  TensorDtype dtype = TensorDtype::kF64;
  std::vector<std::uint64_t> shape;
  std::vector<double> values;  // row-major

  std::uint64_t element_count() const;
  // Rank-2 (or rank-1, as a column) view of the values.
  Eigen::MatrixXd as_matrix() const;
};

// Streaming writer for the binary tensor format:
//   magic "MMMI" | version u16 | dtype u16 | rank u64 | shape u64... |
//   row-major payload; all integers and values little-endian.
// Bytes go to `<path>.tmp`; finish() renames onto the final path only
// after the full payload arrived, and returns the file's SHA-256.
class TensorWriter {
 public:
  TensorWriter(std::filesystem::path path, TensorDtype dtype,
               std::vector<std::uint64_t> shape);
  ~TensorWriter();
  TensorWriter(TensorWriter&&) noexcept;
  TensorWriter& operator=(TensorWriter&&) noexcept;

  void append(const double* values, std::size_t count);
  // Rows are appended in row-major order.
  void append_rows(const Eigen::MatrixXd& rows);
  void append_column(const Eigen::VectorXd& column);

  // Flush, verify the element count, rename into place; returns the
  // lowercase hex SHA-256 of the complete file.
  std::string finish();
  // Remove the temporary file without finishing (error cleanup).
  void discard() noexcept;

  const std::filesystem::path& path() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TensorData read_tensor(const std::filesystem::path& path);

// Convenience one-shot writers; return the file digest.
std::string write_tensor(const std::filesystem::path& path, TensorDtype dtype,
                         const Eigen::MatrixXd& rows);
std::string write_tensor_column(const std::filesystem::path& path, TensorDtype dtype,
                                const Eigen::VectorXd& column);

}  // namespace mmmi
