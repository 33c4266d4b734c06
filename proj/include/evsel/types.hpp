#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace evsel {

using Index = Eigen::Index;

enum class ErrorCode {
  argument,          // bad input value or precondition violation
  dimension,         // shape mismatch between operands
  io,                // filesystem / stream failure
  format,            // malformed file contents
  degenerate_fit,    // evidence denominator collapse (targets perfectly interpolated)
  degenerate_class,  // class carries no usable signal (h == 0, X y == 0)
  numerical,         // solver failure
  unconverged,       // iteration budget exhausted where convergence is required
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

/// Immutable D x N feature matrix, one sample per column.
struct FeatureBank {
  std::string name;
  Eigen::MatrixXd data;  // D rows (feature dims) x N cols (samples)

  Index dim() const { return data.rows(); }
  Index count() const { return data.cols(); }

  // Validates finiteness and nonempty shape.
  static FeatureBank create(std::string name, Eigen::MatrixXd data);
};

/// N x K binary indicator targets (one column per class).
struct LabelMatrix {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> data;  // N x K, entries in {0,1}

  Index count() const { return data.rows(); }
  Index classes() const { return data.cols(); }

  Eigen::VectorXd class_column(Index k) const { return data.col(k).cast<double>(); }
  Index positives(Index k) const;
  bool is_one_hot() const;

  static LabelMatrix create(Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> data);

  // Every class column must contain at least one 1 and one 0. Called at
  // training entry points; throws ErrorCode::argument otherwise.
  void require_trainable() const;
};

enum class TaskMode { single_label, multi_label };

}  // namespace evsel
