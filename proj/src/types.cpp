#include "evsel/types.hpp"

namespace evsel {

FeatureBank FeatureBank::create(std::string name, Eigen::MatrixXd data) {
  if (data.rows() < 1 || data.cols() < 1)
    raise(ErrorCode::argument, "feature bank '" + name + "' must have at least one row and column");
  if (!data.allFinite())
    raise(ErrorCode::argument, "feature bank '" + name + "' contains non-finite entries");
  return FeatureBank{std::move(name), std::move(data)};
}

Index LabelMatrix::positives(Index k) const {
  Index count = 0;
  for (Index n = 0; n < data.rows(); ++n) count += data(n, k);
  return count;
}

bool LabelMatrix::is_one_hot() const {
  for (Index n = 0; n < data.rows(); ++n) {
    Index row_sum = 0;
    for (Index k = 0; k < data.cols(); ++k) row_sum += data(n, k);
    if (row_sum != 1) return false;
  }
  return true;
}

LabelMatrix LabelMatrix::create(Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> data) {
  if (data.rows() < 1 || data.cols() < 1)
    raise(ErrorCode::argument, "label matrix must have at least one row and column");
  for (Index n = 0; n < data.rows(); ++n)
    for (Index k = 0; k < data.cols(); ++k)
      if (data(n, k) > 1)
        raise(ErrorCode::argument, "label entry at (" + std::to_string(n) + ", " +
                                       std::to_string(k) + ") is not 0 or 1");
  return LabelMatrix{std::move(data)};
}

void LabelMatrix::require_trainable() const {
  for (Index k = 0; k < classes(); ++k) {
    const Index pos = positives(k);
    if (pos == 0)
      raise(ErrorCode::argument, "class " + std::to_string(k) + " has no positive example");
    if (pos == count())
      raise(ErrorCode::argument, "class " + std::to_string(k) + " has no negative example");
  }
}

}  // namespace evsel
