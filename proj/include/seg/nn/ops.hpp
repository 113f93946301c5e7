#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "seg/nn/tape.hpp"

namespace seg::nn {

/// Constant sparse matrix in CSR form (row -> (col, weight) entries).
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> indices;
  std::vector<double> weights;

  Tensor to_dense() const;
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
/// a (n x c) + bias (1 x c) broadcast over rows.
Var add_bias(Var a, Var bias);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
Var relu(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var sum(Var a);

/// Row gather; index -1 yields a zero row.
Var select_rows(Var a, std::span<const long> rows);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var reshape(Var a, std::size_t rows, std::size_t cols);

/// s * x for a constant sparse s.
Var spmm(std::shared_ptr<const SparseMatrix> s, Var x);

/// Mean binary cross-entropy of probabilities (n x 1 or 1 x n) against 0/1
/// labels. Probabilities are clamped to [1e-12, 1 - 1e-12]. Throws
/// InvalidInputError on an empty batch.
Var bce(Var probs, std::span<const double> labels);

inline constexpr double kProbClamp = 1e-12;

}  // namespace seg::nn
