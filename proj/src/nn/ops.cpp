#include "seg/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "seg/error.hpp"

namespace seg::nn {

namespace {

Tape& same_tape(Var a, Var b, const char* op) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw InvalidInputError(std::string(op) + ": operands live on different tapes");
  }
  return *a.tape;
}

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " +
                   b.shape_str());
}

// c += a * b
void gemm_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.row(i).data();
    const double* ai = a.row(i).data();
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < p; ++j) ci[j] += aik * bk[j];
    }
  }
}

}  // namespace

Tensor SparseMatrix::to_dense() const {
  Tensor d(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t e = offsets[r]; e < offsets[r + 1]; ++e) d(r, indices[e]) += weights[e];
  }
  return d;
}

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b, "matmul");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_mismatch("matmul", av, bv);
  Tensor out(av.rows(), bv.cols());
  gemm_acc(av, bv, out);
  return t.record("matmul", std::move(out), {a.id, b.id}, [a, b](Tape& tp, const Tensor& g) {
    const Tensor& A = tp.value(a);
    const Tensor& B = tp.value(b);
    if (tp.requires_grad(a)) {
      // dA = g * B^T
      Tensor da(A.rows(), A.cols());
      for (std::size_t i = 0; i < A.rows(); ++i) {
        const double* gi = g.row(i).data();
        for (std::size_t k = 0; k < A.cols(); ++k) {
          const double* bk = B.row(k).data();
          double s = 0.0;
          for (std::size_t j = 0; j < B.cols(); ++j) s += gi[j] * bk[j];
          da(i, k) = s;
        }
      }
      tp.accumulate(a.id, da);
    }
    if (tp.requires_grad(b)) {
      // dB = A^T * g
      Tensor db(B.rows(), B.cols());
      for (std::size_t i = 0; i < A.rows(); ++i) {
        const double* gi = g.row(i).data();
        for (std::size_t k = 0; k < A.cols(); ++k) {
          const double aik = A(i, k);
          if (aik == 0.0) continue;
          double* dbk = db.row(k).data();
          for (std::size_t j = 0; j < B.cols(); ++j) dbk[j] += aik * gi[j];
        }
      }
      tp.accumulate(b.id, db);
    }
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b, "add");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_mismatch("add", av, bv);
  Tensor out = av;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += bv[k];
  return t.record("add", std::move(out), {a.id, b.id}, [a, b](Tape& tp, const Tensor& g) {
    tp.accumulate(a.id, g);
    tp.accumulate(b.id, g);
  });
}

Var add_bias(Var a, Var bias) {
  Tape& t = same_tape(a, bias, "add_bias");
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != av.cols()) shape_mismatch("add_bias", av, bv);
  Tensor out = av;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv[c];
  }
  return t.record("add_bias", std::move(out), {a.id, bias.id}, [a, bias](Tape& tp, const Tensor& g) {
    tp.accumulate(a.id, g);
    if (tp.requires_grad(bias)) {
      Tensor db(1, g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) db[c] += g(r, c);
      }
      tp.accumulate(bias.id, db);
    }
  });
}

Var hadamard(Var a, Var b) {
  Tape& t = same_tape(a, b, "hadamard");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_mismatch("hadamard", av, bv);
  Tensor out = av;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= bv[k];
  return t.record("hadamard", std::move(out), {a.id, b.id}, [a, b](Tape& tp, const Tensor& g) {
    const Tensor& A = tp.value(a);
    const Tensor& B = tp.value(b);
    if (tp.requires_grad(a)) {
      Tensor da = g;
      for (std::size_t k = 0; k < da.size(); ++k) da[k] *= B[k];
      tp.accumulate(a.id, da);
    }
    if (tp.requires_grad(b)) {
      Tensor db = g;
      for (std::size_t k = 0; k < db.size(); ++k) db[k] *= A[k];
      tp.accumulate(b.id, db);
    }
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& x : out.data()) x *= s;
  return a.tape->record("scale", std::move(out), {a.id}, [a, s](Tape& tp, const Tensor& g) {
    Tensor da = g;
    for (double& x : da.data()) x *= s;
    tp.accumulate(a.id, da);
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
  return a.tape->record("relu", std::move(out), {a.id}, [a](Tape& tp, const Tensor& g) {
    const Tensor& in = tp.value(a);
    Tensor da = g;
    for (std::size_t k = 0; k < da.size(); ++k) {
      if (!(in[k] > 0.0)) da[k] = 0.0;
    }
    tp.accumulate(a.id, da);
  });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double& x : out.data()) x = std::tanh(x);
  const std::size_t out_id = a.tape->size();
  return a.tape->record("tanh", std::move(out), {a.id}, [a, out_id](Tape& tp, const Tensor& g) {
    const Tensor& y = tp.value(Var{&tp, out_id});
    Tensor da = g;
    for (std::size_t k = 0; k < da.size(); ++k) da[k] *= 1.0 - y[k] * y[k];
    tp.accumulate(a.id, da);
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& x : out.data()) {
    // Split form avoids overflow of exp for large |x|.
    x = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  const std::size_t out_id = a.tape->size();
  return a.tape->record("sigmoid", std::move(out), {a.id}, [a, out_id](Tape& tp, const Tensor& g) {
    const Tensor& y = tp.value(Var{&tp, out_id});
    Tensor da = g;
    for (std::size_t k = 0; k < da.size(); ++k) da[k] *= y[k] * (1.0 - y[k]);
    tp.accumulate(a.id, da);
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  return a.tape->record("sum", Tensor::scalar(s), {a.id}, [a](Tape& tp, const Tensor& g) {
    const Tensor& in = tp.value(a);
    tp.accumulate(a.id, Tensor(in.rows(), in.cols(), g[0]));
  });
}

Var select_rows(Var a, std::span<const long> rows) {
  const Tensor& av = a.value();
  Tensor out(rows.size(), av.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0) continue;
    if (static_cast<std::size_t>(rows[r]) >= av.rows()) {
      throw ShapeError("select_rows: row " + std::to_string(rows[r]) + " out of range for " +
                       av.shape_str());
    }
    auto src = av.row(static_cast<std::size_t>(rows[r]));
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  std::vector<long> idx(rows.begin(), rows.end());
  return a.tape->record("select_rows", std::move(out), {a.id},
                        [a, idx = std::move(idx)](Tape& tp, const Tensor& g) {
                          const Tensor& in = tp.value(a);
                          Tensor da(in.rows(), in.cols());
                          for (std::size_t r = 0; r < idx.size(); ++r) {
                            if (idx[r] < 0) continue;
                            auto dst = da.row(static_cast<std::size_t>(idx[r]));
                            auto src = g.row(r);
                            for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
                          }
                          tp.accumulate(a.id, da);
                        });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidInputError("concat_cols of nothing");
  Tape& t = *parts[0].tape;
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  for (Var p : parts) {
    if (p.rows() != rows) shape_mismatch("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
    ids.push_back(p.id);
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(v.row(r).begin(), v.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(off));
    }
    off += v.cols();
  }
  std::vector<Var> vars(parts.begin(), parts.end());
  return t.record("concat_cols", std::move(out), ids, [vars](Tape& tp, const Tensor& g) {
    std::size_t off = 0;
    for (Var p : vars) {
      const Tensor& v = tp.value(p);
      if (tp.requires_grad(p)) {
        Tensor dp(v.rows(), v.cols());
        for (std::size_t r = 0; r < v.rows(); ++r) {
          auto src = g.row(r).subspan(off, v.cols());
          std::copy(src.begin(), src.end(), dp.row(r).begin());
        }
        tp.accumulate(p.id, dp);
      }
      off += v.cols();
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidInputError("concat_rows of nothing");
  Tape& t = *parts[0].tape;
  const std::size_t cols = parts[0].cols();
  std::vector<double> data;
  std::vector<std::size_t> ids;
  for (Var p : parts) {
    if (p.cols() != cols) shape_mismatch("concat_rows", parts[0].value(), p.value());
    data.insert(data.end(), p.value().data().begin(), p.value().data().end());
    ids.push_back(p.id);
  }
  const std::size_t rows = data.size() / cols;
  std::vector<Var> vars(parts.begin(), parts.end());
  return t.record("concat_rows", Tensor(rows, cols, std::move(data)), ids,
                  [vars](Tape& tp, const Tensor& g) {
                    std::size_t off = 0;
                    for (Var p : vars) {
                      const Tensor& v = tp.value(p);
                      if (tp.requires_grad(p)) {
                        std::vector<double> d(g.data().begin() + static_cast<std::ptrdiff_t>(off),
                                              g.data().begin() + static_cast<std::ptrdiff_t>(off + v.size()));
                        tp.accumulate(p.id, Tensor(v.rows(), v.cols(), std::move(d)));
                      }
                      off += v.size();
                    }
                  });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor& av = a.value();
  if (rows * cols != av.size()) {
    throw ShapeError("reshape: cannot view " + av.shape_str() + " as " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  }
  return a.tape->record("reshape", Tensor(rows, cols, av.data()), {a.id},
                        [a](Tape& tp, const Tensor& g) {
                          const Tensor& in = tp.value(a);
                          tp.accumulate(a.id, Tensor(in.rows(), in.cols(), g.data()));
                        });
}

Var spmm(std::shared_ptr<const SparseMatrix> s, Var x) {
  const Tensor& xv = x.value();
  if (s->cols != xv.rows()) {
    throw ShapeError("spmm: sparse " + std::to_string(s->rows) + "x" + std::to_string(s->cols) +
                     " times " + xv.shape_str());
  }
  Tensor out(s->rows, xv.cols());
  for (std::size_t r = 0; r < s->rows; ++r) {
    auto dst = out.row(r);
    for (std::size_t e = s->offsets[r]; e < s->offsets[r + 1]; ++e) {
      const double w = s->weights[e];
      auto src = xv.row(s->indices[e]);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * src[c];
    }
  }
  return x.tape->record("spmm", std::move(out), {x.id}, [s, x](Tape& tp, const Tensor& g) {
    const Tensor& in = tp.value(x);
    Tensor dx(in.rows(), in.cols());
    for (std::size_t r = 0; r < s->rows; ++r) {
      auto src = g.row(r);
      for (std::size_t e = s->offsets[r]; e < s->offsets[r + 1]; ++e) {
        const double w = s->weights[e];
        auto dst = dx.row(s->indices[e]);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * src[c];
      }
    }
    tp.accumulate(x.id, dx);
  });
}

Var bce(Var probs, std::span<const double> labels) {
  const Tensor& p = probs.value();
  if (p.size() == 0 || labels.empty()) throw InvalidInputError("bce: empty batch");
  if (p.size() != labels.size()) {
    throw ShapeError("bce: " + std::to_string(p.size()) + " scores for " +
                     std::to_string(labels.size()) + " labels");
  }
  const double n = static_cast<double>(p.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double s = std::clamp(p[k], kProbClamp, 1.0 - kProbClamp);
    const double y = labels[k];
    loss += -y * std::log(s) - (1.0 - y) * std::log(1.0 - s);
  }
  std::vector<double> y(labels.begin(), labels.end());
  return probs.tape->record("bce", Tensor::scalar(loss / n), {probs.id},
                            [probs, y = std::move(y), n](Tape& tp, const Tensor& g) {
                              const Tensor& pv = tp.value(probs);
                              Tensor dp(pv.rows(), pv.cols());
                              for (std::size_t k = 0; k < pv.size(); ++k) {
                                const double s = pv[k];
                                if (s < kProbClamp || s > 1.0 - kProbClamp) continue;
                                dp[k] = g[0] * (-y[k] / s + (1.0 - y[k]) / (1.0 - s)) / n;
                              }
                              tp.accumulate(probs.id, dp);
                            });
}

}  // namespace seg::nn
