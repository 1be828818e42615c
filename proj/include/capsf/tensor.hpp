#pragma once

#include <Eigen/Dense>

#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsf {

class Tape;

using Vec = Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense 64-bit float tensor with row-major storage.
///
/// A Tensor is a plain value unless it was produced by an op applied to
/// tape-attached operands, in which case it also carries a handle to its
/// node so the gradient can be looked up after Tape::backward().
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, Vec data);
  Tensor(std::vector<int> shape, std::initializer_list<double> values);

  static Tensor scalar(double v);
  static Tensor vector(std::initializer_list<double> values);
  static Tensor matrix(int rows, int cols, std::initializer_list<double> values);
  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double v);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int size() const { return static_cast<int>(data_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

  double& operator[](int flat) { return data_[flat]; }
  double operator[](int flat) const { return data_[flat]; }
  double operator()(int i) const { return data_[i]; }
  double operator()(int i, int j) const { return data_[i * dim(1) + j]; }
  double operator()(int i, int j, int k) const {
    return data_[(i * dim(1) + j) * dim(2) + k];
  }
  double operator()(int i, int j, int k, int l) const {
    return data_[((i * dim(1) + j) * dim(2) + k) * dim(3) + l];
  }
  double& ref(int i) { return data_[i]; }
  double& ref(int i, int j) { return data_[i * dim(1) + j]; }
  double& ref(int i, int j, int k) { return data_[(i * dim(1) + j) * dim(2) + k]; }
  double& ref(int i, int j, int k, int l) {
    return data_[((i * dim(1) + j) * dim(2) + k) * dim(3) + l];
  }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  /// Rank-2 view (rows = dim(0), cols = dim(1)).
  Eigen::Map<const RowMat> mat() const;
  Eigen::Map<RowMat> mat();
  /// View of the flat data as a rows*cols row-major matrix.
  Eigen::Map<const RowMat> mat_as(int rows, int cols) const;

  bool attached() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }
  /// Value copy with no tape handle.
  Tensor detached() const;

  bool all_finite() const;

 private:
  friend class Tape;
  std::vector<int> shape_;
  Vec data_;
  Tape* tape_ = nullptr;
  int node_ = -1;
};

enum class Op {
  kLeaf,
  kAdd,
  kMatmul,
  kHadamard,
  kRelu,
  kSigmoid,
  kSoftmaxRows,
  kSum,
  kScale,
  kConcat,
  kStackRows,
  kReshape,
  kGatherRows,
  kTakeRow,
  kSquashRows,
  kCapsPredict,
  kCapsWeightedSum,
  kCapsAgreement,
  kBce,
};

/// One recorded primitive application. Inputs refer to earlier nodes only.
struct Node {
  Op op;
  std::vector<int> inputs;
  Tensor value;            // saved forward result
  std::vector<int> iargs;  // op-specific: gathered ids, row index, split point
  double darg = 0.0;       // op-specific: scale factor, BCE target
};

/// Append-only record of forward primitives for reverse-mode differentiation.
/// Single-threaded during forward and backward; use one Tape per thread.
class Tape {
 public:
  /// Attach a value as a differentiable leaf (parameter or constant).
  Tensor leaf(const Tensor& value);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Tensor& value(int node) const;

  /// Reverse traversal from a scalar loss node. Populates the gradient of
  /// every node reachable from the loss; resets any previous gradients.
  void backward(const Tensor& loss);

  /// Gradient of the last backward() loss w.r.t. an attached tensor.
  /// Unreached nodes get a zero gradient of the node's value shape.
  Tensor grad(const Tensor& t) const;

  // Recording plumbing used by the op free functions.
  Tensor emit(Op op, std::vector<int> inputs, Tensor value,
              std::vector<int> iargs = {}, double darg = 0.0);
  int ensure_node(const Tensor& t);

 private:
  void accumulate(int node, const Vec& g);
  void backprop_node(int n);

  std::vector<Node> nodes_;
  std::vector<Vec> grads_;  // parallel to nodes_; zero-size = not reached
  bool ran_backward_ = false;
};

// ---- Recorded primitives -------------------------------------------------
// Each works on detached values too: if no operand is attached the result is
// a plain value and nothing is recorded.

Tensor add(const Tensor& a, const Tensor& b);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
/// Row-wise softmax with max-subtraction; a rank-1 tensor is one row.
Tensor softmax_rows(const Tensor& a);
Tensor sum(const Tensor& a);
Tensor scale(const Tensor& a, double c);
/// Concatenate two rank-1 tensors.
Tensor concat(const Tensor& a, const Tensor& b);
/// Stack equal-length rank-1 tensors into a matrix, one per row.
Tensor stack_rows(const std::vector<Tensor>& rows);
Tensor reshape(const Tensor& a, std::vector<int> shape);
/// Rows of a rank-2 table selected by index, in order. Gradient scatters.
Tensor gather_rows(const Tensor& table, const std::vector<int>& ids);
Tensor take_row(const Tensor& m, int row);
/// Per-row squash v = s * ||s|| / (1 + ||s||^2); squash(0) = 0.
Tensor squash_rows(const Tensor& s);
/// Capsule votes: u_hat[i][j] = W[i][j] (d_out x d_in) * u[i].
Tensor caps_predict(const Tensor& w, const Tensor& u);
/// s[j] = sum_i c[i][j] * u_hat[i][j].
Tensor caps_weighted_sum(const Tensor& c, const Tensor& u_hat);
/// a[i][j] = dot(u_hat[i][j], v[j]).
Tensor caps_agreement(const Tensor& u_hat, const Tensor& v);
/// Binary cross-entropy of a probability (shape [1]) against target y,
/// with the probability clamped to [1e-12, 1 - 1e-12].
Tensor bce(const Tensor& p, double y);

// ---- Gradient checking ---------------------------------------------------

struct GradCheckReport {
  double max_rel_error = 0.0;
  int worst_param = -1;   // index into the params vector
  int worst_entry = -1;   // flat index within that parameter
  double analytic = 0.0;  // at the worst entry
  double numeric = 0.0;
  int entries = 0;
  bool pass(double tolerance) const { return max_rel_error < tolerance; }
};

/// Compares the recorded gradient of f against central finite differences
/// (f(x+eps) - f(x-eps)) / 2eps for every entry of every parameter.
/// f must return a scalar produced from the attached parameters it is given.
/// Relative error uses denominator max(|analytic|, |numeric|, 1e-6), so
/// near-zero pairs compare absolutely and an all-zero pair scores 0.
GradCheckReport grad_check(
    const std::function<Tensor(Tape&, const std::vector<Tensor>&)>& f,
    const std::vector<Tensor>& params, double epsilon, double tolerance);

}  // namespace capsf
