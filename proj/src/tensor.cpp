#include "capsf/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

namespace capsf {

namespace {

constexpr double kBceClamp = 1e-12;

int64_t numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

void check_extents(const std::vector<int>& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must have rank >= 1");
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor extents must be positive");
  }
}

std::string shape_to_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              a.shape_str() + " and " + b.shape_str());
}

// Resolves the tape shared by the operands; detached operands are attached
// as leaves on demand. All attached operands must share one tape.
Tape* common_tape(std::initializer_list<const Tensor*> ts) {
  Tape* tape = nullptr;
  for (const Tensor* t : ts) {
    if (!t->attached()) continue;
    if (tape == nullptr) {
      tape = t->tape();
    } else if (tape != t->tape()) {
      throw std::invalid_argument("operands recorded on different tapes");
    }
  }
  return tape;
}

Tensor record(Op op, std::initializer_list<const Tensor*> ins, Tensor out,
              std::vector<int> iargs = {}, double darg = 0.0) {
  Tape* tape = common_tape(ins);
  if (tape == nullptr) return out;
  std::vector<int> ids;
  ids.reserve(ins.size());
  for (const Tensor* t : ins) ids.push_back(tape->ensure_node(*t));
  return tape->emit(op, std::move(ids), std::move(out), std::move(iargs), darg);
}

}  // namespace

// ---- Tensor ----------------------------------------------------------------

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_ = Vec::Zero(numel(shape_));
}

Tensor::Tensor(std::vector<int> shape, Vec data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (numel(shape_) != data_.size()) {
    throw std::invalid_argument("tensor data length does not match shape " +
                                shape_to_str(shape_));
  }
}

Tensor::Tensor(std::vector<int> shape, std::initializer_list<double> values)
    : Tensor(std::move(shape), Eigen::Map<const Vec>(values.begin(),
                                                     static_cast<int64_t>(values.size()))) {}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({static_cast<int>(values.size())}, values);
}

Tensor Tensor::matrix(int rows, int cols, std::initializer_list<double> values) {
  return Tensor({rows, cols}, values);
}

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, double v) {
  check_extents(shape);
  Vec data = Vec::Constant(numel(shape), v);
  return Tensor(std::move(shape), std::move(data));
}

std::string Tensor::shape_str() const { return shape_to_str(shape_); }

Eigen::Map<const RowMat> Tensor::mat() const {
  if (rank() != 2) throw std::invalid_argument("mat(): tensor rank is not 2");
  return {data_.data(), dim(0), dim(1)};
}

Eigen::Map<RowMat> Tensor::mat() {
  if (rank() != 2) throw std::invalid_argument("mat(): tensor rank is not 2");
  return {data_.data(), dim(0), dim(1)};
}

Eigen::Map<const RowMat> Tensor::mat_as(int rows, int cols) const {
  if (static_cast<int64_t>(rows) * cols != data_.size()) {
    throw std::invalid_argument("mat_as(): element count mismatch");
  }
  return {data_.data(), rows, cols};
}

Tensor Tensor::detached() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = data_;
  return t;
}

bool Tensor::all_finite() const { return data_.allFinite(); }

// ---- Tape ------------------------------------------------------------------

Tensor Tape::leaf(const Tensor& value) {
  return emit(Op::kLeaf, {}, value.detached());
}

const Tensor& Tape::value(int node) const {
  if (node < 0 || node >= node_count()) {
    throw std::out_of_range("tape node id out of range");
  }
  return nodes_[static_cast<size_t>(node)].value;
}

Tensor Tape::emit(Op op, std::vector<int> inputs, Tensor value,
                  std::vector<int> iargs, double darg) {
  for (int i : inputs) {
    if (i < 0 || i >= node_count()) {
      throw std::out_of_range("tape input node id out of range");
    }
  }
  Node node{op, std::move(inputs), value.detached(), std::move(iargs), darg};
  nodes_.push_back(std::move(node));
  value.tape_ = this;
  value.node_ = node_count() - 1;
  return value;
}

int Tape::ensure_node(const Tensor& t) {
  if (t.attached()) {
    if (t.tape() != this) throw std::invalid_argument("tensor attached to another tape");
    return t.node();
  }
  return leaf(t).node();
}

void Tape::accumulate(int node, const Vec& g) {
  Vec& slot = grads_[static_cast<size_t>(node)];
  if (slot.size() == 0) {
    slot = g;
  } else {
    slot += g;
  }
}

void Tape::backward(const Tensor& loss) {
  if (!loss.attached() || loss.tape() != this) {
    throw std::invalid_argument("backward: loss is not a node of this tape");
  }
  if (loss.size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                loss.shape_str());
  }
  grads_.assign(nodes_.size(), Vec());
  grads_[static_cast<size_t>(loss.node())] = Vec::Ones(1);
  for (int n = loss.node(); n >= 0; --n) {
    if (grads_[static_cast<size_t>(n)].size() == 0) continue;
    backprop_node(n);
  }
  ran_backward_ = true;
}

Tensor Tape::grad(const Tensor& t) const {
  if (!t.attached() || t.tape() != this) {
    throw std::invalid_argument("grad: tensor is not a node of this tape");
  }
  if (!ran_backward_) throw std::logic_error("grad: backward() has not run");
  const Vec& g = grads_[static_cast<size_t>(t.node())];
  const Tensor& v = nodes_[static_cast<size_t>(t.node())].value;
  if (g.size() == 0) return Tensor::zeros(v.shape());
  return Tensor(v.shape(), g);
}

void Tape::backprop_node(int n) {
  const Node& node = nodes_[static_cast<size_t>(n)];
  const Vec& g = grads_[static_cast<size_t>(n)];
  auto in_value = [&](int k) -> const Tensor& {
    return nodes_[static_cast<size_t>(node.inputs[static_cast<size_t>(k)])].value;
  };
  auto acc = [&](int k, const Vec& dg) {
    accumulate(node.inputs[static_cast<size_t>(k)], dg);
  };

  switch (node.op) {
    case Op::kLeaf:
      break;
    case Op::kAdd:
      acc(0, g);
      acc(1, g);
      break;
    case Op::kMatmul: {
      const Tensor& a = in_value(0);
      const Tensor& b = in_value(1);
      const int m = a.dim(0), k = a.dim(1);
      if (b.rank() == 2) {
        const int ncols = b.dim(1);
        Eigen::Map<const RowMat> gm(g.data(), m, ncols);
        RowMat da = gm * b.mat().transpose();
        RowMat db = a.mat().transpose() * gm;
        acc(0, Eigen::Map<const Vec>(da.data(), da.size()));
        acc(1, Eigen::Map<const Vec>(db.data(), db.size()));
      } else {
        RowMat da = g * b.data().transpose();  // outer product m x k
        Vec db = a.mat().transpose() * g;
        acc(0, Eigen::Map<const Vec>(da.data(), da.size()));
        acc(1, db);
      }
      (void)k;
      break;
    }
    case Op::kHadamard:
      acc(0, (g.array() * in_value(1).data().array()).matrix());
      acc(1, (g.array() * in_value(0).data().array()).matrix());
      break;
    case Op::kRelu: {
      const Vec& x = in_value(0).data();
      acc(0, (g.array() * (x.array() > 0.0).cast<double>()).matrix());
      break;
    }
    case Op::kSigmoid: {
      const Vec& y = node.value.data();
      acc(0, (g.array() * y.array() * (1.0 - y.array())).matrix());
      break;
    }
    case Op::kSoftmaxRows: {
      const Tensor& y = node.value;
      const int cols = y.dim(y.rank() - 1);
      const int rows = y.size() / cols;
      Vec dx(y.size());
      for (int r = 0; r < rows; ++r) {
        auto yr = y.data().segment(r * cols, cols).array();
        auto gr = g.segment(r * cols, cols).array();
        const double dot = (gr * yr).sum();
        dx.segment(r * cols, cols) = (yr * (gr - dot)).matrix();
      }
      acc(0, dx);
      break;
    }
    case Op::kSum:
      acc(0, Vec::Constant(in_value(0).size(), g[0]));
      break;
    case Op::kScale:
      acc(0, g * node.darg);
      break;
    case Op::kConcat: {
      const int la = node.iargs[0];
      acc(0, g.head(la));
      acc(1, g.tail(g.size() - la));
      break;
    }
    case Op::kStackRows: {
      const int cols = node.value.dim(1);
      for (size_t i = 0; i < node.inputs.size(); ++i) {
        accumulate(node.inputs[i], g.segment(static_cast<int>(i) * cols, cols));
      }
      break;
    }
    case Op::kReshape:
      acc(0, g);
      break;
    case Op::kGatherRows: {
      const Tensor& table = in_value(0);
      const int cols = table.dim(1);
      Vec dt = Vec::Zero(table.size());
      for (size_t t = 0; t < node.iargs.size(); ++t) {
        dt.segment(node.iargs[t] * cols, cols) += g.segment(static_cast<int>(t) * cols, cols);
      }
      acc(0, dt);
      break;
    }
    case Op::kTakeRow: {
      const Tensor& m = in_value(0);
      Vec dm = Vec::Zero(m.size());
      dm.segment(node.iargs[0] * m.dim(1), m.dim(1)) = g;
      acc(0, dm);
      break;
    }
    case Op::kSquashRows: {
      const Tensor& s = in_value(0);
      const int cols = s.dim(s.rank() - 1);
      const int rows = s.size() / cols;
      Vec ds = Vec::Zero(s.size());
      for (int r = 0; r < rows; ++r) {
        auto sr = s.data().segment(r * cols, cols);
        auto gr = g.segment(r * cols, cols);
        const double q = sr.squaredNorm();
        if (q == 0.0) continue;  // squash(0) = 0 with zero jacobian
        const double nrm = std::sqrt(q);
        const double phi = nrm / (1.0 + q);
        const double coef = (1.0 - q) / (nrm * (1.0 + q) * (1.0 + q));
        ds.segment(r * cols, cols) = phi * gr + coef * gr.dot(sr) * sr;
      }
      acc(0, ds);
      break;
    }
    case Op::kCapsPredict: {
      const Tensor& w = in_value(0);
      const Tensor& u = in_value(1);
      const int ni = w.dim(0), no = w.dim(1), dout = w.dim(2), din = w.dim(3);
      Vec dw = Vec::Zero(w.size());
      Vec du = Vec::Zero(u.size());
      for (int i = 0; i < ni; ++i) {
        Eigen::Map<const Vec> ui(u.data().data() + i * din, din);
        Eigen::Map<Vec> dui(du.data() + i * din, din);
        for (int j = 0; j < no; ++j) {
          const int base = (i * no + j) * dout;
          Eigen::Map<const RowMat> wij(w.data().data() + (i * no + j) * dout * din, dout, din);
          Eigen::Map<const Vec> gij(g.data() + base, dout);
          Eigen::Map<RowMat> dwij(dw.data() + (i * no + j) * dout * din, dout, din);
          dwij = gij * ui.transpose();
          dui += wij.transpose() * gij;
        }
      }
      acc(0, dw);
      acc(1, du);
      break;
    }
    case Op::kCapsWeightedSum: {
      const Tensor& c = in_value(0);
      const Tensor& uh = in_value(1);
      const int ni = uh.dim(0), no = uh.dim(1), dout = uh.dim(2);
      Vec dc = Vec::Zero(c.size());
      Vec duh = Vec::Zero(uh.size());
      for (int i = 0; i < ni; ++i) {
        for (int j = 0; j < no; ++j) {
          auto uhij = uh.data().segment((i * no + j) * dout, dout);
          auto gj = g.segment(j * dout, dout);
          dc[i * no + j] = gj.dot(uhij);
          duh.segment((i * no + j) * dout, dout) = c(i, j) * gj;
        }
      }
      acc(0, dc);
      acc(1, duh);
      break;
    }
    case Op::kCapsAgreement: {
      const Tensor& uh = in_value(0);
      const Tensor& v = in_value(1);
      const int ni = uh.dim(0), no = uh.dim(1), dout = uh.dim(2);
      Vec duh = Vec::Zero(uh.size());
      Vec dv = Vec::Zero(v.size());
      for (int i = 0; i < ni; ++i) {
        for (int j = 0; j < no; ++j) {
          auto vj = v.data().segment(j * dout, dout);
          auto uhij = uh.data().segment((i * no + j) * dout, dout);
          duh.segment((i * no + j) * dout, dout) = g[i * no + j] * vj;
          dv.segment(j * dout, dout) += g[i * no + j] * uhij;
        }
      }
      acc(0, duh);
      acc(1, dv);
      break;
    }
    case Op::kBce: {
      const double p = in_value(0)(0);
      const double y = node.darg;
      Vec dp = Vec::Zero(1);
      if (p > kBceClamp && p < 1.0 - kBceClamp) {
        dp[0] = g[0] * (p - y) / (p * (1.0 - p));
      }
      acc(0, dp);
      break;
    }
  }
}

// ---- Primitives ------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("add", a, b);
  Tensor out(a.shape(), a.data() + b.data());
  return record(Op::kAdd, {&a, &b}, std::move(out));
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() < 1 || b.rank() > 2) shape_error("matmul", a, b);
  if (b.rank() == 2) {
    if (a.dim(1) != b.dim(0)) shape_error("matmul", a, b);
    RowMat c = a.mat() * b.mat();
    Tensor out({a.dim(0), b.dim(1)}, Eigen::Map<const Vec>(c.data(), c.size()));
    return record(Op::kMatmul, {&a, &b}, std::move(out));
  }
  if (a.dim(1) != b.dim(0)) shape_error("matmul", a, b);
  Vec c = a.mat() * b.data();
  Tensor out({a.dim(0)}, std::move(c));
  return record(Op::kMatmul, {&a, &b}, std::move(out));
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("hadamard", a, b);
  Tensor out(a.shape(), (a.data().array() * b.data().array()).matrix());
  return record(Op::kHadamard, {&a, &b}, std::move(out));
}

Tensor relu(const Tensor& a) {
  Tensor out(a.shape(), a.data().cwiseMax(0.0));
  return record(Op::kRelu, {&a}, std::move(out));
}

Tensor sigmoid(const Tensor& a) {
  Tensor out(a.shape(), (1.0 / (1.0 + (-a.data().array()).exp())).matrix());
  return record(Op::kSigmoid, {&a}, std::move(out));
}

Tensor softmax_rows(const Tensor& a) {
  const int cols = a.dim(a.rank() - 1);
  const int rows = a.size() / cols;
  Vec y(a.size());
  for (int r = 0; r < rows; ++r) {
    auto xr = a.data().segment(r * cols, cols).array();
    const double m = xr.maxCoeff();
    Eigen::ArrayXd e = (xr - m).exp();
    y.segment(r * cols, cols) = (e / e.sum()).matrix();
  }
  Tensor out(a.shape(), std::move(y));
  return record(Op::kSoftmaxRows, {&a}, std::move(out));
}

Tensor sum(const Tensor& a) {
  Tensor out = Tensor::scalar(a.data().sum());
  return record(Op::kSum, {&a}, std::move(out));
}

Tensor scale(const Tensor& a, double c) {
  Tensor out(a.shape(), a.data() * c);
  return record(Op::kScale, {&a}, std::move(out), {}, c);
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1) shape_error("concat", a, b);
  Vec c(a.size() + b.size());
  c << a.data(), b.data();
  Tensor out({a.size() + b.size()}, std::move(c));
  return record(Op::kConcat, {&a, &b}, std::move(out), {a.size()});
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: no rows");
  const int cols = rows[0].size();
  Vec data(static_cast<int>(rows.size()) * cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rank() != 1 || rows[i].size() != cols) {
      throw std::invalid_argument("stack_rows: rows must be rank-1 and equal length");
    }
    data.segment(static_cast<int>(i) * cols, cols) = rows[i].data();
  }
  Tensor out({static_cast<int>(rows.size()), cols}, std::move(data));

  Tape* tape = nullptr;
  for (const Tensor& r : rows) {
    if (r.attached()) {
      if (tape && tape != r.tape()) {
        throw std::invalid_argument("stack_rows: rows on different tapes");
      }
      tape = r.tape();
    }
  }
  if (tape == nullptr) return out;
  std::vector<int> ids;
  ids.reserve(rows.size());
  for (const Tensor& r : rows) ids.push_back(tape->ensure_node(r));
  return tape->emit(Op::kStackRows, std::move(ids), std::move(out));
}

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  check_extents(shape);
  if (numel(shape) != a.size()) {
    throw std::invalid_argument("reshape: cannot view " + a.shape_str() + " as " +
                                shape_to_str(shape));
  }
  Tensor out(std::move(shape), a.data());
  return record(Op::kReshape, {&a}, std::move(out));
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& ids) {
  if (table.rank() != 2) throw std::invalid_argument("gather_rows: table must be rank-2");
  if (ids.empty()) throw std::invalid_argument("gather_rows: no ids");
  const int cols = table.dim(1);
  Vec data(static_cast<int>(ids.size()) * cols);
  for (size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= table.dim(0)) {
      throw std::out_of_range("gather_rows: id " + std::to_string(ids[t]) +
                              " outside table " + table.shape_str());
    }
    data.segment(static_cast<int>(t) * cols, cols) = table.data().segment(ids[t] * cols, cols);
  }
  Tensor out({static_cast<int>(ids.size()), cols}, std::move(data));
  return record(Op::kGatherRows, {&table}, std::move(out), ids);
}

Tensor take_row(const Tensor& m, int row) {
  if (m.rank() != 2) throw std::invalid_argument("take_row: tensor must be rank-2");
  if (row < 0 || row >= m.dim(0)) throw std::out_of_range("take_row: row out of range");
  Tensor out({m.dim(1)}, m.data().segment(row * m.dim(1), m.dim(1)));
  return record(Op::kTakeRow, {&m}, std::move(out), {row});
}

Tensor squash_rows(const Tensor& s) {
  const int cols = s.dim(s.rank() - 1);
  const int rows = s.size() / cols;
  Vec v(s.size());
  for (int r = 0; r < rows; ++r) {
    auto sr = s.data().segment(r * cols, cols);
    const double q = sr.squaredNorm();
    // s * ||s|| / (1 + ||s||^2): same value as (q/(1+q)) * s/||s|| but with
    // no singularity at the origin.
    v.segment(r * cols, cols) = q == 0.0 ? Vec::Zero(cols) : Vec(sr * (std::sqrt(q) / (1.0 + q)));
  }
  Tensor out(s.shape(), std::move(v));
  return record(Op::kSquashRows, {&s}, std::move(out));
}

Tensor caps_predict(const Tensor& w, const Tensor& u) {
  if (w.rank() != 4 || u.rank() != 2) shape_error("caps_predict", w, u);
  const int ni = w.dim(0), no = w.dim(1), dout = w.dim(2), din = w.dim(3);
  if (u.dim(0) != ni || u.dim(1) != din) shape_error("caps_predict", w, u);
  Vec data(ni * no * dout);
  for (int i = 0; i < ni; ++i) {
    Eigen::Map<const Vec> ui(u.data().data() + i * din, din);
    for (int j = 0; j < no; ++j) {
      Eigen::Map<const RowMat> wij(w.data().data() + (i * no + j) * dout * din, dout, din);
      data.segment((i * no + j) * dout, dout) = wij * ui;
    }
  }
  Tensor out({ni, no, dout}, std::move(data));
  return record(Op::kCapsPredict, {&w, &u}, std::move(out));
}

Tensor caps_weighted_sum(const Tensor& c, const Tensor& u_hat) {
  if (c.rank() != 2 || u_hat.rank() != 3) shape_error("caps_weighted_sum", c, u_hat);
  const int ni = u_hat.dim(0), no = u_hat.dim(1), dout = u_hat.dim(2);
  if (c.dim(0) != ni || c.dim(1) != no) shape_error("caps_weighted_sum", c, u_hat);
  Vec data = Vec::Zero(no * dout);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < no; ++j) {
      data.segment(j * dout, dout) += c(i, j) * u_hat.data().segment((i * no + j) * dout, dout);
    }
  }
  Tensor out({no, dout}, std::move(data));
  return record(Op::kCapsWeightedSum, {&c, &u_hat}, std::move(out));
}

Tensor caps_agreement(const Tensor& u_hat, const Tensor& v) {
  if (u_hat.rank() != 3 || v.rank() != 2) shape_error("caps_agreement", u_hat, v);
  const int ni = u_hat.dim(0), no = u_hat.dim(1), dout = u_hat.dim(2);
  if (v.dim(0) != no || v.dim(1) != dout) shape_error("caps_agreement", u_hat, v);
  Vec data(ni * no);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < no; ++j) {
      data[i * no + j] =
          u_hat.data().segment((i * no + j) * dout, dout).dot(v.data().segment(j * dout, dout));
    }
  }
  Tensor out({ni, no}, std::move(data));
  return record(Op::kCapsAgreement, {&u_hat, &v}, std::move(out));
}

Tensor bce(const Tensor& p, double y) {
  if (p.size() != 1) {
    throw std::invalid_argument("bce: probability must be scalar, got " + p.shape_str());
  }
  const double pc = std::min(std::max(p(0), kBceClamp), 1.0 - kBceClamp);
  Tensor out = Tensor::scalar(-(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc)));
  return record(Op::kBce, {&p}, std::move(out), {}, y);
}

// ---- Gradient checking -----------------------------------------------------

GradCheckReport grad_check(
    const std::function<Tensor(Tape&, const std::vector<Tensor>&)>& f,
    const std::vector<Tensor>& params, double epsilon, double tolerance) {
  if (epsilon <= 0.0) throw std::invalid_argument("grad_check: epsilon must be > 0");

  auto run = [&](const std::vector<Tensor>& values, Tape& tape) {
    std::vector<Tensor> attached;
    attached.reserve(values.size());
    for (const Tensor& v : values) attached.push_back(tape.leaf(v));
    Tensor loss = f(tape, attached);
    if (loss.size() != 1) throw std::invalid_argument("grad_check: f must return a scalar");
    return std::make_pair(loss, std::move(attached));
  };

  // Analytic pass.
  Tape tape;
  auto [loss, attached] = run(params, tape);
  tape.backward(loss);
  std::vector<Tensor> analytic;
  analytic.reserve(attached.size());
  for (const Tensor& a : attached) analytic.push_back(tape.grad(a));

  GradCheckReport report;
  std::vector<Tensor> work = params;
  for (size_t p = 0; p < work.size(); ++p) {
    for (int e = 0; e < work[p].size(); ++e) {
      const double saved = work[p][e];
      work[p][e] = saved + epsilon;
      Tape tp;
      const double f_plus = run(work, tp).first(0);
      work[p][e] = saved - epsilon;
      Tape tm;
      const double f_minus = run(work, tm).first(0);
      work[p][e] = saved;

      const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      const double a = analytic[p][e];
      const double rel = std::abs(a - numeric) /
                         std::max({1e-6, std::abs(a), std::abs(numeric)});
      ++report.entries;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = static_cast<int>(p);
        report.worst_entry = e;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  (void)tolerance;
  return report;
}

}  // namespace capsf
