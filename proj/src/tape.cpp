#include "slfnet/tape.hpp"

#include <algorithm>
#include <cmath>

#include "slfnet/errors.hpp"
#include "slfnet/kernels.hpp"

namespace slfnet {
namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_log_sigmoid(double x) {
  return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x)));
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape()))
    throw DimensionError(std::string(op) + ": shapes " + a.shape().str() + " and " +
                         b.shape().str() + " differ");
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank)
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + t.shape().str());
}

Tape& same_tape(Var a, Var b) {
  if (a.tape() != b.tape() || a.tape() == nullptr)
    throw ContractError("operands recorded on different tapes");
  return *a.tape();
}

void add_into(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

const char* op_name(OpKind op) noexcept {
  switch (op) {
    case OpKind::Constant: return "constant";
    case OpKind::Parameter: return "parameter";
    case OpKind::MatMul: return "matmul";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Scale: return "scale";
    case OpKind::Sigmoid: return "sigmoid";
    case OpKind::Tanh: return "tanh";
    case OpKind::LogSigmoid: return "log_sigmoid";
    case OpKind::Softmax: return "softmax";
    case OpKind::LogSoftmax: return "log_softmax";
    case OpKind::Concat: return "concat";
    case OpKind::StackColumns: return "stack_columns";
    case OpKind::Column: return "column";
    case OpKind::SliceColumns: return "slice_columns";
    case OpKind::SelectColumns: return "select_columns";
    case OpKind::Slice: return "slice";
    case OpKind::Transpose: return "transpose";
    case OpKind::Reshape: return "reshape";
    case OpKind::Sum: return "sum";
    case OpKind::AddToColumns: return "add_to_columns";
    case OpKind::LookupColumns: return "lookup_columns";
    case OpKind::LstmCell: return "lstm_cell";
  }
  return "?";
}

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("value() on an empty Var");
  return tape_->value(id_);
}

Var Tape::constant(Tensor value) { return push(OpKind::Constant, std::move(value), {}); }

Var Tape::param(ParamId id) {
  if (!params_) throw ContractError("tape has no parameter store");
  if (id >= params_->size()) throw ContractError("unknown parameter id " + std::to_string(id));
  if (param_nodes_.size() < params_->size()) param_nodes_.resize(params_->size(), kNoNode);
  if (param_nodes_[id] != kNoNode) return Var(this, param_nodes_[id]);
  Var v = push(OpKind::Parameter, params_->value(id), {});
  nodes_.back().param = id;
  nodes_.back().needs_grad = true;
  param_nodes_[id] = v.id();
  return v;
}

std::span<const NodeId> Tape::inputs(NodeId id) const {
  const Node& n = nodes_.at(id);
  return std::span<const NodeId>(input_pool_).subspan(n.in_begin, n.in_count);
}

Var Tape::push(OpKind op, Tensor value, std::initializer_list<NodeId> inputs, double scalar,
               std::size_t a0, std::size_t a1) {
  Var v = push_n(op, std::move(value), std::span<const NodeId>(inputs.begin(), inputs.size()), a0);
  nodes_.back().scalar = scalar;
  nodes_.back().a1 = a1;
  return v;
}

Var Tape::push_n(OpKind op, Tensor value, std::span<const NodeId> inputs, std::size_t a0) {
  bool needs = false;
  for (NodeId in : inputs) needs = needs || nodes_[in].needs_grad;
  Node n{op, needs, static_cast<std::uint32_t>(input_pool_.size()),
         static_cast<std::uint32_t>(inputs.size()), 0, 0, 0.0, a0, 0, 0, std::move(value)};
  input_pool_.insert(input_pool_.end(), inputs.begin(), inputs.end());
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<NodeId>(nodes_.size() - 1));
}

void Tape::set_indices(NodeId id, std::span<const std::size_t> idx) {
  Node& n = nodes_.at(id);
  n.idx_begin = static_cast<std::uint32_t>(index_pool_.size());
  n.idx_count = static_cast<std::uint32_t>(idx.size());
  index_pool_.insert(index_pool_.end(), idx.begin(), idx.end());
}

Gradients Tape::backward(Var loss) {
  if (!params_) throw ContractError("backward() needs a parameter store");
  Gradients g = zero_gradients(*params_);
  backward(loss, g);
  return g;
}

void Tape::backward(Var loss, Gradients& into) {
  if (loss.tape() != this) throw ContractError("loss was recorded on a different tape");
  if (loss.value().size() != 1)
    throw ContractError("backward() needs a scalar loss, got shape " + loss.shape().str());
  std::vector<Tensor> grads(loss.id() + 1);
  std::vector<char> has(loss.id() + 1, 0);
  replay(loss.id(), grads, has);
  for (NodeId i = 0; i <= loss.id(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == OpKind::Parameter && has[i]) add_into(into.at(n.param).data(), grads[i].data());
  }
}

void Tape::replay(NodeId loss, std::vector<Tensor>& grads, std::vector<char>& has) {
  auto grad_of = [&](NodeId id) -> Tensor& {
    if (!has[id]) {
      grads[id] = Tensor(nodes_[id].value.shape());
      has[id] = 1;
    }
    return grads[id];
  };
  grads[loss] = Tensor(nodes_[loss].value.shape(), 1.0);
  has[loss] = 1;
  last_visits_ = 0;

  for (NodeId id = loss + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!has[id] || !n.needs_grad) continue;
    if (n.op == OpKind::Constant || n.op == OpKind::Parameter) continue;
    ++last_visits_;
    const Tensor& gy = grads[id];
    const Tensor& y = n.value;
    const NodeId* in = input_pool_.data() + n.in_begin;
    auto wants = [&](std::size_t k) { return nodes_[in[k]].needs_grad; };

    switch (n.op) {
      case OpKind::Constant:
      case OpKind::Parameter:
        break;
      case OpKind::MatMul: {
        const Tensor& a = nodes_[in[0]].value;
        const Tensor& b = nodes_[in[1]].value;
        const std::size_t m = a.rows(), k = a.cols();
        const std::size_t nn = b.rank() == 2 ? b.cols() : 1;
        if (wants(0))
          kernels::matmul_acc_bt(gy.data(), b.data(), grad_of(in[0]).data(), m, nn, k,
                                 kernels::auto_exec(m, nn, k));
        if (wants(1))
          kernels::matmul_acc_at(a.data(), gy.data(), grad_of(in[1]).data(), m, k, nn,
                                 kernels::auto_exec(k, m, nn));
        break;
      }
      case OpKind::Add:
        if (wants(0)) add_into(grad_of(in[0]).data(), gy.data());
        if (wants(1)) add_into(grad_of(in[1]).data(), gy.data());
        break;
      case OpKind::Sub:
        if (wants(0)) add_into(grad_of(in[0]).data(), gy.data());
        if (wants(1)) {
          auto g = grad_of(in[1]).data();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gy[i];
        }
        break;
      case OpKind::Mul: {
        const Tensor& a = nodes_[in[0]].value;
        const Tensor& b = nodes_[in[1]].value;
        if (wants(0)) {
          auto g = grad_of(in[0]).data();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * b[i];
        }
        if (wants(1)) {
          auto g = grad_of(in[1]).data();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * a[i];
        }
        break;
      }
      case OpKind::Scale: {
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * n.scalar;
        break;
      }
      case OpKind::Sigmoid: {
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case OpKind::Tanh: {
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case OpKind::LogSigmoid: {
        const Tensor& x = nodes_[in[0]].value;
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * stable_sigmoid(-x[i]);
        break;
      }
      case OpKind::Softmax: {
        double dot = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) dot += gy[i] * y[i];
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += y[i] * (gy[i] - dot);
        break;
      }
      case OpKind::LogSoftmax: {
        double total = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) total += gy[i];
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] - std::exp(y[i]) * total;
        break;
      }
      case OpKind::Concat: {
        const std::size_t axis = n.a0;
        if (y.rank() == 1 || axis == 0) {
          // Contiguous blocks in row-major order.
          std::size_t offset = 0;
          for (std::uint32_t k = 0; k < n.in_count; ++k) {
            const std::size_t len = nodes_[in[k]].value.size();
            if (wants(k)) add_into(grad_of(in[k]).data(), gy.data().subspan(offset, len));
            offset += len;
          }
        } else {
          const std::size_t rows = y.rows(), total_cols = y.cols();
          std::size_t col0 = 0;
          for (std::uint32_t k = 0; k < n.in_count; ++k) {
            const std::size_t c = nodes_[in[k]].value.cols();
            if (wants(k)) {
              Tensor& g = grad_of(in[k]);
              for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < c; ++j) g.at(r, j) += gy[r * total_cols + col0 + j];
            }
            col0 += c;
          }
        }
        break;
      }
      case OpKind::StackColumns: {
        const std::size_t rows = y.rows(), cols = y.cols();
        for (std::uint32_t k = 0; k < n.in_count; ++k) {
          if (!wants(k)) continue;
          auto g = grad_of(in[k]).data();
          for (std::size_t r = 0; r < rows; ++r) g[r] += gy[r * cols + k];
        }
        break;
      }
      case OpKind::Column: {
        Tensor& g = grad_of(in[0]);
        for (std::size_t r = 0; r < g.rows(); ++r) g.at(r, n.a0) += gy[r];
        break;
      }
      case OpKind::SliceColumns: {
        Tensor& g = grad_of(in[0]);
        const std::size_t cnt = y.cols();
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t j = 0; j < cnt; ++j) g.at(r, n.a0 + j) += gy[r * cnt + j];
        break;
      }
      case OpKind::SelectColumns: {
        Tensor& g = grad_of(in[0]);
        const std::size_t* idx = index_pool_.data() + n.idx_begin;
        const std::size_t cnt = n.idx_count;
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t j = 0; j < cnt; ++j) g.at(r, idx[j]) += gy[r * cnt + j];
        break;
      }
      case OpKind::Slice: {
        auto g = grad_of(in[0]).data();
        for (std::size_t i = 0; i < y.size(); ++i) g[n.a0 + i] += gy[i];
        break;
      }
      case OpKind::Transpose: {
        Tensor& g = grad_of(in[0]);
        const std::size_t r = g.rows(), c = g.cols();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) g.at(i, j) += gy[j * r + i];
        break;
      }
      case OpKind::Reshape:
        add_into(grad_of(in[0]).data(), gy.data());
        break;
      case OpKind::Sum: {
        const double s = gy[0];
        for (double& v : grad_of(in[0]).data()) v += s;
        break;
      }
      case OpKind::AddToColumns: {
        if (wants(0)) add_into(grad_of(in[0]).data(), gy.data());
        if (wants(1)) {
          auto g = grad_of(in[1]).data();
          const std::size_t rows = y.rows(), cols = y.cols();
          for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += gy[r * cols + j];
            g[r] += s;
          }
        }
        break;
      }
      case OpKind::LookupColumns: {
        Tensor& g = grad_of(in[0]);
        const std::size_t* idx = index_pool_.data() + n.idx_begin;
        const std::size_t d = y.rows(), len = y.cols();
        for (std::size_t j = 0; j < len; ++j)
          for (std::size_t r = 0; r < d; ++r) g.at(idx[j], r) += gy[r * len + j];
        break;
      }
      case OpKind::LstmCell: {
        const Tensor& z = nodes_[in[0]].value;
        const Tensor& prev = nodes_[in[1]].value;
        const std::size_t h = y.size() / 2;
        Tensor* gz = wants(0) ? &grad_of(in[0]) : nullptr;
        Tensor* gs = wants(1) ? &grad_of(in[1]) : nullptr;
        for (std::size_t j = 0; j < h; ++j) {
          const double ig = stable_sigmoid(z[j]);
          const double fg = stable_sigmoid(z[h + j]);
          const double gg = std::tanh(z[2 * h + j]);
          const double og = stable_sigmoid(z[3 * h + j]);
          const double c = y[h + j];
          const double tc = std::tanh(c);
          const double dh = gy[j];
          const double dc = gy[h + j] + dh * og * (1.0 - tc * tc);
          if (gz) {
            (*gz)[j] += dc * gg * ig * (1.0 - ig);
            (*gz)[h + j] += dc * prev[h + j] * fg * (1.0 - fg);
            (*gz)[2 * h + j] += dc * ig * (1.0 - gg * gg);
            (*gz)[3 * h + j] += dh * tc * og * (1.0 - og);
          }
          if (gs) (*gs)[h + j] += dc * fg;
        }
        break;
      }
    }
  }
}

namespace ad {

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank("matmul", av, 2);
  if (bv.rank() != 1 && bv.rank() != 2)
    throw DimensionError("matmul: right operand must be rank 1 or 2, got " + bv.shape().str());
  const std::size_t m = av.rows(), k = av.cols();
  if (bv.rows() != k)
    throw DimensionError("matmul: inner dimensions differ for " + av.shape().str() + " x " +
                         bv.shape().str());
  const std::size_t n = bv.rank() == 2 ? bv.cols() : 1;
  Tensor out(bv.rank() == 2 ? Shape{m, n} : Shape{m});
  kernels::matmul(av.data(), bv.data(), out.data(), m, k, n, kernels::auto_exec(m, k, n));
  return t.push(OpKind::MatMul, std::move(out), {a.id(), b.id()});
}

namespace {

template <class F>
Var binary(OpKind op, const char* name, Var a, Var b, F f) {
  Tape& t = same_tape(a, b);
  require_same_shape(name, a.value(), b.value());
  Tensor out(a.shape());
  const auto& x = a.value();
  const auto& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return t.push(op, std::move(out), {a.id(), b.id()});
}

template <class F>
Var unary(OpKind op, Var a, F f, double scalar = 0.0) {
  Tensor out(a.shape());
  const auto& x = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
  return a.tape()->push(op, std::move(out), {a.id()}, scalar);
}

}  // namespace

Var add(Var a, Var b) {
  return binary(OpKind::Add, "add", a, b, [](double x, double y) { return x + y; });
}
Var sub(Var a, Var b) {
  return binary(OpKind::Sub, "sub", a, b, [](double x, double y) { return x - y; });
}
Var mul(Var a, Var b) {
  return binary(OpKind::Mul, "mul", a, b, [](double x, double y) { return x * y; });
}
Var scale(Var a, double s) {
  return unary(OpKind::Scale, a, [s](double x) { return x * s; }, s);
}
Var sigmoid(Var x) { return unary(OpKind::Sigmoid, x, stable_sigmoid); }
Var tanh(Var x) { return unary(OpKind::Tanh, x, [](double v) { return std::tanh(v); }); }
Var log_sigmoid(Var x) { return unary(OpKind::LogSigmoid, x, stable_log_sigmoid); }

Var softmax(Var v) {
  const Tensor& x = v.value();
  require_rank("softmax", x, 1);
  if (x.size() == 0) throw DomainError("softmax of an empty vector");
  const double mx = *std::max_element(x.data().begin(), x.data().end());
  Tensor out(x.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += (out[i] = std::exp(x[i] - mx));
  for (double& o : out.data()) o /= total;
  return v.tape()->push(OpKind::Softmax, std::move(out), {v.id()});
}

Var log_softmax(Var v) {
  const Tensor& x = v.value();
  require_rank("log_softmax", x, 1);
  if (x.size() == 0) throw DomainError("log_softmax of an empty vector");
  const double mx = *std::max_element(x.data().begin(), x.data().end());
  double total = 0.0;
  for (double xi : x.data()) total += std::exp(xi - mx);
  const double lse = mx + std::log(total);
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - lse;
  return v.tape()->push(OpKind::LogSoftmax, std::move(out), {v.id()});
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw DomainError("concat of zero parts");
  Tape* t = parts[0].tape();
  std::vector<NodeId> ids;
  ids.reserve(parts.size());
  const Tensor& first = parts[0].value();
  for (const Var& p : parts) {
    if (p.tape() != t) throw ContractError("concat operands recorded on different tapes");
    ids.push_back(p.id());
  }
  if (first.rank() == 1) {
    if (axis != 0) throw DimensionError("concat: rank-1 parts only concatenate along axis 0");
    std::vector<double> out;
    for (const Var& p : parts) {
      require_rank("concat", p.value(), 1);
      out.insert(out.end(), p.value().data().begin(), p.value().data().end());
    }
    return t->push_n(OpKind::Concat, Tensor::vector(std::move(out)), ids, axis);
  }
  require_rank("concat", first, 2);
  if (axis > 1) throw DimensionError("concat: axis must be 0 or 1 for matrices");
  std::size_t rows = 0, cols = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    require_rank("concat", v, 2);
    const std::size_t keep = axis == 0 ? v.cols() : v.rows();
    const std::size_t ref = axis == 0 ? first.cols() : first.rows();
    if (keep != ref)
      throw DimensionError("concat: part " + v.shape().str() + " does not match " +
                           first.shape().str() + " off axis " + std::to_string(axis));
    if (axis == 0) rows += v.rows(); else cols += v.cols();
  }
  if (axis == 0) {
    std::vector<double> out;
    for (const Var& p : parts)
      out.insert(out.end(), p.value().data().begin(), p.value().data().end());
    return t->push_n(OpKind::Concat, Tensor::matrix(rows, first.cols(), std::move(out)), ids, 0);
  }
  rows = first.rows();
  Tensor out(Shape{rows, cols});
  std::size_t col0 = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < v.cols(); ++j) out.at(r, col0 + j) = v.at(r, j);
    col0 += v.cols();
  }
  return t->push_n(OpKind::Concat, std::move(out), ids, 1);
}

Var concat(std::initializer_list<Var> parts, std::size_t axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var stack_columns(std::span<const Var> columns) {
  if (columns.empty()) throw DomainError("stack_columns of zero vectors");
  Tape* t = columns[0].tape();
  const std::size_t rows = columns[0].value().size();
  const std::size_t cols = columns.size();
  Tensor out(Shape{rows, cols});
  std::vector<NodeId> ids;
  ids.reserve(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const Tensor& v = columns[j].value();
    if (columns[j].tape() != t) throw ContractError("stack_columns across tapes");
    require_rank("stack_columns", v, 1);
    if (v.size() != rows)
      throw DimensionError("stack_columns: column " + std::to_string(j) + " has shape " +
                           v.shape().str() + ", expected [" + std::to_string(rows) + "]");
    for (std::size_t r = 0; r < rows; ++r) out.at(r, j) = v[r];
    ids.push_back(columns[j].id());
  }
  return t->push_n(OpKind::StackColumns, std::move(out), ids);
}

Var column(Var m, std::size_t j) {
  const Tensor& x = m.value();
  require_rank("column", x, 2);
  if (j >= x.cols())
    throw DimensionError("column " + std::to_string(j) + " out of range for " + x.shape().str());
  Tensor out(Shape{x.rows()});
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = x.at(r, j);
  return m.tape()->push(OpKind::Column, std::move(out), {m.id()}, 0.0, j);
}

Var slice_columns(Var m, std::size_t start, std::size_t count) {
  const Tensor& x = m.value();
  require_rank("slice_columns", x, 2);
  if (count == 0 || start + count > x.cols())
    throw DimensionError("slice_columns [" + std::to_string(start) + ", +" +
                         std::to_string(count) + ") out of range for " + x.shape().str());
  Tensor out(Shape{x.rows(), count});
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < count; ++j) out.at(r, j) = x.at(r, start + j);
  return m.tape()->push(OpKind::SliceColumns, std::move(out), {m.id()}, 0.0, start);
}

Var select_columns(Var m, std::span<const std::size_t> cols) {
  const Tensor& x = m.value();
  require_rank("select_columns", x, 2);
  if (cols.empty()) throw DimensionError("select_columns with no columns");
  Tensor out(Shape{x.rows(), cols.size()});
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] >= x.cols())
      throw DimensionError("select_columns: column " + std::to_string(cols[j]) +
                           " out of range for " + x.shape().str());
    for (std::size_t r = 0; r < x.rows(); ++r) out.at(r, j) = x.at(r, cols[j]);
  }
  Var v = m.tape()->push(OpKind::SelectColumns, std::move(out), {m.id()});
  m.tape()->set_indices(v.id(), cols);
  return v;
}

Var slice(Var v, std::size_t start, std::size_t len) {
  const Tensor& x = v.value();
  require_rank("slice", x, 1);
  if (len == 0 || start + len > x.size())
    throw DimensionError("slice [" + std::to_string(start) + ", +" + std::to_string(len) +
                         ") out of range for " + x.shape().str());
  std::vector<double> out(x.data().begin() + static_cast<std::ptrdiff_t>(start),
                          x.data().begin() + static_cast<std::ptrdiff_t>(start + len));
  return v.tape()->push(OpKind::Slice, Tensor::vector(std::move(out)), {v.id()}, 0.0, start);
}

Var transpose(Var m) {
  const Tensor& x = m.value();
  require_rank("transpose", x, 2);
  const std::size_t r = x.rows(), c = x.cols();
  Tensor out(Shape{c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = x.at(i, j);
  return m.tape()->push(OpKind::Transpose, std::move(out), {m.id()});
}

Var reshape(Var a, Shape shape) {
  if (shape.numel() != a.value().size())
    throw DimensionError("reshape " + a.shape().str() + " to " + shape.str());
  return a.tape()->push(OpKind::Reshape, Tensor(shape, a.value().values()), {a.id()});
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.tape()->push(OpKind::Sum, Tensor::scalar(s), {a.id()});
}

Var add_to_columns(Var m, Var v) {
  Tape& t = same_tape(m, v);
  const Tensor& x = m.value();
  const Tensor& c = v.value();
  require_rank("add_to_columns", x, 2);
  require_rank("add_to_columns", c, 1);
  if (c.size() != x.rows())
    throw DimensionError("add_to_columns: " + c.shape().str() + " vs " + x.shape().str());
  Tensor out(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < x.cols(); ++j) out.at(r, j) = x.at(r, j) + c[r];
  return t.push(OpKind::AddToColumns, std::move(out), {m.id(), v.id()});
}

Var lookup_columns(Var table, std::span<const std::size_t> ids) {
  const Tensor& x = table.value();
  require_rank("lookup_columns", x, 2);
  if (ids.empty()) throw DomainError("lookup_columns with no ids");
  const std::size_t d = x.cols();
  Tensor out(Shape{d, ids.size()});
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] >= x.rows())
      throw DimensionError("lookup_columns: row " + std::to_string(ids[j]) +
                           " out of range for " + x.shape().str());
    for (std::size_t r = 0; r < d; ++r) out.at(r, j) = x.at(ids[j], r);
  }
  Var v = table.tape()->push(OpKind::LookupColumns, std::move(out), {table.id()});
  table.tape()->set_indices(v.id(), ids);
  return v;
}

Var lstm_cell(Var gates, Var state) {
  Tape& t = same_tape(gates, state);
  const Tensor& z = gates.value();
  const Tensor& prev = state.value();
  require_rank("lstm_cell", z, 1);
  require_rank("lstm_cell", prev, 1);
  const std::size_t h = prev.size() / 2;
  if (prev.size() != 2 * h || z.size() != 4 * h)
    throw DimensionError("lstm_cell: gates " + z.shape().str() + " vs state " +
                         prev.shape().str());
  Tensor out(Shape{2 * h});
  for (std::size_t j = 0; j < h; ++j) {
    const double ig = stable_sigmoid(z[j]);
    const double fg = stable_sigmoid(z[h + j]);
    const double gg = std::tanh(z[2 * h + j]);
    const double og = stable_sigmoid(z[3 * h + j]);
    const double c = fg * prev[h + j] + ig * gg;
    out[h + j] = c;
    out[j] = og * std::tanh(c);
  }
  return t.push(OpKind::LstmCell, std::move(out), {gates.id(), state.id()});
}

}  // namespace ad
}  // namespace slfnet
