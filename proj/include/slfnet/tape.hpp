#pragma once

// Record-and-replay reverse-mode automatic differentiation.
//
// A Tape is the computation record for one forward pass: nodes are appended in
// execution order, so every node's inputs precede it, and `backward` replays
// the record once in reverse. Tapes are single-threaded; use one per example.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "slfnet/params.hpp"
#include "slfnet/tensor.hpp"

namespace slfnet {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class OpKind : std::uint8_t {
  Constant,
  Parameter,
  MatMul,
  Add,
  Sub,
  Mul,
  Scale,
  Sigmoid,
  Tanh,
  LogSigmoid,
  Softmax,
  LogSoftmax,
  Concat,
  StackColumns,
  Column,
  SliceColumns,
  SelectColumns,
  Slice,
  Transpose,
  Reshape,
  Sum,
  AddToColumns,
  LookupColumns,
  LstmCell,
};

const char* op_name(OpKind op) noexcept;

class Tape;

/// Handle to a node on a tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  NodeId id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  NodeId id_ = kNoNode;
};

class Tape {
 public:
  explicit Tape(const ParamStore* params = nullptr) : params_(params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf for a stored parameter; repeated calls return the same node.
  Var param(ParamId id);

  std::size_t size() const noexcept { return nodes_.size(); }
  OpKind op(NodeId id) const { return nodes_.at(id).op; }
  std::span<const NodeId> inputs(NodeId id) const;
  const Tensor& value(NodeId id) const { return nodes_.at(id).value; }
  const ParamStore* params() const noexcept { return params_; }

  // Returns d(loss)/d(param) for every parameter in the store; unreachable
  // parameters get zeros. Throws ContractError if loss is not a scalar.
  Gradients backward(Var loss);
  // Same, adding into an existing gradient buffer.
  void backward(Var loss, Gradients& into);
  // Number of nodes whose backward rule ran in the last replay.
  std::size_t last_backward_visits() const noexcept { return last_visits_; }

  // Used by op implementations.
  Var push(OpKind op, Tensor value, std::initializer_list<NodeId> inputs, double scalar = 0.0,
           std::size_t a0 = 0, std::size_t a1 = 0);
  Var push_n(OpKind op, Tensor value, std::span<const NodeId> inputs, std::size_t a0 = 0);
  void set_indices(NodeId id, std::span<const std::size_t> idx);

 private:
  struct Node {
    OpKind op;
    bool needs_grad;
    std::uint32_t in_begin;
    std::uint32_t in_count;
    std::uint32_t idx_begin = 0;
    std::uint32_t idx_count = 0;
    double scalar;
    std::size_t a0;
    std::size_t a1;
    ParamId param = 0;
    Tensor value;
  };

  void replay(NodeId loss, std::vector<Tensor>& grads, std::vector<char>& has);

  const ParamStore* params_;
  std::vector<Node> nodes_;
  std::vector<NodeId> input_pool_;
  std::vector<std::size_t> index_pool_;
  std::vector<NodeId> param_nodes_;
  std::size_t last_visits_ = 0;
};

// Differentiable operations. Vectors are rank-1, matrices rank-2; apart from
// `scale` there is no implicit broadcasting.
namespace ad {

// [m×k]·[k×n] → [m×n]; [m×k]·[k] → [m].
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var sigmoid(Var x);
Var tanh(Var x);
// log σ(x), stable for large |x|.
Var log_sigmoid(Var x);
Var softmax(Var v);
Var log_softmax(Var v);
// Rank-1 parts along axis 0, or rank-2 parts along axis 0 (rows) or 1 (columns).
Var concat(std::span<const Var> parts, std::size_t axis);
Var concat(std::initializer_list<Var> parts, std::size_t axis);
// n vectors of length m → [m×n].
Var stack_columns(std::span<const Var> columns);
Var column(Var m, std::size_t j);
Var slice_columns(Var m, std::size_t start, std::size_t count);
Var select_columns(Var m, std::span<const std::size_t> cols);
Var slice(Var v, std::size_t start, std::size_t len);
Var transpose(Var m);
Var reshape(Var a, Shape shape);
Var sum(Var a);
// m[:, j] + v for every column j.
Var add_to_columns(Var m, Var v);
// table[V×d], ids → [d×L] with column i = table row ids[i].
Var lookup_columns(Var table, std::span<const std::size_t> ids);
// gates [4h] (input, forget, cell, output pre-activations), state [2h] = [h; c] → new [h; c].
Var lstm_cell(Var gates, Var state);

}  // namespace ad
}  // namespace slfnet
