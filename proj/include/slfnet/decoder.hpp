#pragma once

// Semantic probability graph and the decoder that walks it.
//
// Each group g contributes Action_g, Location_g and Object_g. The NLC node
// feeds every slot; Action_g feeds Location_g and Object_g; Location_g feeds
// Object_g. Groups share no edges, so a slot sees only its own group.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slfnet/model.hpp"
#include "slfnet/types.hpp"

namespace slfnet {

enum class SlotKind { Nlc, Action, Location, Object };

const char* slot_kind_name(SlotKind kind) noexcept;

struct GraphNode {
  SlotKind kind;
  std::size_t group;  // 1-based; 0 for the NLC node
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct SemanticProbGraph {
  std::vector<GraphNode> nodes;                            // nodes[0] is NLC
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (from, to) node indices

  std::size_t index_of(SlotKind kind, std::size_t group) const;
  std::vector<std::size_t> parents(std::size_t node) const;
  bool acyclic() const;
};

// Throws DomainError unless 0 <= k <= k_max.
SemanticProbGraph build_graph(std::size_t k, std::size_t k_max);

// Anchor at the most probable position, then grow left and right while each
// neighbor keeps at least beta times the anchor probability. The last entry of
// `probs` is the sentinel; winning it yields the empty span.
OptSpan span_from_distribution(std::span<const double> probs, double beta);

struct HeadInvocation {
  SlotKind kind;       // Nlc stands for the group-count classifier
  std::size_t group;   // 1-based for Location/Object, 0 otherwise
  std::vector<double> distribution;
};

struct DecodeTrace {
  std::size_t predicted_k = 0;
  std::vector<HeadInvocation> invocations;  // in execution order
  std::vector<std::pair<Span, double>> action_scores;
  std::vector<std::vector<double>> type_attention;  // q_A, q_L, q_O weights, per head
  std::vector<std::string> warnings;
};

struct SlfParse {
  std::size_t k = 0;  // == groups.size()
  std::vector<SlfGroup> groups;  // sorted by action start
  DecodeTrace trace;
};

// Deterministic greedy decode: group count, top-k non-overlapping actions,
// then Location_g and Object_g for g = 1..k in order.
SlfParse decode(const SlfModel& model, const std::vector<std::string>& tokens,
                std::span<const std::size_t> heads);

// One `ALO(action_name_g="...", location_name_g="..."|NIL, object_name_g="..."|NIL)`
// line per group, joined with '\n'; the empty parse renders as "".
std::string render_slf(const std::vector<SlfGroup>& groups, const std::vector<std::string>& tokens);

}  // namespace slfnet
