#pragma once

// Deterministic synthetic command corpus.
//
// Each group is `<action> [the <object>] [in the <location>]`; groups are
// joined by connector words. Dependency heads follow fixed rules:
//   - group 1's action head word is the root (its own head);
//   - connectors and later action head words attach to the previous group's action head;
//   - object and location head words (last word of the phrase) attach to their action head;
//   - determiners, the preposition and the remaining phrase words attach to their phrase head.
// An action phrase's head is its first word.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slfnet/data.hpp"

namespace slfnet {

struct GrammarConfig {
  std::vector<std::string> actions;
  std::vector<std::string> objects;
  std::vector<std::string> locations;
  std::vector<std::string> connectors;
  std::vector<double> k_weights;  // weight of k = 1, 2, ... (size = largest k)
  double p_omit_location = 0.4;
  double p_omit_object = 0.15;
  std::uint64_t seed = 7;

  static GrammarConfig defaults();
  // Throws DomainError describing the first invalid field.
  void validate() const;
};

// Draws use xorshift64* seeded from config.seed only. Actions within one
// example are distinct while the action list allows it.
std::vector<NLCExample> generate_synthetic(const GrammarConfig& config, std::size_t n);

}  // namespace slfnet
