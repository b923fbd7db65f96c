#pragma once

// Command accuracy and slot-level precision / recall / F-score.
//
//   accuracy  = C / T          C: exactly matched commands, T: commands
//   precision = L / P          L: correct slot values, P: predicted slot values
//   recall    = L / R          R: gold slot values
//   F         = 2PR / (P + R)
// Zero denominators give 0. A command matches when its multiset of
// (action, location, object) text triples equals the gold multiset; slot values
// are (slot type, span) pairs, and empty slots are not counted.

#include <cstddef>
#include <string>
#include <vector>

#include "slfnet/data.hpp"
#include "slfnet/kernels.hpp"
#include "slfnet/model.hpp"
#include "slfnet/types.hpp"

namespace slfnet {

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::size_t C = 0;
  std::size_t T = 0;
  std::size_t L_correct = 0;
  std::size_t P_pred = 0;
  std::size_t R_gold = 0;
};

struct ExampleScore {
  bool exact = false;
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

ExampleScore score_example(const std::vector<SlfGroup>& predicted, const std::vector<SlfGroup>& gold,
                           const std::vector<std::string>& tokens);

// Sums per-example scores and derives the four ratios.
MetricsReport summarize(const std::vector<ExampleScore>& scores);

// predicted[i] is scored against examples[i].
MetricsReport score_parses(const std::vector<std::vector<SlfGroup>>& predicted,
                           const std::vector<NLCExample>& examples);

// Decodes every example and scores it. Parallel decodes examples on OpenMP
// threads; both modes reduce in example order and return identical reports.
MetricsReport evaluate(const SlfModel& model, const std::vector<NLCExample>& examples,
                       kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace slfnet
